"""Partial quasimorphisms as first-class values.

A :class:`PqmHandle` is a real-valued function on a group context together
with measured constants: the defect ``D`` (worst ratio of
``|f(g) - f(gh) + f(h)|`` against ``min(||g||, ||h||)``), the Lipschitz
constant ``C``, and the generator bound ``sigma``.  On top of the handles
the module provides:

* deterministic homogenisation under window schemes that stand in for a
  linear ultrafilter (plain / arithmetic / Cesaro windows, with the
  liminf/limsup spread reported so non-convergence is data, not failure),
* subadditive limit estimation with an integrable correction term,
* anti-symmetrisation and the inf-convolution extension of ``n -> c*n``
  from a cyclic subgroup to the whole group,
* the end-to-end undistortion detector built from those pieces,
* witness lists for the rearrangement identity
  ``g^n h^n = (gh)^n c_1 ... c_{n-1}`` with verified shape certificates,
* Brooks counting functions and unit-step walks as stock examples.

Exact arithmetic (``int``/``Fraction``) is preserved wherever the inputs
allow it, so "equals exactly" tests really mean exact equality.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .groups import (
    FamilyMismatchError,
    FreeWord,
    GroupElement,
    LatticeVector,
    commutator,
    conjugate,
)
from .norms import GroupContext, free_cancellation_context, integer_line_context
from .sampling import DEFAULT_SEED

DEFAULT_TOLERANCE = 1e-6


class PqmError(Exception):
    """Base class for partial-quasimorphism toolkit errors."""


class FiniteOrderError(PqmError):
    """The element has finite order within the inspected window."""


class WindowCertificateError(PqmError):
    """A window growth certificate ||g^n|| >= c*n failed."""


class FeketeHypothesisError(PqmError):
    """The corrected subadditivity hypothesis failed on a sampled pair."""

    def __init__(self, m: int, n: int, lhs, rhs):
        super().__init__(
            f"a(m+n) <= a(m) + a(n) + phi(m+n) fails at (m, n) = ({m}, {n}): "
            f"{lhs} > {rhs}"
        )
        self.pair = (m, n)


class WalkSpecError(PqmError):
    """Malformed walk specification."""


# ---------------------------------------------------------------------------
# handles and measured constants


@dataclass
class MeasuredConstants:
    """Suprema over a recorded, seeded sample; reproducible by reseeding."""

    defect_D: float | Fraction | None = None
    lipschitz_C: float | Fraction | None = None
    generator_bound_sigma: float | Fraction | None = None
    seed: int = DEFAULT_SEED
    n_samples: int = 0
    worst_defect_pair: tuple[str, str] | None = None
    worst_lipschitz_pair: tuple[str, str] | None = None
    generator_argmax: str | None = None


@dataclass
class PqmHandle:
    """A deterministic function on a group context, plus measured data."""

    name: str
    fn: Callable[[GroupElement], float]
    ctx: GroupContext
    measured: MeasuredConstants | None = None

    def __call__(self, g: GroupElement):
        return self.fn(g)


def norm_handle(ctx: GroupContext, name: str = "norm") -> PqmHandle:
    return PqmHandle(name, lambda g: ctx.norm_exact(g), ctx)


def coordinate_handle(ctx: GroupContext, index: int = 0) -> PqmHandle:
    def fn(v: LatticeVector):
        return v.coords[index]

    return PqmHandle(f"coord:{index}", fn, ctx)


def scaled_coordinate_handle(ctx: GroupContext, factor: int) -> PqmHandle:
    return PqmHandle(f"scale:{factor}", lambda v: factor * v.coords[0], ctx)


# ---------------------------------------------------------------------------
# limit schemes (deterministic ultrafilter proxies)


@dataclass(frozen=True)
class LimitScheme:
    """Window scheme standing in for a linear ultrafilter.

    ``plain``  evaluates n = 1..N; ``arith``  n = k, 2k, ..., kN (the
    deterministic shadow of "the ultrafilter contains every kN"); ``cesaro``
    averages the running means over the tail.
    """

    kind: str
    window: int
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("plain", "arith", "cesaro"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.window < 8:
            raise ValueError("scheme window must be >= 8")
        if self.k < 1:
            raise ValueError("arithmetic scheme needs k >= 1")

    def indices(self) -> list[int]:
        if self.kind == "arith":
            return [self.k * j for j in range(1, self.window + 1)]
        return list(range(1, self.window + 1))

    def describe(self) -> str:
        if self.kind == "arith":
            return f"arith:{self.k}:{self.window}"
        return f"{self.kind}:{self.window}"

    @classmethod
    def parse(cls, text: str, window: int) -> "LimitScheme":
        if text == "plain":
            return cls("plain", window)
        if text == "cesaro":
            return cls("cesaro", window)
        if text.startswith("arith:"):
            return cls("arith", window, k=int(text.split(":", 1)[1]))
        raise ValueError(f"unknown scheme {text!r} (plain | arith:<k> | cesaro)")


@dataclass
class HomogenisationResult:
    """Tail statistics of f(g^n)/n along a scheme window."""

    estimate: float | Fraction
    liminf_est: float | Fraction
    limsup_est: float | Fraction
    converged: bool
    scheme: LimitScheme
    indices: tuple[int, ...] = ()
    values: tuple = ()

    def spread(self):
        return self.limsup_est - self.liminf_est


def _ratio(value, n: int):
    if isinstance(value, (int, Fraction)):
        return Fraction(value, n)
    return value / n


def tail_statistics(series: Sequence) -> tuple:
    """(mean, min, max) over the tail half-window.

    A constant tail keeps its exact value (int/Fraction); otherwise the
    mean is taken in float to avoid astronomically long exact rationals.
    """
    tail = series[len(series) // 2 :]
    lo = min(tail)
    hi = max(tail)
    if lo == hi:
        return lo, lo, hi
    estimate = sum(float(v) for v in tail) / len(tail)
    return estimate, lo, hi


def _power_walk(g: GroupElement, indices: Sequence[int]) -> list[GroupElement]:
    """Powers g^n for increasing n, computed incrementally."""
    out = []
    cur = g.identity()
    prev = 0
    steps: dict[int, GroupElement] = {}
    for n in indices:
        delta = n - prev
        step = steps.get(delta)
        if step is None:
            step = g ** delta
            steps[delta] = step
        cur = cur * step
        prev = n
        out.append(cur)
    return out


def homogenise(
    f: PqmHandle | Callable,
    g: GroupElement,
    scheme: LimitScheme,
    tol: float = DEFAULT_TOLERANCE,
) -> HomogenisationResult:
    """Estimate lim f(g^n)/n along the scheme.

    The estimate is the mean over the tail half-window, with the tail
    min/max reported as liminf/limsup estimates; ``converged`` holds when
    the tail spread is below the relative tolerance.
    """
    indices = scheme.indices()
    values = [_ratio(f(p), n) for n, p in zip(indices, _power_walk(g, indices))]
    series = values
    if scheme.kind == "cesaro":
        running = []
        acc = 0.0
        for i, v in enumerate(values, start=1):
            acc += float(v)
            running.append(acc / i)
        series = running
    estimate, liminf_est, limsup_est = tail_statistics(series)
    converged = float(limsup_est - liminf_est) <= tol * max(1.0, abs(float(estimate)))
    return HomogenisationResult(
        estimate, liminf_est, limsup_est, converged, scheme,
        tuple(indices), tuple(values),
    )


def homogenised_handle(f: PqmHandle, scheme: LimitScheme, tol: float = DEFAULT_TOLERANCE) -> PqmHandle:
    """The handle g -> homogenise(f, g, scheme).estimate (lazy, per call)."""

    def fn(g: GroupElement):
        return homogenise(f, g, scheme, tol=tol).estimate

    return PqmHandle(f"hom({f.name};{scheme.describe()})", fn, f.ctx)


def homogeneity_check(
    f_hom: PqmHandle,
    g: GroupElement,
    k_list: Sequence[int],
    scheme: LimitScheme | None = None,
):
    """max_k |f_hom(g^k) - k * f_hom(g)|; pass a scheme to homogenise a raw
    handle on the fly instead."""
    handle = homogenised_handle(f_hom, scheme) if scheme is not None else f_hom
    base = handle(g)
    residual = 0.0
    table = []
    for k in k_list:
        value = handle(g ** k)
        r = abs(float(value - k * base))
        table.append((k, value))
        residual = max(residual, r)
    return residual, table


# ---------------------------------------------------------------------------
# defect / Lipschitz / generator-bound estimation


@dataclass
class SupremumEstimate:
    quantity: str
    value: float | Fraction
    witness: tuple[str, ...] | None
    n_samples: int
    seed: int | None = None
    zero_min_violations: int = 0


def _resolve_pairs(pair_sampler, n_samples: int):
    if callable(pair_sampler):
        return pair_sampler(n_samples)
    return list(pair_sampler)


def defect_estimate(f: PqmHandle, pair_sampler, n_samples: int | None = None,
                    seed: int | None = None) -> SupremumEstimate:
    """D-hat = max |f(g) - f(gh) + f(h)| / min(||g||, ||h||) over the sample.

    Pairs where min(||g||, ||h||) = 0 contain the identity; there the
    coboundary is forced to equal f(1) and is checked to vanish separately.
    Requires exact norms on all sampled elements.
    """
    pairs = _resolve_pairs(pair_sampler, n_samples)
    ctx = f.ctx
    best = Fraction(0)
    witness = None
    zero_min_bad = 0
    count = 0
    for g, h in pairs:
        count += 1
        m = min(ctx.norm_exact(g), ctx.norm_exact(h))
        delta = abs(f(g) - f(g * h) + f(h))
        if m == 0:
            if delta != 0:
                zero_min_bad += 1
            continue
        ratio = _exact_div(delta, m)
        witness = _keep_supremum(ratio, (g.encode(), h.encode()), best, witness)
        best = max(best, ratio)
    return SupremumEstimate("defect", best, witness, count, seed, zero_min_bad)


def _keep_supremum(ratio, pair, best, witness):
    """Ties on the supremum break by canonical encoding order, so the
    reported attaining pair is independent of evaluation order."""
    if witness is None or ratio > best:
        return pair
    if ratio == best and pair < witness:
        return pair
    return witness


def _exact_div(a, b):
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a, b) if isinstance(a, int) and isinstance(b, int) else Fraction(a) / Fraction(b)
    return float(a) / float(b)


def lipschitz_estimate(f: PqmHandle, pair_sampler, n_samples: int | None = None,
                       seed: int | None = None) -> SupremumEstimate:
    """C-hat = max |f(g) - f(h)| / d(g, h) over sampled distinct pairs."""
    pairs = _resolve_pairs(pair_sampler, n_samples)
    ctx = f.ctx
    best = Fraction(0)
    witness = None
    count = 0
    for g, h in pairs:
        if g == h:
            continue
        count += 1
        d = ctx.dist(g, h)
        ratio = _exact_div(abs(f(g) - f(h)), d)
        witness = _keep_supremum(ratio, (g.encode(), h.encode()), best, witness)
        best = max(best, ratio)
    return SupremumEstimate("lipschitz", best, witness, count, seed)


def generator_bound(f: PqmHandle, generator_sample: Iterable[GroupElement],
                    seed: int | None = None) -> SupremumEstimate:
    """sigma-hat = max |f(s)| over the sampled generating set."""
    best = Fraction(0)
    witness = None
    count = 0
    for s in generator_sample:
        count += 1
        v = abs(f(s))
        witness = _keep_supremum(v, (s.encode(),), best, witness)
        best = max(best, v)
    return SupremumEstimate("generator-bound", best, witness, count, seed)


def measure_constants(f: PqmHandle, pairs, generators, seed: int = DEFAULT_SEED) -> MeasuredConstants:
    """Measure (D, C, sigma) on the given samples and attach them to f."""
    d = defect_estimate(f, pairs, seed=seed)
    c = lipschitz_estimate(f, pairs, seed=seed)
    s = generator_bound(f, generators, seed=seed)
    measured = MeasuredConstants(
        defect_D=d.value,
        lipschitz_C=c.value,
        generator_bound_sigma=s.value,
        seed=seed,
        n_samples=d.n_samples,
        worst_defect_pair=d.witness,
        worst_lipschitz_pair=c.witness,
        generator_argmax=s.witness[0] if s.witness else None,
    )
    f.measured = measured
    return measured


@dataclass
class ForwardCheckReport:
    n_samples: int
    violations: int
    worst_margin: float
    sigma: float
    defect: float


def forward_inequalities_check(f: PqmHandle, pairs) -> ForwardCheckReport:
    """Quantitative forward direction: with measured (sigma, D), every
    sampled pair must satisfy |f(h)| <= (sigma + D) ||h|| and
    |f(g) - f(gh)| <= (sigma + 2D) ||h||."""
    if f.measured is None or f.measured.defect_D is None:
        raise PqmError("forward check needs measured constants; run measure_constants")
    sigma = f.measured.generator_bound_sigma
    dd = f.measured.defect_D
    ctx = f.ctx
    violations = 0
    worst = 0.0
    count = 0
    for g, h in pairs:
        count += 1
        nh = ctx.norm_exact(h)
        lhs1 = abs(f(h))
        lhs2 = abs(f(g) - f(g * h))
        bound1 = (sigma + dd) * nh
        bound2 = (sigma + 2 * dd) * nh
        if lhs1 > bound1 or lhs2 > bound2:
            violations += 1
            worst = max(worst, float(lhs1 - bound1), float(lhs2 - bound2))
    return ForwardCheckReport(count, violations, worst, float(sigma), float(dd))


# ---------------------------------------------------------------------------
# Fekete / de Bruijn–Erdos limits


@dataclass
class IntegrabilityWitness:
    samples: tuple[tuple[float, float], ...]  # (T, integral up to T)
    apparently_convergent: bool


@dataclass
class SubadditiveCorrection:
    """An increasing correction phi with integrable phi(t)/t^2 tail."""

    phi: Callable[[float], float]
    name: str = "phi"

    @classmethod
    def zero(cls) -> "SubadditiveCorrection":
        return cls(lambda t: 0.0, "zero")

    @classmethod
    def constant(cls, d: float) -> "SubadditiveCorrection":
        return cls(lambda t: d, f"const:{d}")

    @classmethod
    def sqrt(cls, c: float) -> "SubadditiveCorrection":
        return cls(lambda t: c * t ** 0.5, f"sqrt:{c}")

    def integrability_witness(self, doublings: int = 20, steps: int = 64) -> IntegrabilityWitness:
        """Trapezoid estimates of the integral of phi(t)/t^2 on [1, 2^K] at
        doubling endpoints; apparent convergence needs decreasing increments
        with a last increment under 1% of the total."""
        samples = []
        total = 0.0
        increments = []
        lo = 1.0
        for _ in range(doublings):
            hi = lo * 2
            h = (hi - lo) / steps
            acc = 0.0
            for i in range(steps):
                t0 = lo + i * h
                t1 = t0 + h
                acc += 0.5 * h * (self.phi(t0) / t0 ** 2 + self.phi(t1) / t1 ** 2)
            total += acc
            increments.append(acc)
            samples.append((hi, total))
            lo = hi
        decreasing = all(b <= a + 1e-12 for a, b in zip(increments, increments[1:]))
        small_tail = increments[-1] <= 0.01 * max(total, 1e-12)
        return IntegrabilityWitness(tuple(samples), decreasing and small_tail)


def _triangular_sample(n_max: int, count: int, seed: int) -> list[tuple[int, int]]:
    pairs = []
    for m in range(1, min(n_max // 2, 12) + 1):
        for n in range(m, min(n_max - m, 12) + 1):
            pairs.append((m, n))
    p = 1
    while 2 * p <= n_max:
        q = 1
        while p + q <= n_max:
            pairs.append((p, q))
            q *= 2
        p *= 2
    rng = random.Random(seed)
    for _ in range(count):
        m = rng.randint(1, n_max - 1)
        n = rng.randint(1, n_max - m)
        pairs.append((m, n))
    return pairs


def fekete_limit(
    a: Callable[[int], float],
    phi: SubadditiveCorrection,
    n_max: int,
    hypothesis_checks: int = 400,
    seed: int = DEFAULT_SEED,
    tol: float = DEFAULT_TOLERANCE,
) -> HomogenisationResult:
    """Limit estimate of a(n)/n for an almost-subadditive sequence.

    The corrected subadditivity a(m+n) <= a(m) + a(n) + phi(m+n) is checked
    on a triangular sample first (a violation raises, reporting the pair);
    phi must be increasing on the sampled arguments.  The two-sided tail
    spread is reported just as in :func:`homogenise`.
    """
    sample = _triangular_sample(n_max, hypothesis_checks, seed)
    args = sorted({float(m + n) for m, n in sample})
    last = None
    for t in args:
        v = phi.phi(t)
        if last is not None and v < last - 1e-12:
            raise PqmError(f"phi is not increasing at t = {t}")
        last = v
    cache: dict[int, float] = {}

    def av(n: int):
        if n not in cache:
            cache[n] = a(n)
        return cache[n]

    for m, n in sample:
        lhs = av(m + n)
        rhs = av(m) + av(n) + phi.phi(float(m + n))
        if lhs > rhs + 1e-12:
            raise FeketeHypothesisError(m, n, lhs, rhs)
    scheme = LimitScheme("plain", n_max)
    values = [_ratio(av(n), n) for n in scheme.indices()]
    estimate, liminf_est, limsup_est = tail_statistics(values)
    converged = float(limsup_est - liminf_est) <= tol * max(1.0, abs(float(estimate)))
    return HomogenisationResult(estimate, liminf_est, limsup_est, converged, scheme,
                                tuple(scheme.indices()), tuple(values))


# ---------------------------------------------------------------------------
# anti-symmetrisation


def antisymmetrise(f: PqmHandle) -> PqmHandle:
    """f-bar(g) = (f(g) - f(g^-1)) / 2; exactly antisymmetric, idempotent."""

    def fn(g: GroupElement):
        a = f(g)
        b = f(g.inverse())
        if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
            return (Fraction(a) - Fraction(b)) / 2
        return (a - b) / 2.0

    return PqmHandle(f"antisym({f.name})", fn, f.ctx, measured=None)


# ---------------------------------------------------------------------------
# the inf-convolution extension


@dataclass
class ExtensionCertificate:
    """Exactness certificate for one window-truncated infimum.

    ``pos_closed``: every term beyond +W exceeds the window minimum because
    c*n alone does.  ``neg_closed``: terms beyond -W exceed it under the
    recorded tail growth floor (the measured min of ||g^m||/m over the
    outer half-window, assumed to persist beyond it; the window alone
    cannot bound the negative tail).  ``exact`` requires both.
    """

    exact: bool
    pos_closed: bool
    neg_closed: bool
    tail_floor: Fraction


class McShaneExtension:
    """f(h) = min over |n| <= W of (c*n + d(h, g^n)).

    Restricted to powers of g the value is exactly c*m; on certified pairs
    the extension is 1-Lipschitz.  Requires the window certificate
    ||g^n|| >= c*n for n = 1..W (checked exactly on construction).
    """

    def __init__(self, ctx: GroupContext, g: GroupElement, c, window: int):
        if window < 2:
            raise ValueError("window must be >= 2")
        self.ctx = ctx
        self.g = g
        self.c = Fraction(c)
        if self.c <= 0:
            raise ValueError("growth constant c must be positive")
        self.window = window
        self.powers: dict[int, GroupElement] = {0: ctx.identity()}
        self.norms: dict[int, Fraction] = {}
        fwd = ctx.identity()
        bwd = ctx.identity()
        ginv = g.inverse()
        for n in range(1, window + 1):
            fwd = fwd * g
            bwd = bwd * ginv
            if fwd.is_identity():
                raise FiniteOrderError(f"{g.encode()} has order {n} <= window")
            self.powers[n] = fwd
            self.powers[-n] = bwd
            norm = Fraction(ctx.norm_exact(fwd))
            self.norms[n] = norm
            if norm < self.c * n:
                raise WindowCertificateError(
                    f"||g^{n}|| = {norm} < c*n = {self.c * n}"
                )
        outer = range(window // 2 + 1, window + 1)
        self.tail_floor = min(Fraction(self.norms[m], m) for m in outer)

    def eval_with_certificate(self, h: GroupElement) -> tuple[Fraction, ExtensionCertificate]:
        ctx = self.ctx
        nh = Fraction(ctx.norm_exact(h))
        best = nh  # n = 0 term: d(h, 1) = ||h||
        for n in range(1, self.window + 1):
            for signed in (n, -n):
                term = self.c * signed + Fraction(ctx.dist(h, self.powers[signed]))
                if term < best:
                    best = term
        w1 = self.window + 1
        pos_closed = self.c * w1 > best
        neg_closed = (self.tail_floor - self.c) * w1 - nh > best
        return best, ExtensionCertificate(pos_closed and neg_closed, pos_closed,
                                          neg_closed, self.tail_floor)

    def __call__(self, h: GroupElement) -> Fraction:
        return self.eval_with_certificate(h)[0]

    @property
    def handle(self) -> PqmHandle:
        return PqmHandle(f"mcshane({self.g.encode()};c={self.c})", self.__call__, self.ctx)


def mcshane_extend(ctx: GroupContext, g: GroupElement, c, window: int) -> McShaneExtension:
    return McShaneExtension(ctx, g, c, window)


# ---------------------------------------------------------------------------
# undistortion detection


@dataclass
class UndistortionWitness:
    verdict: str  # "undistorted" | "distorted-or-undecided"
    c_est: Fraction
    value_at_g: Fraction | float | None
    pqm: PqmHandle | None
    trace: tuple[tuple[int, float, Fraction], ...]  # (n, ||g^n||, ratio)
    threshold: float
    scheme: LimitScheme | None
    extension: McShaneExtension | None = None


def detect_undistorted(
    ctx: GroupContext,
    g: GroupElement,
    scheme: LimitScheme,
    window: int,
    rel_threshold: float = 0.25,
    abs_threshold: float = 1e-9,
) -> UndistortionWitness:
    """Certify positive norm growth on a window, or report the decay trace.

    c_est is the window minimum of ||g^n||/n (so the extension precondition
    holds on the whole window by construction).  Above the threshold the
    detector builds the extension of n -> c_est * n, anti-symmetrises and
    homogenises it along the arithmetic scheme, and returns the resulting
    handle with its value at g.  Below the threshold the verdict is
    "distorted-or-undecided": a bounded window can never certify sublinear
    growth, so "distorted" is never claimed.
    """
    if window < 2:
        raise ValueError("window must be >= 2")
    trace = []
    c_est = None
    cur = ctx.identity()
    finite_order = False
    for n in range(1, window + 1):
        cur = cur * g
        if cur.is_identity():
            finite_order = True
            trace.append((n, 0, Fraction(0)))
            c_est = Fraction(0)
            break
        norm = ctx.norm_exact(cur)
        ratio = Fraction(norm, n) if isinstance(norm, int) else Fraction(norm) / n
        trace.append((n, norm, ratio))
        c_est = ratio if c_est is None else min(c_est, ratio)
    norm_g = trace[0][1]
    threshold = max(abs_threshold, rel_threshold * float(norm_g))
    if finite_order or float(c_est) <= threshold:
        return UndistortionWitness(
            "distorted-or-undecided", c_est, None, None, tuple(trace), threshold, scheme,
        )
    if scheme.kind != "arith":
        raise ValueError("detect_undistorted homogenises along an arithmetic scheme")
    if scheme.k * scheme.window > window:
        raise ValueError(
            f"scheme reaches power {scheme.k * scheme.window} beyond the certified window {window}"
        )
    ext = mcshane_extend(ctx, g, c_est, window)
    anti = antisymmetrise(ext.handle)
    hom = homogenise(anti, g, scheme)
    handle = homogenised_handle(anti, scheme)
    return UndistortionWitness(
        "undistorted", c_est, hom.estimate, handle, tuple(trace), threshold, scheme, ext,
    )


# ---------------------------------------------------------------------------
# the rearrangement identity g^n h^n = (gh)^n c_1 ... c_{n-1}


@dataclass(frozen=True)
class ShapeCertificate:
    """Exhibits a witness as y^-1 [base, x] y."""

    base_label: str  # "g" or "h"
    x: GroupElement
    conjugator: GroupElement

    def reconstruct(self, g: GroupElement, h: GroupElement) -> GroupElement:
        base = g if self.base_label == "g" else h
        return conjugate(commutator(base, self.x), self.conjugator)


@dataclass
class CommutatorWitnessList:
    """Verified witnesses c_1..c_{n-1} with g^n h^n = (gh)^n c_1...c_{n-1}.

    All witnesses are conjugates of [g, x_i] (base "g") or all of [h, x_i]
    (base "h"); both the product identity and every shape certificate are
    re-verified by exact arithmetic on construction.
    """

    g: GroupElement
    h: GroupElement
    n: int
    base: str
    witnesses: tuple[GroupElement, ...]
    certificates: tuple[ShapeCertificate, ...]

    def product(self) -> GroupElement:
        out = self.g.identity()
        for c in self.witnesses:
            out = out * c
        return out

    def norm_bound_check(self, norm_fn: Callable[[GroupElement], float]):
        """(lhs, rhs) for ||c_1...c_{n-1}|| <= 2(n-1) min(||g||, ||h||)."""
        lhs = norm_fn(self.product())
        rhs = 2 * (self.n - 1) * min(norm_fn(self.g), norm_fn(self.h))
        return lhs, rhs


def _h_shape_witnesses(g: GroupElement, h: GroupElement, n: int):
    """Witnesses as conjugates of [h, x]: peel one (g, h) layer per level.

    g^n h^n = g (g^{n-1} h^{n-1}) h, and g u h = (gh)^n [u, h] for
    u = (gh)^{n-1}; [u, h] = u^-1 [h, u^-1] u gives the certified shape.
    """
    if n == 1:
        return []
    u = (g * h) ** (n - 1)
    x = u.inverse()
    first = (conjugate(commutator(h, x), u), ShapeCertificate("h", x, u))
    rest = [
        (conjugate(c, h), ShapeCertificate("h", cert.x, cert.conjugator * h))
        for c, cert in _h_shape_witnesses(g, h, n - 1)
    ]
    return [first] + rest


def _g_shape_witnesses(g: GroupElement, h: GroupElement, n: int):
    """Witnesses as conjugates of [g, x], by inverting the identity for
    the pair (h^-1, g^-1) and conjugating back through (gh)^n."""
    primal = _h_shape_witnesses(h.inverse(), g.inverse(), n)
    q = (g * h) ** n
    out = []
    for c_prim, cert in reversed(primal):
        x = cert.x
        y = x.inverse() * g.inverse() * x * cert.conjugator * q
        witness = conjugate(commutator(g, x), y)
        out.append((witness, ShapeCertificate("g", x, y)))
    return out


def c_trick_witness(g: GroupElement, h: GroupElement, n: int, base: str = "h") -> CommutatorWitnessList:
    """Construct and exactly verify the witnesses of the rearrangement
    identity; ``base`` chooses which element all commutator shapes use."""
    if type(g) is not type(h):
        raise FamilyMismatchError("c-trick needs both elements in one family")
    if n < 1:
        raise ValueError("n must be >= 1")
    if base == "auto":
        base = "h"
    if base not in ("g", "h"):
        raise ValueError("base must be 'g', 'h' or 'auto'")
    items = _g_shape_witnesses(g, h, n) if base == "g" else _h_shape_witnesses(g, h, n)
    witnesses = tuple(c for c, _ in items)
    certificates = tuple(cert for _, cert in items)
    result = CommutatorWitnessList(g, h, n, base, witnesses, certificates)
    lhs = (g ** n) * (h ** n)
    rhs = ((g * h) ** n) * result.product()
    if lhs != rhs:
        raise PqmError(f"product identity failed for n={n}: {lhs!r} != {rhs!r}")
    for c, cert in items:
        if cert.reconstruct(g, h) != c:
            raise PqmError(f"shape certificate failed for witness {c!r}")
    return result


# ---------------------------------------------------------------------------
# Brooks counting functions


def _count_subwords(codes: tuple[int, ...], pattern: tuple[int, ...]) -> int:
    p = len(pattern)
    if p == 0 or p > len(codes):
        return 0
    return sum(1 for i in range(len(codes) - p + 1) if codes[i : i + p] == pattern)


def brooks_qm(pattern: FreeWord, ctx: GroupContext | None = None) -> PqmHandle:
    """Counting function: occurrences of the pattern in the reduced word
    minus occurrences of its inverse (overlaps counted)."""
    if not isinstance(pattern, FreeWord):
        raise FamilyMismatchError("Brooks patterns are free words")
    if len(pattern) == 0:
        raise ValueError("pattern must be nonempty")
    if ctx is None:
        ctx = free_cancellation_context(pattern.rank)
    pat = pattern.codes()
    pat_inv = pattern.inverse().codes()

    def fn(w: GroupElement) -> int:
        if not isinstance(w, FreeWord):
            raise FamilyMismatchError("Brooks functions take free words")
        codes = w.codes()
        return _count_subwords(codes, pat) - _count_subwords(codes, pat_inv)

    return PqmHandle(f"brooks:{pattern.encode()}", fn, ctx)


# ---------------------------------------------------------------------------
# unit-step walks


class Walk:
    """A unit-step walk w: Z -> Z with w(0) = 0, |w(n+1) - w(n)| = 1.

    Extended to negative arguments oddly: w(-m) = -w(m).
    """

    def __init__(self, kind: str):
        self.kind = kind

    def __call__(self, n: int) -> int:
        if n < 0:
            return -self(-n)
        if self.kind == "all-up":
            return n
        if self.kind == "alternating":
            return n % 2
        if self.kind == "doubling-blocks":
            if n == 0:
                return 0
            # block j covers steps [2^j - 1, 2^{j+1} - 1), sign (-1)^j;
            # boundary value w(2^j - 1) = (1 - (-2)^j) / 3
            j = (n + 1).bit_length() - 1
            boundary = (1 - (-2) ** j) // 3
            sign = 1 if j % 2 == 0 else -1
            return boundary + sign * (n - (2 ** j - 1))
        raise WalkSpecError(f"unknown walk kind {self.kind!r}")


def walk_build(spec: str) -> Walk:
    """Built-in walks: ``alternating``, ``all-up``, ``doubling-blocks``."""
    if spec not in ("alternating", "all-up", "doubling-blocks"):
        raise WalkSpecError(
            f"malformed walk spec {spec!r}; expected alternating | all-up | doubling-blocks"
        )
    return Walk(spec)


def walk_handle(walk: Walk, ctx: GroupContext | None = None) -> PqmHandle:
    """The walk as a function on the integer line context."""
    if ctx is None:
        ctx = integer_line_context()

    def fn(v: LatticeVector) -> int:
        return walk(v.coords[0])

    return PqmHandle(f"walk:{walk.kind}", fn, ctx)
