"""Conjugation-invariant norm evaluators.

A :class:`GroupContext` bundles a group family with a generating-set
descriptor and a norm backend, and owns both the norm and the induced
right-invariant metric ``d(g, h) = ||g h^-1||``.  Backends:

* ``bfs``              exact Cayley-graph search (enumerable generating sets)
* ``transposition-closed-form``  |support| - #cycles on permutations
* ``cancellation-dp``  minimal-deletion interval DP on free words (the
                       effective model of the maximal bi-invariant word norm)
* ``l1``               L^1 norm on lattice vectors
* ``bounded-search``   certified construction/obstruction bounds (Heisenberg)
* ``cl-bounds``        commutator-length interval bounds on free words

Evaluators that cannot certify an exact value return a
:class:`NormInterval` with ``exact=False``; nothing is ever silently
approximated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import kernels
from .groups import (
    FamilyMismatchError,
    FreeWord,
    GroupElement,
    Heisenberg,
    HEISENBERG_A,
    HEISENBERG_B,
    LatticeVector,
    Permutation,
    commutator,
    conjugate,
    cycle_decomposition,
)
from .sampling import all_permutations, all_reduced_words


class NormError(Exception):
    """Raised when a context cannot evaluate the requested norm."""


class InexactNormError(NormError):
    """Raised when an exact norm value is required but only bounds exist."""


@dataclass(frozen=True)
class NormInterval:
    """Certified bounds [lower, upper] for a norm value."""

    lower: float
    upper: float
    exact: bool

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")
        if self.exact and self.lower != self.upper:
            raise ValueError("exact interval must have lower == upper")

    @classmethod
    def exact_value(cls, value) -> "NormInterval":
        return cls(value, value, True)

    @classmethod
    def bounds(cls, lower, upper) -> "NormInterval":
        return cls(lower, upper, lower == upper and upper != math.inf)

    def require_exact(self):
        if not self.exact:
            raise InexactNormError(
                f"exact norm required, have bounds [{self.lower}, {self.upper}]"
            )
        return self.lower


# ---------------------------------------------------------------------------
# generating sets


@dataclass(frozen=True)
class GeneratingSet:
    """Descriptor of a symmetric generating set.

    kinds: ``explicit`` (a finite inverse-closed list), ``normal-closure``
    (all conjugates of the listed elements and of their inverses),
    ``all-commutators`` (free-group commutator subgroup),
    ``unit-ball`` (radius-1 ball of the (R^d, L^1) length model).
    """

    kind: str
    elements: tuple[GroupElement, ...] = ()

    def __post_init__(self):
        if self.kind not in ("explicit", "normal-closure", "all-commutators", "unit-ball"):
            raise ValueError(f"unknown generating-set kind {self.kind!r}")
        if any(e.is_identity() for e in self.elements):
            raise ValueError("generating sets must not contain the identity")
        if self.kind == "explicit":
            elems = set(self.elements)
            if {e.inverse() for e in elems} != elems:
                raise ValueError("explicit generating set must be inverse-closed")

    @classmethod
    def explicit(cls, elements: Iterable[GroupElement]) -> "GeneratingSet":
        return cls("explicit", tuple(elements))

    @classmethod
    def explicit_symmetrized(cls, elements: Iterable[GroupElement]) -> "GeneratingSet":
        """Close the list under inverses, deduplicated deterministically."""
        seen: dict[str, GroupElement] = {}
        for e in elements:
            for x in (e, e.inverse()):
                seen.setdefault(x.encode(), x)
        return cls("explicit", tuple(seen[k] for k in sorted(seen)))

    @classmethod
    def normal_closure(cls, elements: Iterable[GroupElement]) -> "GeneratingSet":
        return cls("normal-closure", tuple(elements))

    @classmethod
    def all_commutators(cls) -> "GeneratingSet":
        return cls("all-commutators")

    @classmethod
    def unit_ball(cls) -> "GeneratingSet":
        return cls("unit-ball")

    def describe(self) -> str:
        if self.elements:
            return self.kind + ":" + ",".join(e.encode() for e in self.elements)
        return self.kind


def standard_lattice_generators(dim: int) -> GeneratingSet:
    gens = []
    for i in range(dim):
        coords = [0] * dim
        coords[i] = 1
        gens.append(LatticeVector(tuple(coords)))
    return GeneratingSet.explicit_symmetrized(gens)


# ---------------------------------------------------------------------------
# individual evaluators


def l1_norm(v) -> float:
    """Sum of absolute coordinate values; accepts lattice or real vectors."""
    if isinstance(v, LatticeVector):
        return sum(abs(c) for c in v.coords)
    return float(sum(abs(float(c)) for c in v))


def transposition_norm(p: Permutation) -> int:
    """Word norm of a permutation w.r.t. the class of all transpositions.

    Equals |support| - (number of cycles); cross-validated against BFS on
    S_4 and S_5 in the acceptance suite.
    """
    cycles = cycle_decomposition(p)
    return len(p.support) - len(cycles)


def cancellation_norm(w: FreeWord) -> int:
    """Minimal number of letters to delete so the rest reduces to 1.

    This is the package's definition-level evaluator of the maximal
    bi-invariant word norm on a free group (generators: all conjugates of
    the free generators and their inverses).  O(L^3) interval DP.
    """
    if not isinstance(w, FreeWord):
        raise FamilyMismatchError("cancellation norm is defined on free words")
    return kernels.cancellation_dp(w.codes())


def heisenberg_conjugacy_norm(g: Heisenberg) -> tuple[NormInterval, tuple[Heisenberg, ...]]:
    """Norm of g w.r.t. the normal closure of {a, b} in the Heisenberg group.

    Conjugation acts on generators through the abelianised conjugator only:
    x^-1 a^s x = (s, 0, s*q) and x^-1 b^s x = (0, s, -s*p) for x = (p,q,r).
    Upper bound: an explicit product of |x|+|y| conjugates (2 for a
    nontrivial central element), verified by exact multiplication.  Lower
    bound: abelianisation forces k >= |x|+|y|, and a nontrivial central
    element needs k >= 2 since every generator has nonzero abelianisation.
    The bounds meet, so the result is always exact.
    """
    x, y, z = g.x, g.y, g.z
    if x == 0 and y == 0:
        if z == 0:
            return NormInterval.exact_value(0), ()
        # conjugate of b with parameter p = -z, times b^-1
        factors = (Heisenberg(0, 1, z), Heisenberg(0, -1, 0))
    else:
        sa = 1 if x > 0 else -1
        sb = 1 if y > 0 else -1
        factors_list: list[Heisenberg] = []
        if x != 0:
            # fold the whole z-adjustment into the first a-factor
            factors_list.append(Heisenberg(sa, 0, z - x * y))
            factors_list.extend(Heisenberg(sa, 0, 0) for _ in range(abs(x) - 1))
            factors_list.extend(Heisenberg(0, sb, 0) for _ in range(abs(y)))
        else:
            factors_list.append(Heisenberg(0, sb, z))
            factors_list.extend(Heisenberg(0, sb, 0) for _ in range(abs(y) - 1))
        factors = tuple(factors_list)
    product = g.identity()
    for f in factors:
        if not _is_heisenberg_conjugate_generator(f):
            raise NormError(f"internal witness {f!r} is not a conjugated generator")
        product = product * f
    if product != g:
        raise NormError(f"witness product {product!r} does not equal target {g!r}")
    return NormInterval.exact_value(len(factors)), factors


def _is_heisenberg_conjugate_generator(f: Heisenberg) -> bool:
    return (abs(f.x), abs(f.y)) in ((1, 0), (0, 1))


# ---------------------------------------------------------------------------
# BFS on Cayley graphs


class BfsBall:
    """Distance table of a Cayley-graph ball, built level by level.

    The frontier is expanded in canonical-encoding order so the table is
    deterministic; construction is single-writer and reads afterwards are
    safe to share.
    """

    def __init__(self, generators: Sequence[GroupElement], identity: GroupElement,
                 memory_cap: int = 500_000):
        self.generators = sorted(generators, key=lambda e: e.encode())
        self.identity = identity
        self.memory_cap = memory_cap
        self.distances: dict[GroupElement, int] = {identity: 0}
        self.radius = 0
        self.truncated = False
        self._frontier = [identity]

    def grow_to(self, radius: int) -> None:
        while self.radius < radius and self._frontier and not self.truncated:
            nxt = []
            for elem in self._frontier:
                for s in self.generators:
                    candidate = elem * s
                    if candidate not in self.distances:
                        if len(self.distances) >= self.memory_cap:
                            self.truncated = True
                            self._frontier = []
                            return
                        self.distances[candidate] = self.radius + 1
                        nxt.append(candidate)
            self._frontier = sorted(nxt, key=lambda e: e.encode())
            self.radius += 1


def enumerate_effective_generators(ctx: "GroupContext") -> list[GroupElement]:
    """The finite effective generating set for BFS, or raise NormError."""
    gens = ctx.generators
    if gens.kind == "explicit":
        return list(gens.elements)
    if gens.kind == "normal-closure":
        if ctx.family == "perm":
            # conjugates within S_degree: finite, enumerable
            out: dict[str, GroupElement] = {}
            for y in all_permutations(ctx.degree):
                for s in gens.elements:
                    for t in (s, s.inverse()):
                        c = conjugate(t, y)
                        out.setdefault(c.encode(), c)
            return [out[k] for k in sorted(out)]
        if ctx.family == "lattice":
            # conjugation is trivial in an abelian group
            out = {}
            for s in gens.elements:
                for t in (s, s.inverse()):
                    out.setdefault(t.encode(), t)
            return [out[k] for k in sorted(out)]
        raise NormError(
            f"normal closure is not enumerable for family {ctx.family!r}; "
            "use the dedicated backend"
        )
    raise NormError(f"generating set {gens.kind!r} is not enumerable")


def bfs_word_norm(ctx: "GroupContext", g: GroupElement, max_radius: int) -> NormInterval:
    """Exact word norm via breadth-first search, if found within max_radius.

    Returns ``(max_radius+1, inf, exact=False)`` when the ball does not
    reach g (or the memory cap was hit first).
    """
    ball = ctx.bfs_ball(max_radius)
    dist = ball.distances.get(g)
    if dist is not None:
        return NormInterval.exact_value(dist)
    if ball.truncated:
        return NormInterval(0, math.inf, False)
    return NormInterval(max_radius + 1, math.inf, False)


# ---------------------------------------------------------------------------
# bounded searches


def _free_conjugating_set(rank: int, conj_len_max: int) -> list[FreeWord]:
    return all_reduced_words(rank, conj_len_max)


def enumerate_conjugates(ctx: "GroupContext", conj_len_max: int) -> list[GroupElement]:
    """Conjugated generators x^-1 s^±1 x with the conjugator x ranging over
    a ball of radius conj_len_max in the ambient standard word metric."""
    gens = ctx.generators
    if gens.kind != "normal-closure":
        raise NormError("conjugate enumeration requires a normal-closure descriptor")
    out: dict[str, GroupElement] = {}
    if ctx.family == "free":
        for xw in _free_conjugating_set(ctx.rank, conj_len_max):
            for s in gens.elements:
                for t in (s, s.inverse()):
                    c = conjugate(t, xw)
                    if not c.is_identity():
                        out.setdefault(c.encode(), c)
    elif ctx.family == "heisenberg":
        # conjugation by (p,q,r) depends only on (p,q), so the words
        # a^p b^q with |p|+|q| <= conj_len_max cover the whole ball
        for p in range(-conj_len_max, conj_len_max + 1):
            for q in range(-conj_len_max + abs(p), conj_len_max - abs(p) + 1):
                xw = (HEISENBERG_A ** p) * (HEISENBERG_B ** q)
                for s in gens.elements:
                    for t in (s, s.inverse()):
                        c = conjugate(t, xw)
                        if not c.is_identity():
                            out.setdefault(c.encode(), c)
    elif ctx.family == "perm":
        return enumerate_effective_generators(ctx)
    elif ctx.family == "lattice":
        return enumerate_effective_generators(ctx)
    else:
        raise NormError(f"no conjugate enumeration for family {ctx.family!r}")
    return [out[k] for k in sorted(out)]


def _abelianisation_lower_bound(ctx: "GroupContext", g: GroupElement) -> int:
    """Certified lower bound for the conjugacy word norm of g."""
    if g.is_identity():
        return 0
    if ctx.family == "free":
        # each factor moves one exponent sum by the generator's exponent
        sums = g.exponent_sums()
        gen_images = [s.exponent_sums() for s in ctx.generators.elements]
        if all(sum(abs(c) for c in img) == 1 for img in gen_images):
            bound = sum(abs(c) for c in sums)
            return max(bound, 1)
        norms = [sum(abs(c) for c in img) for img in gen_images if any(img)]
        if norms:
            total = sum(abs(c) for c in sums)
            return max(1, -(-total // max(norms)))
        return 1
    if ctx.family == "heisenberg":
        if g.x == 0 and g.y == 0:
            return 2  # nontrivial central element: no single generator is central
        return abs(g.x) + abs(g.y)
    if ctx.family == "perm":
        # parity of the permutation constrains parity of the factor count
        odd = transposition_norm(g) % 2
        return max(1, odd)
    return 1


def conjugate_product_search(
    ctx: "GroupContext",
    g: GroupElement,
    k_max: int,
    conj_len_max: int,
) -> NormInterval:
    """Bounded search for g as a product of conjugated generators.

    Upper bound: least k <= k_max with g in T^k, where T enumerates the
    conjugates x^-1 s^±1 x with ||x|| <= conj_len_max.  Lower bound from
    abelianisation/parity obstructions; on free contexts with the standard
    normal closure, the cancellation DP supplies the definition-level lower
    bound.  Search-space exhaustion is reported as a non-exact interval,
    not a failure.
    """
    if ctx.generators.kind != "normal-closure":
        raise NormError("conjugate_product_search requires a normal-closure context")
    lower = _abelianisation_lower_bound(ctx, g)
    if ctx.family == "free" and _is_standard_free_closure(ctx):
        lower = max(lower, cancellation_norm(g))
    if g.is_identity():
        return NormInterval.exact_value(0)
    conjugates = enumerate_conjugates(ctx, conj_len_max)
    conjugate_set = set(conjugates)
    frontier: dict[GroupElement, None] = {ctx.identity(): None}
    for k in range(1, k_max + 1):
        # membership at level k via one lookup per frontier element:
        # g in frontier * T  <=>  e^-1 g in T for some e
        for elem in frontier:
            if elem.inverse() * g in conjugate_set:
                if lower > k:
                    raise NormError(
                        f"lower bound {lower} exceeds found product length {k}"
                    )
                return NormInterval(lower, k, lower == k)
        if k == k_max:
            break
        nxt: dict[GroupElement, None] = {}
        for elem in frontier:
            for t in conjugates:
                cand = elem * t
                if cand not in nxt:
                    nxt[cand] = None
            if len(nxt) > ctx.memory_cap:
                return NormInterval(lower, math.inf, False)
        frontier = nxt
    return NormInterval(lower, math.inf, False)


def _is_standard_free_closure(ctx: "GroupContext") -> bool:
    if ctx.family != "free" or ctx.generators.kind != "normal-closure":
        return False
    want = {FreeWord.generator(ctx.rank, i).encode() for i in range(1, ctx.rank + 1)}
    have = set()
    for s in ctx.generators.elements:
        for t in (s, s.inverse()):
            have.add(t.encode())
    want_sym = want | {FreeWord.generator(ctx.rank, i, -1).encode() for i in range(1, ctx.rank + 1)}
    return have == want_sym or have == want


def in_commutator_subgroup(w: FreeWord) -> bool:
    return all(s == 0 for s in w.exponent_sums())


def commutator_length_bounds(w: FreeWord, k_max: int, conj_len_max: int) -> NormInterval:
    """Interval bounds for the commutator length of w in [F, F].

    Upper bound by bounded search over products of <= k_max commutators
    [u, v] with |u|, |v| <= conj_len_max; lower bound 1 for nontrivial w.
    Exact only when the bounds meet.
    """
    if not isinstance(w, FreeWord):
        raise FamilyMismatchError("commutator length is defined on free words")
    if not in_commutator_subgroup(w):
        raise NormError(f"{w.encode()!r} is not in the commutator subgroup")
    if w.is_identity():
        return NormInterval.exact_value(0)
    words = all_reduced_words(w.rank, conj_len_max)
    comms: dict[str, FreeWord] = {}
    for u in words:
        for v in words:
            c = commutator(u, v)
            if not c.is_identity():
                comms.setdefault(c.encode(), c)
    commutator_set = {k: v for k, v in sorted(comms.items())}
    if w.encode() in commutator_set:
        return NormInterval.exact_value(1)
    if k_max >= 2:
        # meet in the middle: w = c1 * c2  <=>  c1^-1 w in the set
        for c1 in commutator_set.values():
            if (c1.inverse() * w).encode() in commutator_set:
                return NormInterval(1, 2, False)
    if k_max >= 3:
        frontier = {c.encode(): c for c in commutator_set.values()}
        for k in range(3, k_max + 1):
            nxt: dict[str, FreeWord] = {}
            for e in frontier.values():
                for c in commutator_set.values():
                    prod = e * c
                    key = prod.encode()
                    if key not in nxt:
                        nxt[key] = prod
                if len(nxt) > 2_000_000:
                    return NormInterval(1, math.inf, False)
            for e in nxt.values():
                if (e.inverse() * w).encode() in commutator_set:
                    return NormInterval(1, k, False)
            frontier = nxt
    return NormInterval(1, math.inf, False)


# ---------------------------------------------------------------------------
# the context


BACKENDS = (
    "bfs",
    "transposition-closed-form",
    "cancellation-dp",
    "l1",
    "bounded-search",
    "cl-bounds",
)


@dataclass
class GroupContext:
    """A group family with a generating set and a norm backend.

    Owns the norm ``||.||`` and the induced metric ``d(g,h) = ||g h^-1||``.
    Evaluators are pure; the BFS cache is grown on demand and read-only
    between growth steps.
    """

    family: str
    generators: GeneratingSet
    backend: str
    rank: int = 2          # free groups
    degree: int = 5        # permutations (ambient S_degree for closures)
    dim: int = 2           # lattices
    bfs_max_radius: int = 12
    memory_cap: int = 500_000
    search_k_max: int = 6
    search_conj_len: int = 34
    _ball: BfsBall | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "transposition-closed-form" and self.family != "perm":
            raise ValueError("transposition backend needs the perm family")
        if self.backend == "cancellation-dp":
            if self.family != "free":
                raise ValueError("the cancellation DP is restricted to free-group contexts")
            if not _is_standard_free_closure(self):
                raise ValueError(
                    "the cancellation DP evaluates the normal closure of the free "
                    "generators; use bounded-search for other closures"
                )
        if self.backend == "l1" and self.family != "lattice":
            raise ValueError("l1 backend needs the lattice family")
        if self.backend == "cl-bounds" and self.generators.kind != "all-commutators":
            raise ValueError("cl-bounds backend needs the all-commutators descriptor")

    # -- identities and parsing ------------------------------------------

    def identity(self) -> GroupElement:
        if self.family == "free":
            return FreeWord(self.rank, ())
        if self.family == "perm":
            return Permutation()
        if self.family == "lattice":
            return LatticeVector((0,) * self.dim)
        if self.family == "heisenberg":
            return Heisenberg(0, 0, 0)
        raise ValueError(f"unknown family {self.family!r}")

    def decode(self, text: str) -> GroupElement:
        from .groups import decode

        return decode(self.family, text, rank=self.rank)

    def describe(self) -> str:
        size = {"free": f"rank={self.rank}", "perm": f"degree={self.degree}",
                "lattice": f"dim={self.dim}", "heisenberg": "dim=3"}[self.family]
        return (f"family={self.family};{size};gens={self.generators.describe()};"
                f"backend={self.backend}")

    # -- the norm ----------------------------------------------------------

    def bfs_ball(self, radius: int) -> BfsBall:
        if self._ball is None:
            self._ball = BfsBall(
                enumerate_effective_generators(self),
                self.identity(),
                memory_cap=self.memory_cap,
            )
        self._ball.grow_to(radius)
        return self._ball

    def norm(self, g: GroupElement) -> NormInterval:
        if self.backend == "l1":
            return NormInterval.exact_value(l1_norm(g))
        if self.backend == "transposition-closed-form":
            return NormInterval.exact_value(transposition_norm(g))
        if self.backend == "cancellation-dp":
            if g.rank != self.rank:
                raise FamilyMismatchError("rank mismatch with context")
            return NormInterval.exact_value(cancellation_norm(g))
        if self.backend == "bfs":
            return bfs_word_norm(self, g, self.bfs_max_radius)
        if self.backend == "bounded-search":
            if self.family == "heisenberg" and self._is_standard_heisenberg_closure():
                interval, _ = heisenberg_conjugacy_norm(g)
                return interval
            return conjugate_product_search(self, g, self.search_k_max, self.search_conj_len)
        if self.backend == "cl-bounds":
            return commutator_length_bounds(g, self.search_k_max, min(self.search_conj_len, 2))
        raise NormError(f"backend {self.backend!r} cannot evaluate norms")

    def _is_standard_heisenberg_closure(self) -> bool:
        if self.generators.kind != "normal-closure":
            return False
        encs = set()
        for s in self.generators.elements:
            for t in (s, s.inverse()):
                encs.add(t.encode())
        return encs == {"H(1,0,0)", "H(-1,0,0)", "H(0,1,0)", "H(0,-1,0)"}

    def norm_exact(self, g: GroupElement):
        return self.norm(g).require_exact()

    def dist(self, g: GroupElement, h: GroupElement):
        return self.norm_exact(g * h.inverse())

    def generator_sample(self, seed: int, count: int) -> list[GroupElement]:
        """Sampleable generators: the explicit list, or class representatives
        with seeded conjugators for normal closures."""
        import random

        gens = self.generators
        if gens.kind == "explicit":
            return list(gens.elements)
        if gens.kind == "normal-closure":
            rng = random.Random(seed)
            from .sampling import element_sampler

            draw = element_sampler(
                self.family, rank=self.rank, degree=self.degree, dim=self.dim,
                max_len=4, box=6,
            )
            out = []
            base = []
            for s in gens.elements:
                base.extend((s, s.inverse()))
            for _ in range(count):
                out.append(conjugate(base[rng.randrange(len(base))], draw(rng)))
            return out
        if gens.kind == "all-commutators":
            rng = random.Random(seed)
            words = all_reduced_words(self.rank, 2)
            out = []
            while len(out) < count:
                u = words[rng.randrange(len(words))]
                v = words[rng.randrange(len(words))]
                c = commutator(u, v)
                if not c.is_identity():
                    out.append(c)
            return out
        raise NormError(f"generating set {gens.kind!r} is not sampleable")


# -- ready-made contexts -----------------------------------------------------


def integer_line_context(**kw) -> GroupContext:
    return GroupContext("lattice", standard_lattice_generators(1), "l1", dim=1, **kw)


def lattice_context(dim: int, **kw) -> GroupContext:
    return GroupContext("lattice", standard_lattice_generators(dim), "l1", dim=dim, **kw)


def free_cancellation_context(rank: int = 2, **kw) -> GroupContext:
    gens = GeneratingSet.normal_closure(
        tuple(FreeWord.generator(rank, i) for i in range(1, rank + 1))
    )
    return GroupContext("free", gens, "cancellation-dp", rank=rank, **kw)


def symmetric_transposition_context(degree: int = 5, **kw) -> GroupContext:
    gens = GeneratingSet.normal_closure((Permutation.transposition(1, 2),))
    return GroupContext("perm", gens, "transposition-closed-form", degree=degree, **kw)


def heisenberg_context(**kw) -> GroupContext:
    gens = GeneratingSet.normal_closure((HEISENBERG_A, HEISENBERG_B))
    return GroupContext("heisenberg", gens, "bounded-search", **kw)


def commutator_length_context(rank: int = 2, **kw) -> GroupContext:
    return GroupContext("free", GeneratingSet.all_commutators(), "cl-bounds", rank=rank, **kw)


# ---------------------------------------------------------------------------
# sampled invariance checks


@dataclass
class InvarianceReport:
    n_samples: int
    max_discrepancy: float
    worst_pair: tuple[str, str] | None
    non_exact: int

    @property
    def invariant(self) -> bool:
        return self.max_discrepancy == 0 and self.non_exact == 0


def check_conjugation_invariance(
    ctx: GroupContext,
    pairs: Iterable[tuple[GroupElement, GroupElement]],
) -> InvarianceReport:
    """Compare ||h^-1 g h|| with ||g|| over sampled pairs.

    Must report zero discrepancy for normal-closure / conjugacy-class
    contexts; non-normal explicit sets are expected to fail, which is the
    point of the corresponding test.  When a norm is only known as an
    interval, a disjoint interval counts as a certified discrepancy.
    """
    worst = 0.0
    worst_pair = None
    non_exact = 0
    count = 0
    for g, h in pairs:
        count += 1
        ng = ctx.norm(g)
        nc = ctx.norm(conjugate(g, h))
        if ng.exact and nc.exact:
            gap = abs(nc.lower - ng.lower)
        else:
            non_exact += 1
            # certified separation of the two intervals, if any
            gap = max(nc.lower - ng.upper, ng.lower - nc.upper, 0)
        if gap > worst:
            worst = gap
            worst_pair = (g.encode(), h.encode())
    return InvarianceReport(count, worst, worst_pair, non_exact)


# ---------------------------------------------------------------------------
# norm tables (CSV persistence)


def save_norm_table(ctx: GroupContext, elements: Sequence[GroupElement], path) -> None:
    """Persist (element, norm bounds, exact flag) keyed by the context descriptor."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# context: {ctx.describe()}\n")
        writer = csv.writer(fh)
        writer.writerow(["element", "lower", "upper", "exact"])
        for g in elements:
            iv = ctx.norm(g)
            writer.writerow([g.encode(), repr(iv.lower), repr(iv.upper), int(iv.exact)])


def load_norm_table(path) -> tuple[str, dict[str, NormInterval]]:
    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# context: "):
            raise NormError(f"missing context header in {path}")
        descriptor = header[len("# context: "):]
        reader = csv.reader(fh)
        names = next(reader)
        if names != ["element", "lower", "upper", "exact"]:
            raise NormError(f"unexpected norm-table columns {names}")
        rows = {}
        for enc, lo, up, exact in reader:
            rows[enc] = NormInterval(
                float(lo) if "." in lo or lo == "inf" else int(lo),
                math.inf if up == "inf" else (float(up) if "." in up else int(up)),
                bool(int(exact)),
            )
    return descriptor, rows
