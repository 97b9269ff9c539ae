"""Batch front-end: job specs in, CSV/JSON reports out.

A job file holds one or more blocks::

    job {
      task = norm
      family = lattice
      dim = 2
      element = [3,-2]
    }

Parsing is strict: unknown keys, missing required keys and malformed
values are all collected and reported together with line numbers, and a
job never runs from a partially understood spec.  Runs are deterministic:
seeds default to a fixed constant, rows are emitted in spec order, and
``--reproducible`` blanks the wall-time column so repeated runs produce
byte-identical files.

Exit codes: 0 success, 1 any error row, 2 spec errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import cone as cone_mod
from . import pqm as pqm_mod
from .groups import EncodingError, FamilyMismatchError, LatticeVector
from .norms import (
    GeneratingSet,
    GroupContext,
    InexactNormError,
    NormError,
    standard_lattice_generators,
)
from .pqm import (
    FeketeHypothesisError,
    FiniteOrderError,
    LimitScheme,
    PqmError,
    SubadditiveCorrection,
    WalkSpecError,
    WindowCertificateError,
)
from .reports import CLI_REPORT_COLUMNS, EmitError, ReportRow, emit, format_number, write_trace
from .sampling import DEFAULT_SEED, element_sampler, sample_pairs


class JobSpecError(Exception):
    """Carries every collected spec error, not just the first."""

    def __init__(self, errors: Sequence[str]):
        super().__init__("\n".join(errors))
        self.errors = list(errors)


@dataclass
class JobSpec:
    task: str
    params: dict[str, str]
    line: int = 0


# ---------------------------------------------------------------------------
# grammar tables

CONTEXT_KEYS = {"family", "rank", "dim", "degree", "generators", "backend"}
COMMON_KEYS = {"task", "seed", "window", "scheme", "tolerance"}

TASKS: dict[str, dict[str, set[str]]] = {
    "norm": {"required": {"element"}, "optional": set(), "context": True},
    "translation-length": {"required": {"element"}, "optional": set(), "context": True},
    "defect": {"required": {"function", "samples"}, "optional": {"maxlen"}, "context": True},
    "lipschitz": {"required": {"function", "samples"}, "optional": {"maxlen"}, "context": True},
    "detect": {"required": {"element"}, "optional": set(), "context": True},
    "extend": {"required": {"element", "at"}, "optional": {"c"}, "context": True},
    "ctrick": {"required": {"element", "element2", "n"}, "optional": {"base"}, "context": True},
    "cone-norm": {"required": {"element"}, "optional": set(), "context": True},
    "cone-dist": {"required": {"element", "element2"}, "optional": set(), "context": True},
    "pullback": {"required": {"functional", "samples"}, "optional": {"maxlen"}, "context": True},
    "walk": {"required": {"walk"}, "optional": set(), "context": False},
    "fekete": {"required": {"sequence", "n"}, "optional": {"phi"}, "context": False},
}

_INT_KEYS = {"rank", "dim", "degree", "samples", "maxlen", "n", "window", "seed"}

DEFAULT_WINDOWS = {
    "translation-length": 64,
    "detect": 32,
    "extend": 16,
    "cone-norm": 8,
    "cone-dist": 8,
    "pullback": 8,
    "walk": 4096,
}


# ---------------------------------------------------------------------------
# parsing


def parse_jobfile(text: str) -> tuple[list[JobSpec], list[str]]:
    """Parse a whole job file; returns (jobs, errors) with every error found."""
    jobs: list[JobSpec] = []
    errors: list[str] = []
    current: dict[str, str] | None = None
    current_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "job {":
            if current is not None:
                errors.append(f"line {lineno}: nested job block")
            current = {}
            current_line = lineno
            continue
        if line == "}":
            if current is None:
                errors.append(f"line {lineno}: stray closing brace")
                continue
            job, job_errors = _validate_job(current, current_line, len(jobs))
            errors.extend(job_errors)
            if job is not None:
                jobs.append(job)
            current = None
            continue
        if current is None:
            errors.append(f"line {lineno}: expected 'job {{', got {line!r}")
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in current:
            errors.append(f"line {lineno}: duplicate key {key!r}")
        current[key] = value
    if current is not None:
        errors.append(f"line {current_line}: unterminated job block")
    return jobs, errors


def _validate_job(params: dict[str, str], line: int, index: int) -> tuple[JobSpec | None, list[str]]:
    errors: list[str] = []
    path = f"job[{index}]"
    task = params.get("task")
    if task is None:
        return None, [f"{path}: missing required key 'task' (line {line})"]
    if task not in TASKS:
        return None, [f"{path}.task: unknown task {task!r} (line {line})"]
    table = TASKS[task]
    allowed = COMMON_KEYS | table["required"] | table["optional"]
    if table["context"]:
        allowed |= CONTEXT_KEYS
    for key in params:
        if key not in allowed:
            errors.append(f"{path}.{key}: unknown key for task {task!r} (line {line})")
    for key in table["required"]:
        if key not in params:
            errors.append(f"{path}: missing required key {key!r} for task {task!r} (line {line})")
    if table["context"] and "family" not in params:
        errors.append(f"{path}: missing required key 'family' (line {line})")
    for key in _INT_KEYS:
        if key in params:
            try:
                int(params[key])
            except ValueError:
                errors.append(f"{path}.{key}: expected an integer, got {params[key]!r} (line {line})")
    if "tolerance" in params:
        try:
            float(params["tolerance"])
        except ValueError:
            errors.append(f"{path}.tolerance: expected a number (line {line})")
    if "family" in params and params["family"] not in ("free", "perm", "lattice", "heisenberg"):
        errors.append(f"{path}.family: unknown family {params['family']!r} (line {line})")
    if "scheme" in params:
        try:
            LimitScheme.parse(params["scheme"], 8)
        except ValueError as exc:
            errors.append(f"{path}.scheme: {exc} (line {line})")
    if errors:
        return None, errors
    return JobSpec(task, dict(params), line), []


def parse_jobspec(text: str) -> JobSpec:
    """Parse a single-job spec; raises JobSpecError carrying all errors."""
    jobs, errors = parse_jobfile(text)
    if errors:
        raise JobSpecError(errors)
    if len(jobs) != 1:
        raise JobSpecError([f"expected exactly one job block, found {len(jobs)}"])
    return jobs[0]


def _split_encodings(text: str) -> list[str]:
    """Split a comma-separated encoding list, respecting () and []."""
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur).strip())
    return [p for p in parts if p]


# ---------------------------------------------------------------------------
# context construction

_DEFAULT_BACKENDS = {
    "free": "cancellation-dp",
    "perm": "transposition-closed-form",
    "lattice": "l1",
    "heisenberg": "bounded-search",
}


def build_context(params: dict[str, str]) -> GroupContext:
    family = params["family"]
    rank = int(params.get("rank", 2))
    dim = int(params.get("dim", 2))
    degree = int(params.get("degree", 5))
    backend = params.get("backend", _DEFAULT_BACKENDS[family])
    gen_text = params.get("generators")
    if gen_text is None:
        if family == "lattice":
            gens = standard_lattice_generators(dim)
        elif family == "free":
            if backend == "cl-bounds":
                gens = GeneratingSet.all_commutators()
            else:
                from .groups import FreeWord

                gens = GeneratingSet.normal_closure(
                    tuple(FreeWord.generator(rank, i) for i in range(1, rank + 1))
                )
        elif family == "perm":
            from .groups import Permutation

            gens = GeneratingSet.normal_closure((Permutation.transposition(1, 2),))
        else:
            from .groups import HEISENBERG_A, HEISENBERG_B

            gens = GeneratingSet.normal_closure((HEISENBERG_A, HEISENBERG_B))
    else:
        gens = _parse_generators(gen_text, family, rank, dim)
    return GroupContext(family, gens, backend, rank=rank, degree=degree, dim=dim)


def _parse_generators(text: str, family: str, rank: int, dim: int) -> GeneratingSet:
    from .groups import decode

    if text == "all-commutators":
        return GeneratingSet.all_commutators()
    if text == "unit-ball":
        return GeneratingSet.unit_ball()
    kind, _, body = text.partition(":")
    if kind == "explicit" and body == "standard":
        if family != "lattice":
            raise NormError("explicit:standard is only defined for lattice contexts")
        return standard_lattice_generators(dim)
    if kind in ("explicit", "normal"):
        elems = tuple(decode(family, enc, rank=rank) for enc in _split_encodings(body))
        if not elems:
            raise NormError(f"empty generator list in {text!r}")
        if kind == "explicit":
            return GeneratingSet.explicit_symmetrized(elems)
        return GeneratingSet.normal_closure(elems)
    raise NormError(f"bad generators value {text!r}")


# ---------------------------------------------------------------------------
# job execution

ERROR_CODES = [
    (InexactNormError, "E_NORM_INEXACT"),
    (FamilyMismatchError, "E_FAMILY_MISMATCH"),
    (EncodingError, "E_ENCODING"),
    (FiniteOrderError, "E_FINITE_ORDER"),
    (WindowCertificateError, "E_WINDOW_CERT"),
    (FeketeHypothesisError, "E_FEKETE_HYPOTHESIS"),
    (WalkSpecError, "E_WALK_SPEC"),
    (cone_mod.GrowthCertificateError, "E_GROWTH_CERT"),
    (cone_mod.LinearBoundError, "E_LINEAR_BOUND"),
    (cone_mod.ConeError, "E_CONE"),
    (PqmError, "E_PQM"),
    (NormError, "E_NORM"),
    (ValueError, "E_VALUE"),
]


def _error_code(exc: Exception) -> str:
    for klass, code in ERROR_CODES:
        if isinstance(exc, klass):
            return code
    return "E_INTERNAL"


@dataclass
class JobResult:
    rows: list[ReportRow]
    traces: list[tuple[str, list[tuple]]] = field(default_factory=list)  # (label, rows)

    @property
    def failed(self) -> bool:
        return any(r.quantity == "error" for r in self.rows)


def run_job(spec: JobSpec, seed_override: int | None = None) -> JobResult:
    """Execute one validated job; backend errors become error rows with a
    stable machine-readable code."""
    start = time.perf_counter()
    try:
        result = _dispatch(spec, seed_override)
    except Exception as exc:  # noqa: BLE001 - rendered as a typed error row
        context_id = spec.params.get("family", "-")
        result = JobResult([
            ReportRow(
                context_id=context_id,
                task=spec.task,
                inputs=_inputs_string(spec),
                quantity="error",
                value=_error_code(exc),
                witness=str(exc),
            )
        ])
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    for row in result.rows:
        row.wall_time_ms = f"{elapsed_ms:.3f}"
    return result


def _inputs_string(spec: JobSpec) -> str:
    keys = ("element", "element2", "n", "c", "at", "function", "functional",
            "walk", "sequence", "phi", "samples")
    parts = [f"{k}={spec.params[k]}" for k in keys if k in spec.params]
    return ";".join(parts)


def _scheme_for(spec: JobSpec, default_kind: str = "plain") -> LimitScheme:
    window = int(spec.params.get("window", DEFAULT_WINDOWS.get(spec.task, 16)))
    return LimitScheme.parse(spec.params.get("scheme", default_kind), window)


def _seed_for(spec: JobSpec, seed_override: int | None) -> int:
    if seed_override is not None:
        return seed_override
    return int(spec.params.get("seed", DEFAULT_SEED))


def _function_from_id(fid: str, ctx: GroupContext):
    if fid == "norm":
        return pqm_mod.norm_handle(ctx)
    if fid.startswith("brooks:"):
        from .groups import FreeWord

        pattern = FreeWord.parse(fid.split(":", 1)[1], ctx.rank)
        return pqm_mod.brooks_qm(pattern, ctx)
    if fid.startswith("coord:"):
        return pqm_mod.coordinate_handle(ctx, int(fid.split(":", 1)[1]))
    if fid.startswith("scale:"):
        return pqm_mod.scaled_coordinate_handle(ctx, int(fid.split(":", 1)[1]))
    if fid.startswith("walk:"):
        return pqm_mod.walk_handle(pqm_mod.walk_build(fid.split(":", 1)[1]), ctx)
    raise ValueError(f"unknown function id {fid!r}")


def _pair_draw(ctx: GroupContext, maxlen: int):
    return element_sampler(
        ctx.family, rank=ctx.rank, degree=ctx.degree, dim=ctx.dim,
        max_len=maxlen, box=maxlen,
    )


def _spread(lo, hi) -> str:
    return f"[{format_number(lo)},{format_number(hi)}]"


def _dispatch(spec: JobSpec, seed_override: int | None) -> JobResult:
    task = spec.task
    params = spec.params
    seed = _seed_for(spec, seed_override)
    if task == "walk":
        scheme = _scheme_for(spec)
        walk = pqm_mod.walk_build(params["walk"])
        handle = pqm_mod.walk_handle(walk)
        res = pqm_mod.homogenise(handle, LatticeVector((1,)), scheme)
        row = ReportRow(
            context_id="walk", task=task, inputs=_inputs_string(spec),
            quantity="homogenisation", value=format_number(res.estimate),
            spread=_spread(res.liminf_est, res.limsup_est),
            witness=f"converged={int(res.converged)}",
            seed=str(seed), window=str(scheme.window), scheme=scheme.describe(),
        )
        return JobResult([row])
    if task == "fekete":
        n_max = int(params["n"])
        a = _sequence_from_id(params["sequence"])
        phi = _phi_from_id(params.get("phi", "zero"))
        res = pqm_mod.fekete_limit(a, phi, n_max, seed=seed)
        row = ReportRow(
            context_id="fekete", task=task, inputs=_inputs_string(spec),
            quantity="limit", value=format_number(res.estimate),
            spread=_spread(res.liminf_est, res.limsup_est),
            witness=f"converged={int(res.converged)}",
            seed=str(seed), window=str(n_max), scheme="plain",
        )
        return JobResult([row])

    ctx = build_context(params)
    context_id = ctx.describe()

    def base_row(**kw) -> ReportRow:
        defaults = dict(
            context_id=context_id, task=task, inputs=_inputs_string(spec), seed=str(seed),
        )
        defaults.update(kw)
        return ReportRow(**defaults)

    if task == "norm":
        g = ctx.decode(params["element"])
        iv = ctx.norm(g)
        return JobResult([base_row(
            quantity="norm",
            value=format_number(iv.lower) if iv.exact else "",
            spread=_spread(iv.lower, iv.upper),
            exact=str(int(iv.exact)),
        )])
    if task == "translation-length":
        scheme = _scheme_for(spec)
        g = ctx.decode(params["element"])
        res = pqm_mod.homogenise(pqm_mod.norm_handle(ctx), g, scheme)
        return JobResult([base_row(
            quantity="translation-length", value=format_number(res.estimate),
            spread=_spread(res.liminf_est, res.limsup_est),
            witness=f"converged={int(res.converged)}",
            window=str(scheme.window), scheme=scheme.describe(),
        )])
    if task in ("defect", "lipschitz"):
        f = _function_from_id(params["function"], ctx)
        maxlen = int(params.get("maxlen", 5))
        pairs = sample_pairs(_pair_draw(ctx, maxlen), seed, int(params["samples"]))
        if task == "defect":
            est = pqm_mod.defect_estimate(f, pairs, seed=seed)
        else:
            est = pqm_mod.lipschitz_estimate(f, pairs, seed=seed)
        witness = ";".join(est.witness) if est.witness else ""
        return JobResult([base_row(
            quantity=est.quantity, value=format_number(est.value), witness=witness,
        )])
    if task == "detect":
        # the job window is the growth-certificate window; the scheme's own
        # window is derived so the homogenised powers stay inside it
        window = int(params.get("window", DEFAULT_WINDOWS["detect"]))
        kind = params.get("scheme", "arith:2")
        probe = LimitScheme.parse(kind, 8)
        scheme = LimitScheme(probe.kind, max(8, window // (2 * probe.k)), k=probe.k)
        g = ctx.decode(params["element"])
        wit = pqm_mod.detect_undistorted(ctx, g, scheme, window)
        rows = [base_row(
            quantity="detect", value=format_number(wit.c_est), witness=wit.verdict,
            spread="" if wit.value_at_g is None else _spread(wit.value_at_g, wit.value_at_g),
            window=str(window), scheme=scheme.describe(),
        )]
        return JobResult(rows, traces=[("detect", list(wit.trace))])
    if task == "extend":
        window = int(params.get("window", DEFAULT_WINDOWS["extend"]))
        g = ctx.decode(params["element"])
        if "c" in params:
            c = Fraction(params["c"])
        else:
            powers = [g ** m for m in range(1, window + 1)]
            c = min(Fraction(ctx.norm_exact(p), m) for m, p in enumerate(powers, start=1))
        ext = pqm_mod.mcshane_extend(ctx, g, c, window)
        rows = []
        for enc in params["at"].split(";"):
            h = ctx.decode(enc.strip())
            value, cert = ext.eval_with_certificate(h)
            rows.append(base_row(
                quantity="extension", inputs=f"element={params['element']};at={enc.strip()};c={format_number(c)}",
                value=format_number(value), exact=str(int(cert.exact)),
                window=str(window),
            ))
        return JobResult(rows)
    if task == "ctrick":
        g = ctx.decode(params["element"])
        h = ctx.decode(params["element2"])
        n = int(params["n"])
        res = pqm_mod.c_trick_witness(g, h, n, base=params.get("base", "h"))
        lhs, rhs = res.norm_bound_check(ctx.norm_exact)
        rows = [
            base_row(quantity="ctrick-identity", value="1", exact="1",
                     witness=";".join(c.encode() for c in res.witnesses)),
            base_row(quantity="ctrick-norm-bound", value=format_number(lhs),
                     spread=_spread(0, rhs), exact=str(int(lhs <= rhs))),
        ]
        return JobResult(rows)
    if task in ("cone-norm", "cone-dist"):
        scheme = _scheme_for(spec)
        g = ctx.decode(params["element"])
        p = cone_mod.eta(ctx, g)
        if task == "cone-norm":
            est = cone_mod.cone_norm(p, scheme)
            point = p
        else:
            q = cone_mod.eta(ctx, ctx.decode(params["element2"]))
            point = p.mul(q.inverse())
            est = cone_mod.cone_norm(point, scheme)
        trace_rows = [(n, point.norm_at(n), ratio) for n, ratio in est.trace]
        return JobResult(
            [base_row(
                quantity=task, value=format_number(est.value),
                spread=_spread(est.liminf_est, est.limsup_est),
                window=str(scheme.window), scheme=scheme.describe(),
            )],
            traces=[(task, trace_rows)],
        )
    if task == "pullback":
        scheme = _scheme_for(spec)
        fid = params["functional"]
        if fid == "cone-norm":
            functional = cone_mod.cone_norm_functional(scheme)
        elif fid.startswith("coord:"):
            functional = cone_mod.coordinate_functional(int(fid.split(":", 1)[1]), scheme)
        else:
            raise ValueError(f"unknown functional {fid!r} (cone-norm | coord:<i>)")
        maxlen = int(params.get("maxlen", 2))
        pairs = sample_pairs(_pair_draw(ctx, maxlen), seed, int(params["samples"]))
        rep = cone_mod.pullback_defect(functional, ctx, pairs)
        return JobResult([base_row(
            quantity="pullback-defect", value=format_number(rep.max_ratio),
            witness=f"violations={rep.violations};bound={format_number(rep.bound_constant)}",
            window=str(scheme.window), scheme=scheme.describe(),
        )])
    raise ValueError(f"unhandled task {task!r}")


def _sequence_from_id(sid: str) -> Callable[[int], float]:
    import math

    if sid.startswith("linear:"):
        alpha = float(sid.split(":", 1)[1])
        return lambda n: alpha * n
    if sid == "halfceil":
        return lambda n: (n + 1) // 2
    if sid.startswith("sqrt-drift:"):
        alpha = float(sid.split(":", 1)[1])
        return lambda n: alpha * n + math.sqrt(n)
    raise ValueError(f"unknown sequence id {sid!r}")


def _phi_from_id(pid: str) -> SubadditiveCorrection:
    if pid == "zero":
        return SubadditiveCorrection.zero()
    if pid.startswith("const:"):
        return SubadditiveCorrection.constant(float(pid.split(":", 1)[1]))
    if pid.startswith("sqrt:"):
        return SubadditiveCorrection.sqrt(float(pid.split(":", 1)[1]))
    raise ValueError(f"unknown phi id {pid!r}")


# ---------------------------------------------------------------------------
# the batch runner


def run_jobfile(
    text: str,
    out: str = "-",
    fmt: str = "csv",
    seed_override: int | None = None,
    reproducible: bool = False,
    window_override: int | None = None,
    scheme_override: str | None = None,
) -> tuple[int, str]:
    """Run every job in the file; returns (exit_code, serialized report)."""
    jobs, errors = parse_jobfile(text)
    if errors:
        raise JobSpecError(errors)
    if not jobs:
        raise JobSpecError(["job file contains no jobs"])
    for job in jobs:
        if window_override is not None and job.task in DEFAULT_WINDOWS:
            job.params["window"] = str(window_override)
        if scheme_override is not None and job.task not in ("norm", "fekete", "ctrick", "extend"):
            job.params["scheme"] = scheme_override
    all_rows: list[dict] = []
    failed = False
    trace_index = 0
    for job in jobs:
        result = run_job(job, seed_override)
        failed = failed or result.failed
        for label, trace_rows in result.traces:
            # trace file names derive from the output path and job order,
            # so report rows stay byte-identical across output locations
            if out != "-":
                write_trace(f"{out}.trace{trace_index}.csv", trace_rows)
            trace_index += 1
        all_rows.extend(r.as_dict(reproducible=reproducible) for r in result.rows)
    text_out = emit(all_rows, fmt, out, CLI_REPORT_COLUMNS)
    return (1 if failed else 0), text_out


# ---------------------------------------------------------------------------
# argparse front-end


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="-", help="output path (default: stdout)")
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.add_argument("--seed", type=int, default=None, help="override job seeds")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--scheme", default=None, help="plain | arith:<k> | cesaro")
    p.add_argument("--reproducible", action="store_true",
                   help="blank the wall-time column for byte-identical reruns")


_TASK_FLAGS = {
    "element": dict(),
    "element2": dict(),
    "n": dict(type=int),
    "c": dict(),
    "at": dict(help="semicolon-separated element encodings"),
    "function": dict(help="norm | brooks:<pattern> | coord:<i> | scale:<k>"),
    "functional": dict(help="cone-norm | coord:<i>"),
    "samples": dict(type=int),
    "maxlen": dict(type=int),
    "walk": dict(help="alternating | all-up | doubling-blocks"),
    "sequence": dict(help="linear:<a> | halfceil | sqrt-drift:<a>"),
    "phi": dict(help="zero | const:<d> | sqrt:<c>"),
    "base": dict(help="g | h"),
}

_CONTEXT_FLAGS = {
    "family": dict(help="free | perm | lattice | heisenberg"),
    "rank": dict(type=int),
    "dim": dict(type=int),
    "degree": dict(type=int),
    "generators": dict(help="explicit:<encs> | normal:<encs> | all-commutators"),
    "backend": dict(),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="binorms",
        description="bi-invariant word norms, partial quasimorphisms and cone functionals",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a job file")
    runp.add_argument("--spec", required=True, help="job file path")
    _add_common_flags(runp)
    for task, table in TASKS.items():
        tp = sub.add_parser(task, help=f"run a single {task} job")
        keys = sorted(table["required"] | table["optional"])
        for key in keys:
            tp.add_argument(f"--{key}", required=key in table["required"],
                            **_TASK_FLAGS.get(key, {}))
        if table["context"]:
            for key, kw in _CONTEXT_FLAGS.items():
                tp.add_argument(f"--{key}", required=(key == "family"), **kw)
        _add_common_flags(tp)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            with open(args.spec, encoding="utf-8") as fh:
                text = fh.read()
            code, rendered = run_jobfile(
                text, out=args.out, fmt=args.format,
                seed_override=args.seed, reproducible=args.reproducible,
                window_override=args.window, scheme_override=args.scheme,
            )
        else:
            params: dict[str, str] = {"task": args.command}
            table = TASKS[args.command]
            for key in table["required"] | table["optional"]:
                value = getattr(args, key.replace("-", "_"), None)
                if value is not None:
                    params[key] = str(value)
            if table["context"]:
                for key in _CONTEXT_FLAGS:
                    value = getattr(args, key, None)
                    if value is not None:
                        params[key] = str(value)
            for key in ("window", "scheme"):
                value = getattr(args, key, None)
                if value is not None:
                    params[key] = str(value)
            job, errors = _validate_job(params, 0, 0)
            if errors:
                raise JobSpecError(errors)
            result = run_job(job, args.seed)
            rows = [r.as_dict(reproducible=args.reproducible) for r in result.rows]
            rendered = emit(rows, args.format, args.out, CLI_REPORT_COLUMNS)
            code = 1 if result.failed else 0
    except JobSpecError as exc:
        for e in exc.errors:
            print(f"spec error: {e}", file=sys.stderr)
        return 2
    except (OSError, EmitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out == "-":
        sys.stdout.write(rendered)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
