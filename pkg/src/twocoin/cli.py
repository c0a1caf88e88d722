"""Command-line front end: ``twocoin <protocol> [flags]``.

Configs come from flags, a TOML file (``--config``), or both; flags win.
Reports are JSON (``--format structured``) or the per-step CSV trace
(``--format csv``).  Exit codes: 0 pass, 1 fidelity failure, 2 bad config
or precondition, 3 internal or oracle guard.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import oracle, verify
from .errors import ConfigError, PreconditionError, WalkError
from .hilbert import GraphSpec, from_amplitudes, random_vector
from .operators import CoinOp, coin_matrix, step
from .teleport import (
    plan_teleport_complete,
    plan_teleport_cycle,
    plan_teleport_line,
    plan_teleport_regular,
    run_teleport,
    sample_branch,
)
from .transfer import plan_complete, plan_cycle, plan_line, plan_regular, run_transfer

log = logging.getLogger("twocoin")

TRANSFERS = ("transfer-line", "transfer-cycle", "transfer-complete", "transfer-regular")
TELEPORTS = ("teleport-line", "teleport-cycle", "teleport-complete", "teleport-regular")
PROTOCOLS = TRANSFERS + TELEPORTS + ("verify-all", "certify")

# parameters each protocol needs, in the order they are checked
REQUIRED = {
    "transfer-line": ("x",),
    "transfer-cycle": ("d", "x"),
    "transfer-complete": ("d", "x"),
    "transfer-regular": ("n", "d", "x"),
    "teleport-line": ("n",),
    "teleport-cycle": ("d",),
    "teleport-complete": ("d", "t"),
    "teleport-regular": ("n", "d", "t"),
}

EXIT_PASS, EXIT_FIDELITY, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3
CSV_HEADER = ("step", "position", "coin1", "coin2", "re", "im")
NORM_WARN_TOL = 1e-6


@dataclass(frozen=True)
class RunConfig:
    protocol: str
    x: int | None = None
    d: int | None = None
    n: int | None = None
    t: int | None = None
    method: int = 1
    input_state: tuple | None = None  # ((re, im), ...) or None for a seeded random state
    seed: int = 0
    mode: str = "enumerate"
    trace: bool = False
    format: str = "structured"
    out: str | None = None
    certify_protocol: str | None = None
    trials: int = 8
    corrupt_step: int | None = None
    jobs: int = 1

    def echo(self) -> dict:
        """Result-affecting fields; where the report goes and how many workers ran are left out."""
        return {k: (list(map(list, v)) if k == "input_state" and v is not None else v)
                for k, v in asdict(self).items() if k not in ("out", "jobs")}


@dataclass
class ProtocolReport:
    config: RunConfig
    data: dict
    trace: list | None = None
    verdict: bool = False

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.verdict else EXIT_FIDELITY


# -- parsing ---------------------------------------------------------------


def _parse_amp(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise ConfigError(f"input amplitude {text!r} must be 're' or 're,im'")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"input amplitude {text!r} is not numeric") from exc
    return (vals[0], vals[1] if len(vals) == 2 else 0.0)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twocoin", description="Two-coin quantum walk transfer and teleportation.")
    p.add_argument("protocol", nargs="?", choices=PROTOCOLS, help="protocol to run (may come from --config)")
    p.add_argument("--config", help="TOML config file; flags override its values")
    p.add_argument("--target", "-x", dest="x", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--method", type=int)
    p.add_argument("--input", nargs="+", metavar="RE,IM", help="coin-1 amplitudes; omit for a seeded random state")
    p.add_argument("--seed", type=int)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", dest="mode", action="store_const", const="enumerate")
    mode.add_argument("--sample", dest="mode", action="store_const", const="sample")
    p.add_argument("--trace", action="store_true", default=None)
    p.add_argument("--format", choices=("csv", "structured"))
    p.add_argument("--out")
    p.add_argument("--protocol", dest="certify_protocol", choices=TRANSFERS,
                   help="(certify) transfer protocol whose schedule is certified")
    p.add_argument("--trials", type=int)
    p.add_argument("--corrupt-step", type=int, help="(certify) toggle the coin operator at this 1-based step")
    p.add_argument("--jobs", type=int, help="(verify-all) worker processes")
    return p


_FLAT_KEYS = ("x", "target", "d", "n", "t", "method", "seed", "mode", "trace", "format", "out",
              "trials", "corrupt_step", "jobs")


def _from_toml(text: str) -> dict:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    out: dict = {}
    sections = [doc] + [doc.get(s, {}) for s in ("arena", "run", "output", "certify")]
    for sec in sections:
        for k in _FLAT_KEYS:
            if k in sec:
                out["x" if k == "target" else k] = sec[k]
    if "path" in doc.get("output", {}):
        out["out"] = doc["output"]["path"]
    if "protocol" in doc:
        out["protocol"] = doc["protocol"]
    if "protocol" in doc.get("certify", {}):
        out["certify_protocol"] = doc["certify"]["protocol"]
    inp = doc.get("input", {})
    if "seed" in inp:
        out["seed"] = inp["seed"]
    if "amplitudes" in inp:
        try:
            out["input_state"] = tuple((float(a[0]), float(a[1])) for a in inp["amplitudes"])
        except (TypeError, IndexError, ValueError) as exc:
            raise ConfigError("input.amplitudes must be a list of [re, im] pairs") from exc
    return out


def parse_config(argv=None, text: str | None = None) -> RunConfig:
    """Build and validate a :class:`RunConfig` from flags and/or TOML text."""
    values: dict = {}
    args = None
    if argv is not None:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:
            if exc.code == 0:  # --help
                raise
            raise ConfigError("could not parse command-line flags") from exc
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    values.update(_from_toml(fh.read()))
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}") from exc
    if text is not None:
        values.update(_from_toml(text))
    if args is not None:
        for k in ("protocol", "x", "d", "n", "t", "method", "seed", "mode", "trace", "format", "out",
                  "certify_protocol", "trials", "corrupt_step", "jobs"):
            v = getattr(args, k)
            if v is not None:
                values[k] = v
        if args.input:
            values["input_state"] = tuple(_parse_amp(s) for s in args.input)

    if "protocol" not in values:
        raise ConfigError("protocol is required")
    if values["protocol"] not in PROTOCOLS:
        raise ConfigError(f"unknown protocol {values['protocol']!r}")
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return validate(cfg)


def validate(cfg: RunConfig) -> RunConfig:
    """Check every precondition before any computation; normalizes the input state."""
    if cfg.mode not in ("enumerate", "sample"):
        raise ConfigError("mode must be 'enumerate' or 'sample'")
    if cfg.format not in ("csv", "structured"):
        raise ConfigError("format must be 'csv' or 'structured'")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    if cfg.protocol == "verify-all":
        return cfg
    target = cfg
    if cfg.protocol == "certify":
        if cfg.certify_protocol is None:
            raise ConfigError("certify needs --protocol naming a transfer protocol")
        if cfg.certify_protocol not in TRANSFERS:
            raise ConfigError("certify applies to transfer protocols only")
        if cfg.trials < 1:
            raise ConfigError("trials must be at least 1")
        target = replace(cfg, protocol=cfg.certify_protocol)
    plan = build_plan(target)
    if cfg.corrupt_step is not None and not 1 <= cfg.corrupt_step <= len(plan.steps):
        raise ConfigError(f"corrupt-step must be in 1..{len(plan.steps)}")
    if cfg.input_state is not None:
        dim = plan.arena.coin_dim
        if len(cfg.input_state) != dim:
            raise ConfigError(f"input state needs {dim} amplitudes, got {len(cfg.input_state)}")
        vec = np.array([complex(re, im) for re, im in cfg.input_state])
        norm = float(np.linalg.norm(vec))
        if norm == 0:
            raise ConfigError("input state must be nonzero")
        if abs(norm - 1) > NORM_WARN_TOL:
            log.warning("input norm is %.17g; normalizing", norm)
            vec = vec / norm
            cfg = replace(cfg, input_state=tuple((float(z.real), float(z.imag)) for z in vec))
    return cfg


def build_plan(cfg: RunConfig):
    """Map a config onto a transfer or teleport plan; preconditions surface as ConfigError."""
    for k in REQUIRED[cfg.protocol]:
        if getattr(cfg, k) is None:
            raise ConfigError(f"{cfg.protocol} needs parameter {k}")
    builders = {
        "transfer-line": lambda c: plan_line(c.x),
        "transfer-cycle": lambda c: plan_cycle(c.d, c.x, c.method),
        "transfer-complete": lambda c: plan_complete(c.d, c.x),
        "transfer-regular": lambda c: plan_regular(c.n, c.d, c.x),
        "teleport-line": lambda c: plan_teleport_line(c.n),
        "teleport-cycle": lambda c: plan_teleport_cycle(c.d),
        "teleport-complete": lambda c: plan_teleport_complete(c.d, c.t),
        "teleport-regular": lambda c: plan_teleport_regular(c.n, c.d, c.t),
    }
    try:
        return builders[cfg.protocol](cfg)
    except PreconditionError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc


# -- running ---------------------------------------------------------------


def _pair(z) -> list:
    return [float(z.real), float(z.imag)]


def _matrix(m) -> list:
    return [[_pair(z) for z in row] for row in np.asarray(m)]


def _op_dict(op: CoinOp) -> dict:
    out = {"name": op.name}
    if op.name == "U":
        out["matrix"] = _matrix(coin_matrix(op))
    return out


def input_vector(cfg: RunConfig, dim: int, rng: np.random.Generator) -> np.ndarray:
    if cfg.input_state is None:
        return random_vector(dim, rng)
    vec = np.array([complex(re, im) for re, im in cfg.input_state])
    return vec / np.linalg.norm(vec)


def _schedule_table(plan) -> list:
    return [
        {"step": i, "coin": st.coin, "op": st.op.name}
        for i, st in enumerate(plan.steps, start=1)
        if not st.op.is_identity
    ]


def _run_transfer(cfg: RunConfig) -> ProtocolReport:
    plan = build_plan(cfg)
    rng = np.random.default_rng(cfg.seed)
    payload = input_vector(cfg, plan.arena.coin_dim, rng)
    rep = run_transfer(plan, payload)
    data = {
        "arena": plan.arena.describe(),
        "case": plan.case_tag,
        "target": plan.target,
        "step_count": plan.n_steps,
        "placements": _schedule_table(plan),
        "recovery": {"coin1": _op_dict(plan.recovery[0]), "coin2": _op_dict(plan.recovery[1])},
        "certification": [r.to_dict() for r in plan.certification],
        "input": [_pair(z) for z in payload],
        "fidelity": rep.fidelity,
    }
    verdict = rep.passed and all(r.passed for r in plan.certification)
    return ProtocolReport(cfg, data, rep.trace if cfg.trace else None, verdict)


def _branch_dict(b) -> dict:
    return {
        "position": b.position_outcome,
        "coin1": b.coin1_outcome,
        "probability": b.probability,
        "correction": _matrix(b.correction),
        "fidelity": b.fidelity,
    }


def _run_teleport(cfg: RunConfig) -> ProtocolReport:
    plan = build_plan(cfg)
    rng = np.random.default_rng(cfg.seed)
    payload = input_vector(cfg, plan.arena.coin_dim, rng)
    rep = run_teleport(plan, payload)
    data = {
        "arena": plan.arena.describe(),
        "step_count": plan.total_steps,
        "placements": _schedule_table(plan),
        "input": [_pair(z) for z in payload],
        "total_probability": rep.total_probability,
        "mode": cfg.mode,
    }
    if cfg.mode == "sample":
        b = sample_branch(rep.branches, rng)
        data["branches"] = [_branch_dict(b)]
        data["fidelities"] = [b.fidelity]
        verdict = b.passed
    else:
        data["branches"] = [_branch_dict(b) for b in rep.branches]
        data["fidelities"] = [b.fidelity for b in rep.branches]
        verdict = rep.passed
    return ProtocolReport(cfg, data, rep.trace if cfg.trace else None, verdict)


def corrupt(plan, k: int):
    """Toggle the coin operator at 1-based step ``k``: identity becomes a shift and vice versa."""
    steps = list(plan.steps)
    st = steps[k - 1]
    dim = st.op.dim
    op = CoinOp.shift(dim) if st.op.is_identity else CoinOp.identity(dim)
    steps[k - 1] = step(plan.arena, st.coin, op)
    return replace(plan, steps=tuple(steps))


def _run_certify(cfg: RunConfig) -> ProtocolReport:
    plan = build_plan(replace(cfg, protocol=cfg.certify_protocol))
    note = "tabulated schedule"
    if cfg.corrupt_step is not None:
        plan = corrupt(plan, cfg.corrupt_step)
        note = f"negative control: coin operator toggled at step {cfg.corrupt_step}"
    record = oracle.certify_schedule(plan, trials=cfg.trials, seed=cfg.seed, note=note)
    data = {
        "arena": plan.arena.describe(),
        "case": plan.case_tag,
        "target": plan.target,
        "step_count": plan.n_steps,
        "placements": _schedule_table(plan),
        "recovery": {"coin1": _op_dict(plan.recovery[0]), "coin2": _op_dict(plan.recovery[1])},
        "certification": [record.to_dict()],
        "fidelity": record.min_fidelity,
    }
    return ProtocolReport(cfg, data, None, record.passed)


def _criterion(i: int) -> dict:
    return verify.CRITERIA[i]().to_dict()


def _run_verify_all(cfg: RunConfig) -> ProtocolReport:
    idx = range(len(verify.CRITERIA))
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_criterion, idx))  # map keeps criterion order
    else:
        results = [_criterion(i) for i in idx]
    for r in results:
        log.info("[%s] criterion %d: %s", "PASS" if r["passed"] else "FAIL", r["number"], r["title"])
    data = {"criteria": results, "failed": [r["number"] for r in results if not r["passed"]]}
    return ProtocolReport(cfg, data, None, all(r["passed"] for r in results))


def run(cfg: RunConfig) -> ProtocolReport:
    """Execute a validated config.  Errors propagate; :func:`main` maps them to exit codes."""
    if cfg.protocol in TRANSFERS:
        rep = _run_transfer(cfg)
    elif cfg.protocol in TELEPORTS:
        rep = _run_teleport(cfg)
    elif cfg.protocol == "certify":
        rep = _run_certify(cfg)
    else:
        rep = _run_verify_all(cfg)
    rep.data = {"protocol": cfg.protocol, "parameters": cfg.echo(), **rep.data,
                "verdict": "pass" if rep.verdict else "fail"}
    return rep


# -- output ----------------------------------------------------------------


def _g(v: float) -> str:
    return format(float(v), ".17g")


def trace_rows(trace) -> list:
    rows = []
    for i, state in enumerate(trace or []):
        for lab in sorted(state.amplitudes):
            z = state.amplitudes[lab]
            rows.append([str(i), *(str(c) for c in lab), _g(z.real), _g(z.imag)])
    return rows


def emit_trace(report: ProtocolReport, fmt: str = "csv") -> bytes:
    """Serialize a report: the per-step CSV trace, or the full structured (JSON) report."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(trace_rows(report.trace))
        return buf.getvalue().encode()
    if fmt == "structured":
        data = dict(report.data)
        if report.trace is not None:
            data["trace"] = [
                [[*map(int, lab), *_pair(s.amplitudes[lab])] for lab in sorted(s.amplitudes)]
                for s in report.trace
            ]
        return (json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n").encode()
    raise ConfigError("format must be 'csv' or 'structured'")


def read_trace_csv(text: str, arena: GraphSpec, coin_dims=(2, 2)) -> list:
    """Rebuild the list of per-step states from :func:`emit_trace` CSV output."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    steps: dict = {}
    for row in reader:
        i, pos, c1, c2 = map(int, row[:4])
        steps.setdefault(i, {})[(pos, c1, c2)] = complex(float(row[4]), float(row[5]))
    return [from_amplitudes(arena, coin_dims, steps[i]) for i in sorted(steps)]


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        report = run(cfg)
    except (ConfigError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WalkError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    blob = emit_trace(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "wb") as fh:
            fh.write(blob)
    else:
        sys.stdout.buffer.write(blob)
        sys.stdout.flush()
    print(f"verdict: {report.data['verdict']}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
