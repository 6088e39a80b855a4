"""Command-line front end.

Every run writes a metadata header (tool version, full config, seed,
wall-clock time) followed by a table. CSV output puts the header in ``#``
comment lines and summary values in trailing ``# summary:`` lines; JSON
output is one object validated by ``schema/output.schema.json``.

Seeds: the global ``--seed`` is expanded per task as
``SeedSequence(seed, spawn_key=(n, t))``, so adding or removing N values in
a sweep never changes the streams of the others.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bitseq import MAX_QUBITS, BudgetExceeded
from .circuits import (
    PhaseRandomCircuitSpec,
    dumps_gates,
    gate_count,
    quadratic_cost,
    sample_discrete_gates,
    sample_phase_random_gates,
    unit_cost,
)
from .exact_analysis import eta_asymptotic, eta_exact, mixing_curve, mixing_optimum_closed_form
from .moments import design_threshold, is_exact_design, minimal_exact_r

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3

SCHEMA_PATH = Path(__file__).with_name("schema") / "output.schema.json"
COST_MODELS = {"unit": unit_cost, "quadratic": quadratic_cost}

# defaults that differ per subcommand
_DEFAULTS = {
    "eta": {"n": [1, 2, 3, 4, 5, 6, 7, 8], "t": [2]},
    "design-check": {"n": [4], "t": list(range(2, 16))},
    "decay": {"n": [3, 4, 5, 6], "t": [2]},
    "mixing": {"n": [3], "t": [2]},
    "gatecount": {"n": [16, 32, 64], "t": [2, 4, 8]},
    "circuit-sample": {"n": [4], "t": [2]},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    n: list[int]
    t: list[int]
    r: int | None = None
    samples: int = 1000
    max_T: int = 10
    seed: int = 0
    out: str | None = None
    format: str = "csv"
    exact: bool = False
    extra: dict = field(default_factory=dict)

    def task_seed(self, n: int, t: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.seed, spawn_key=(n, t))


@dataclass
class Table:
    columns: list[str]
    rows: list[dict]
    summary: list[dict] = field(default_factory=list)


def parse_int_list(values: list[str]) -> list[int]:
    """``["3..6"]`` -> [3, 4, 5, 6]; ``["2", "4"]`` -> [2, 4]."""
    out = []
    for v in values:
        for part in v.split(","):
            if ".." in part:
                lo, hi = part.split("..", 1)
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise ConfigError(f"empty range {part!r}")
                out.extend(range(lo, hi + 1))
            elif part:
                out.append(int(part))
    return out


def _num(x, exact: bool):
    """Exact values stay rational strings under --exact, else become floats."""
    if isinstance(x, Fraction) and exact:
        return str(x)
    return float(x)


def _float(x) -> float | None:
    x = float(x)
    return None if math.isnan(x) else x


def _check_n(n: int, low: int = 1) -> None:
    if not low <= n <= MAX_QUBITS:
        raise ConfigError(f"n must be in {low}..{MAX_QUBITS}, got {n}")


def _check_t(t: int, low: int = 1) -> None:
    if t < low:
        raise ConfigError(f"t must be >= {low}, got {t}")


# --- subcommands ------------------------------------------------------------


def cmd_eta(cfg: RunConfig) -> Table:
    rows = []
    for n in cfg.n:
        _check_n(n)
        for t in cfg.t:
            _check_t(t)
            eta = eta_exact(n, t).value
            asym = eta_asymptotic(n, t)
            ratio = Fraction(1 << n) * eta / (t * (t - 1)) if t > 1 else None
            rows.append(
                {
                    "n": n,
                    "t": t,
                    "eta": str(eta),
                    "eta_float": float(eta),
                    "eta_asymptotic": _num(asym, cfg.exact),
                    "ratio": None if ratio is None else _num(ratio, cfg.exact),
                }
            )
    return Table(["n", "t", "eta", "eta_float", "eta_asymptotic", "ratio"], rows)


def _tuple_text(tup) -> str:
    return "(" + ",".join(tup.strs()) + ")"


def cmd_design_check(cfg: RunConfig) -> Table:
    method = cfg.extra.get("method", "exhaustive")
    budget = cfg.extra.get("budget")
    rows = []
    for n in cfg.n:
        _check_n(n)
        for t in cfg.t:
            _check_t(t)
            r_min = minimal_exact_r(n, t, method, budget)
            witness = ""
            if r_min > 1:
                verdict = is_exact_design(n, t, r_min - 1, method, budget)
                a, b = verdict.witness
                witness = f"{_tuple_text(a)}|{_tuple_text(b)}"
            row = {
                "n": n,
                "t": t,
                "minimal_r": r_min,
                "threshold": design_threshold(n, t),
                "floor_log2_t_plus_1": t.bit_length(),
                "witness": witness,
            }
            if cfg.r is not None:
                if not 1 <= cfg.r <= n:
                    raise ConfigError(f"r must be in 1..{n}, got {cfg.r}")
                row["r"] = cfg.r
                row["exact_at_r"] = is_exact_design(n, t, cfg.r, method, budget).is_exact_design
            rows.append(row)
    columns = ["n", "t", "minimal_r", "threshold", "floor_log2_t_plus_1", "witness"]
    if cfg.r is not None:
        columns += ["r", "exact_at_r"]
    return Table(columns, rows)


def cmd_decay(cfg: RunConfig) -> Table:
    from .montecarlo import decay_experiment

    if cfg.samples < 1:
        raise ConfigError("samples must be >= 1")
    if cfg.max_T < 0:
        raise ConfigError("max-t must be >= 0")
    rows, summary = [], []
    for n in cfg.n:
        _check_n(n, 2)
        for t in cfg.t:
            _check_t(t)
            res = decay_experiment(
                n,
                t,
                cfg.max_T,
                cfg.samples,
                cfg.task_seed(n, t),
                phase_average=cfg.extra.get("phase_average", "auto"),
            )
            for p in res.points:
                rows.append(
                    {"n": n, "t": t, "T": p.T, "D": p.distance, "stderr": p.stderr, "in_fit": p.in_fit, "eta": res.eta}
                )
            summary.append(
                {
                    "n": n,
                    "t": t,
                    "alpha": _float(res.alpha),
                    "r_squared": _float(res.r_squared),
                    "fit_points": res.fit_points,
                    "eta_exact": str(eta_exact(n, t).value),
                    "noise_floor": res.noise_floor,
                    "mode": res.mode,
                }
            )
    return Table(["n", "t", "T", "D", "stderr", "in_fit", "eta"], rows, summary)


def cmd_mixing(cfg: RunConfig) -> Table:
    grid = cfg.extra.get("grid", 11)
    if grid < 2:
        raise ConfigError("grid needs at least two points")
    rows, summary = [], []
    for n in cfg.n:
        _check_n(n)
        for t in cfg.t:
            _check_t(t, 2)
            curve = mixing_curve(n, t)
            for i in range(grid):
                p = Fraction(i, grid - 1)
                value = curve(p)
                rows.append({"n": n, "t": t, "p": str(p), "D": str(value), "D_float": float(value)})
            summary.append(
                {
                    "n": n,
                    "t": t,
                    "p_star": str(curve.p_star),
                    "p0_closed_form": str(mixing_optimum_closed_form(n, t)),
                    "D_p_star": _num(curve.d_at_p_star, cfg.exact),
                    "D_1": _num(curve(1), cfg.exact),
                    "improvement": _num(curve.improvement, cfg.exact),
                }
            )
    return Table(["n", "t", "p", "D", "D_float"], rows, summary)


def _loglog_slope(xs: list[int], ys: list[int]) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def cmd_gatecount(cfg: RunConfig) -> Table:
    cost_name = cfg.extra.get("cost", "quadratic")
    cost = COST_MODELS[cost_name]
    rows, summary = [], []
    for t in cfg.t:
        _check_t(t)
        totals = []
        for n in cfg.n:
            if n < 1:
                raise ConfigError(f"n must be >= 1, got {n}")
            gc = gate_count(n, t, cost)
            totals.append(gc.total_elementary)
            rows.append(
                {
                    "n": n,
                    "t": t,
                    "r": gc.r,
                    "supports": math.comb(n, gc.r),
                    "per_size_counts": ";".join(f"{s}:{c}" for s, c in gc.per_size_counts.items()),
                    "total_s_to_r": gc.total_elementary,
                    "total_s_below_r": gc.total_below_r,
                }
            )
        if len(cfg.n) >= 2:
            summary.append(
                {
                    "t": t,
                    "cost": cost_name,
                    "loglog_slope": _loglog_slope(cfg.n, totals),
                    "expected_exponent": t.bit_length(),
                }
            )
    columns = ["n", "t", "r", "supports", "per_size_counts", "total_s_to_r", "total_s_below_r"]
    return Table(columns, rows, summary)


def cmd_circuit_sample(cfg: RunConfig) -> list[tuple[int, int, int, str]]:
    kind = cfg.extra.get("kind", "discrete")
    blocks = []
    for n in cfg.n:
        _check_n(n)
        for t in cfg.t:
            _check_t(t)
            r = cfg.r if cfg.r is not None else design_threshold(n, t)
            if not 1 <= r <= n:
                raise ConfigError(f"r must be in 1..{n}, got {r}")
            rng = np.random.default_rng(cfg.task_seed(n, t))
            if kind == "discrete":
                gates = sample_discrete_gates(n, t, r, rng)
            else:
                gates = sample_phase_random_gates(PhaseRandomCircuitSpec.build(n, r), rng)
            blocks.append((n, t, r, dumps_gates(gates)))
    return blocks


COMMANDS = {
    "eta": cmd_eta,
    "design-check": cmd_design_check,
    "decay": cmd_decay,
    "mixing": cmd_mixing,
    "gatecount": cmd_gatecount,
    "circuit-sample": cmd_circuit_sample,
}


# --- output -----------------------------------------------------------------


def metadata(cfg: RunConfig) -> dict:
    return {
        "tool": "diagdesign",
        "version": __version__,
        "config": asdict(cfg),
        "seed": cfg.seed,
        "wall_clock": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(cfg: RunConfig, result) -> str:
    meta = metadata(cfg)
    if cfg.subcommand == "circuit-sample":
        if cfg.format == "json":
            gates = [
                {"n": n, "t": t, "r": r, "gates": text.splitlines()} for n, t, r, text in result
            ]
            return json.dumps({"metadata": meta, "circuits": gates}, indent=2) + "\n"
        buf = io.StringIO()
        _write_header(buf, meta)
        for n, t, r, text in result:
            buf.write(f"# circuit n={n} t={t} r={r}\n")
            buf.write(text)
        return buf.getvalue()

    if cfg.format == "json":
        return json.dumps({"metadata": meta, "rows": result.rows, "summary": result.summary}, indent=2) + "\n"
    buf = io.StringIO()
    _write_header(buf, meta)
    writer = csv.DictWriter(buf, fieldnames=result.columns, lineterminator="\n")
    writer.writeheader()
    for row in result.rows:
        writer.writerow({k: _cell(row.get(k)) for k in result.columns})
    for item in result.summary:
        buf.write("# summary: " + json.dumps(item, sort_keys=True) + "\n")
    return buf.getvalue()


def _write_header(buf, meta: dict) -> None:
    buf.write(f"# {meta['tool']} {meta['version']}\n")
    buf.write("# config: " + json.dumps(meta["config"], sort_keys=True) + "\n")
    buf.write(f"# seed: {meta['seed']}\n")
    buf.write(f"# wall_clock: {meta['wall_clock']}\n")


def read_config(path: str | Path) -> RunConfig:
    """Recover the RunConfig embedded in a previous output file."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        raw = json.loads(text)["metadata"]["config"]
    else:
        line = next(l for l in text.splitlines() if l.startswith("# config: "))
        raw = json.loads(line[len("# config: "):])
    return RunConfig(**raw)


# --- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diagdesign", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"diagdesign {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--n", nargs="+", help="qubit counts, e.g. 3 4 or 3..6")
        p.add_argument("--t", nargs="+", help="moment orders, e.g. 2 or 2..15")
        p.add_argument("--r", type=int, default=None)
        p.add_argument("--samples", type=int, default=1000)
        p.add_argument("--max-t", dest="max_T", type=int, default=10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--exact", action="store_true", help="print rationals as num/den strings")
        p.add_argument("--replay", default=None, help="rerun the config stored in a previous output")
        return p

    common(sub.add_parser("eta", help="exact diagonal-design distance"))
    p = common(sub.add_parser("design-check", help="minimal exact gate size"))
    p.add_argument("--method", choices=["exhaustive", "threshold"], default="exhaustive")
    p.add_argument("--budget", type=int, default=None)
    p = common(sub.add_parser("decay", help="Monte Carlo decay under brickwork layers"))
    p.add_argument("--phase-average", choices=["auto", "exact", "sampled"], default="auto")
    p = common(sub.add_parser("mixing", help="exact mixing-protocol curve"))
    p.add_argument("--grid", type=int, default=11)
    p = common(sub.add_parser("gatecount", help="controlled-phase gate census"))
    p.add_argument("--cost", choices=sorted(COST_MODELS), default="quadratic")
    p = common(sub.add_parser("circuit-sample", help="emit a sampled gate list"))
    p.add_argument("--kind", choices=["discrete", "continuous"], default="discrete")
    return parser


_EXTRA_KEYS = ("method", "budget", "phase_average", "grid", "cost", "kind")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.replay:
        cfg = read_config(args.replay)
        if cfg.subcommand != args.subcommand:
            raise ConfigError(f"replay file is for {cfg.subcommand!r}, not {args.subcommand!r}")
        cfg.out = args.out
        return cfg
    defaults = _DEFAULTS[args.subcommand]
    n = parse_int_list(args.n) if args.n else list(defaults["n"])
    t = parse_int_list(args.t) if args.t else list(defaults["t"])
    if not n or not t:
        raise ConfigError("empty --n or --t")
    extra = {k: getattr(args, k) for k in _EXTRA_KEYS if getattr(args, k, None) is not None}
    return RunConfig(
        subcommand=args.subcommand,
        n=n,
        t=t,
        r=args.r,
        samples=args.samples,
        max_T=args.max_T,
        seed=args.seed,
        out=args.out,
        format=args.format,
        exact=args.exact,
        extra=extra,
    )


def run(cfg: RunConfig) -> str:
    return render(cfg, COMMANDS[cfg.subcommand](cfg))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        text = run(cfg)
    except BudgetExceeded as exc:
        print(f"diagdesign: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError, OSError) as exc:
        print(f"diagdesign: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
