"""Command-line driver: parameter sweeps, threshold finding, single-state
evaluation, and figure rendering.

Exit codes are a stable contract: 0 success (no violation for eval),
2 usage error, 3 violation found in eval mode, 4 I/O or input-data error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bell import BellFunctional, CHSH_CLASSICAL_BOUND
from .optimizer import (
    BracketError,
    OptimizerConfig,
    find_threshold,
    maximize_functional,
)
from .plotting import build_sweep_figure, save_figure
from .states import (
    InvariantViolation,
    is_separable_parameter,
    isotropic_state,
    load_density_matrix,
    purity,
    singlet_fraction,
    werner_state,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VIOLATION = 3
EXIT_IO = 4

CSV_HEADER = (
    "param,bell_max,classical_bound,purity,"
    "theta_a,phi_a,theta_b,phi_b,theta_c,phi_c,theta_d,phi_d,"
    "partition_1,partition_2,separable_flag"
)

FAMILY_DOMAIN = {"werner": (-1.0, 1.0), "isotropic": (0.0, 1.0)}
FAMILY_SYMBOL = {"werner": "phi", "isotropic": "p"}


@dataclass(frozen=True)
class SweepConfig:
    family: str
    dim: int
    functional: str
    param_min: float
    param_max: float
    steps: int
    optimizer: OptimizerConfig
    out_path: str
    plot_path: str | None = None

    def __post_init__(self):
        if self.family not in FAMILY_DOMAIN:
            raise ValueError(f"unknown family '{self.family}'")
        lo, hi = FAMILY_DOMAIN[self.family]
        if not (lo <= self.param_min <= self.param_max <= hi):
            raise ValueError(
                f"parameter range [{self.param_min}, {self.param_max}] outside "
                f"the {self.family} domain [{lo}, {hi}]"
            )
        if self.steps < 1:
            raise ValueError("steps must be positive")
        if self.functional == "i3" and self.dim != 3:
            raise ValueError("the i3 functional requires --dim 3")
        if self.dim < 2:
            raise ValueError("subsystem dimension must be at least 2")


@dataclass
class SweepRecord:
    param: float
    bell_max: float
    classical_bound: float
    purity: float
    angles: np.ndarray
    partition_1: str
    partition_2: str
    separable_flag: bool


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _worker_count(n_tasks: int) -> int:
    env = os.environ.get("TOMOBELL_THREADS", "")
    cap = int(env) if env.strip() else (os.cpu_count() or 1)
    return max(1, min(cap, n_tasks))


def _family_state(family: str, d: int, param: float):
    return werner_state(d, param) if family == "werner" else isotropic_state(d, param)


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Maximize the functional at equally spaced parameters; write CSV."""
    params = np.linspace(cfg.param_min, cfg.param_max, cfg.steps)
    two_js = (cfg.dim - 1, cfg.dim - 1)

    def eval_point(param: float) -> SweepRecord:
        rho = _family_state(cfg.family, cfg.dim, param)
        result = maximize_functional(rho, two_js, cfg.functional, cfg.optimizer)
        parts = result.best.partitions
        return SweepRecord(
            param=float(param),
            bell_max=result.best.value,
            classical_bound=CHSH_CLASSICAL_BOUND,
            purity=purity(rho),
            angles=result.best.settings.angles(),
            partition_1=parts[0].encode() if parts else "",
            partition_2=parts[1].encode() if parts else "",
            separable_flag=is_separable_parameter(cfg.family, cfg.dim, param),
        )

    with ThreadPoolExecutor(max_workers=_worker_count(len(params))) as pool:
        records = list(pool.map(eval_point, params))

    write_sweep_csv(cfg.out_path, cfg.family, records)
    if cfg.plot_path:
        emit_plot(cfg.out_path, cfg.plot_path)
    return records


def write_sweep_csv(path, family: str, records: list[SweepRecord]) -> None:
    lines = [f"# family={family} param={FAMILY_SYMBOL[family]}", CSV_HEADER]
    for r in records:
        fields = [_fmt(r.param), _fmt(r.bell_max), _fmt(r.classical_bound), _fmt(r.purity)]
        fields.extend(_fmt(a) for a in r.angles)
        fields.extend([r.partition_1, r.partition_2, "true" if r.separable_flag else "false"])
        lines.append(",".join(fields))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_sweep_csv(path):
    """Parse a sweep CSV back into records plus the comment metadata."""
    meta: dict[str, str] = {}
    records: list[SweepRecord] = []
    header_seen = False
    with open(path, encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    if "=" in token:
                        key, value = token.split("=", 1)
                        meta[key] = value
                continue
            if not header_seen:
                if line != CSV_HEADER:
                    raise ValueError(f"{path}: line {lineno}: unexpected header {line!r}")
                header_seen = True
                continue
            fields = line.split(",")
            if len(fields) != 15:
                raise ValueError(
                    f"{path}: line {lineno}: expected 15 fields, found {len(fields)}"
                )
            try:
                numbers = [float(v) for v in fields[:12]]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric field") from None
            if fields[14] not in ("true", "false"):
                raise ValueError(
                    f"{path}: line {lineno}: separable_flag must be true/false"
                )
            records.append(
                SweepRecord(
                    param=numbers[0],
                    bell_max=numbers[1],
                    classical_bound=numbers[2],
                    purity=numbers[3],
                    angles=np.array(numbers[4:12]),
                    partition_1=fields[12],
                    partition_2=fields[13],
                    separable_flag=fields[14] == "true",
                )
            )
    if not header_seen:
        raise ValueError(f"{path}: missing header line")
    return records, meta


def emit_plot(csv_path, plot_path) -> None:
    """Render the two-panel sweep figure from a CSV file."""
    records, meta = read_sweep_csv(csv_path)
    if not records:
        raise ValueError(f"{csv_path}: no data rows to plot")
    fig = build_sweep_figure(
        [r.param for r in records],
        [r.bell_max for r in records],
        [r.purity for r in records],
        bound=records[0].classical_bound,
        param_label=meta.get("param", "param"),
    )
    save_figure(fig, plot_path)


def run_threshold(args) -> int:
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    bracket = None
    if args.param_min is not None or args.param_max is not None:
        if args.param_min is None or args.param_max is None:
            raise ValueError("--param-min and --param-max must be given together")
        bracket = (args.param_min, args.param_max)
    param = find_threshold(
        args.family, args.dim, args.functional, cfg, bracket=bracket, tol=args.tol
    )
    print(f"threshold {FAMILY_SYMBOL[args.family]} = {param:.6f}")
    q = ""
    if args.family == "isotropic" and args.dim == 3:
        q = singlet_fraction(param)
        print(f"singlet fraction q = {q:.6f}")
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write("family,dim,functional,param,singlet_fraction\n")
            fh.write(
                f"{args.family},{args.dim},{args.functional},{_fmt(param)},"
                f"{_fmt(q) if q != '' else ''}\n"
            )
    return EXIT_OK


def run_eval(args) -> int:
    rho, (d1, d2) = load_density_matrix(args.state_file)
    functional = BellFunctional(args.functional)
    if functional is BellFunctional.I3 and (d1, d2) != (3, 3):
        raise ValueError("the i3 functional requires a 3 x 3 bipartite state")
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    result = maximize_functional(rho, (d1 - 1, d2 - 1), functional, cfg)
    best = result.best
    print(f"bell value: {best.value:.12g}")
    print(f"classical bound: {CHSH_CLASSICAL_BOUND:g}")
    names = ("a", "b", "c", "d")
    dirs = (
        best.settings.dir_a,
        best.settings.dir_b,
        best.settings.dir_c,
        best.settings.dir_d,
    )
    for name, direction in zip(names, dirs):
        print(f"direction {name}: theta={direction.theta:.6f} phi={direction.phi:.6f}")
    if best.partitions:
        print(
            f"partitions: {best.partitions[0].encode()} x {best.partitions[1].encode()}"
        )
    violated = best.value > CHSH_CLASSICAL_BOUND
    print(f"violation: {'yes' if violated else 'no'}")
    return EXIT_VIOLATION if violated else EXIT_OK


def _add_optimizer_flags(parser) -> None:
    parser.add_argument("--restarts", type=int, default=64, help="Nelder-Mead restarts")
    parser.add_argument("--seed", type=int, default=0, help="restart-stream seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tomobell",
        description="Bell-functional maximization for qudit states via "
        "tomographic probabilities and qubit-portraits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="maximize over a parameter grid, write CSV")
    sweep.add_argument("--family", required=True, choices=sorted(FAMILY_DOMAIN))
    sweep.add_argument("--dim", type=int, required=True, help="subsystem dimension d")
    sweep.add_argument("--functional", choices=("chsh", "i3"), default="chsh")
    sweep.add_argument("--param-min", type=float, default=None)
    sweep.add_argument("--param-max", type=float, default=None)
    sweep.add_argument("--steps", type=int, default=21)
    _add_optimizer_flags(sweep)
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--plot", default=None, help="optional figure path (SVG)")

    threshold = sub.add_parser("threshold", help="bisect for the violation threshold")
    threshold.add_argument("--family", required=True, choices=sorted(FAMILY_DOMAIN))
    threshold.add_argument("--dim", type=int, required=True)
    threshold.add_argument("--functional", choices=("chsh", "i3"), default="chsh")
    threshold.add_argument("--param-min", type=float, default=None, help="bracket low")
    threshold.add_argument("--param-max", type=float, default=None, help="bracket high")
    threshold.add_argument("--tol", type=float, default=1e-4, help="parameter tolerance")
    _add_optimizer_flags(threshold)
    threshold.add_argument("--out", default=None, help="optional result CSV path")

    evaluate = sub.add_parser("eval", help="maximize for one state file")
    evaluate.add_argument("--state-file", required=True)
    evaluate.add_argument("--functional", choices=("chsh", "i3"), default="chsh")
    _add_optimizer_flags(evaluate)

    plot = sub.add_parser("plot", help="render the figure for an existing sweep CSV")
    plot.add_argument("--out", required=True, help="input CSV path (sweep output)")
    plot.add_argument("--plot", required=True, help="output figure path (SVG)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            if args.param_min is None:
                args.param_min = FAMILY_DOMAIN[args.family][0]
            if args.param_max is None:
                args.param_max = FAMILY_DOMAIN[args.family][1]
            cfg = SweepConfig(
                family=args.family,
                dim=args.dim,
                functional=args.functional,
                param_min=args.param_min,
                param_max=args.param_max,
                steps=args.steps,
                optimizer=OptimizerConfig(restarts=args.restarts, seed=args.seed),
                out_path=args.out,
                plot_path=args.plot,
            )
            run_sweep(cfg)
            return EXIT_OK
        if args.command == "threshold":
            return run_threshold(args)
        if args.command == "eval":
            try:
                return run_eval(args)
            except (InvariantViolation, ValueError) as exc:
                # state-file content problems are data errors, not usage errors
                if isinstance(exc, InvariantViolation) or args.state_file in str(exc):
                    print(f"error: {exc}", file=sys.stderr)
                    return EXIT_IO
                raise
        if args.command == "plot":
            emit_plot(args.out, args.plot)
            return EXIT_OK
        raise ValueError(f"unknown command {args.command!r}")
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
