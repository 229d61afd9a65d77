"""Command-line front end: ``qdecp {sweep,simulate,verify,coeffs}``.

All rates are given in units of kappa. When none of the cavity flags
(--kappa-s, --gamma, --g, --delta) is given the cavity is lossless; once
any of them is given the missing ones default to 0.

Exit codes: 0 ok, 1 usage error, 2 verification failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from qdecp.analytics import sweep_alpha
from qdecp.errors import ContractError
from qdecp.protocol import Classification, EntangledPair, branch_tree_exact, monte_carlo
from qdecp.qdcavity import CavityParams, DegradationModel, scattering_coeffs
from qdecp.verify import run_suites

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3

SWEEP_MODELS = ("ideal", "ratio", "squared", "exact-sim")
SIMULATE_MODELS = ("ideal", "exact-sim", "monte-carlo")
ALL_MODELS = ("ideal", "ratio", "squared", "exact-sim", "monte-carlo")


class UsageError(Exception):
    pass


def fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".12g")


def jnum(x: float | None) -> float | None:
    return None if x is None else float(fmt(x))


@dataclass
class RunConfig:
    alpha: float | None = None
    alpha_min: float | None = None
    alpha_max: float | None = None
    steps: int = 99
    spacing: str = "linear"
    rounds: int = 5
    kappa_s: float | None = None
    gamma: float | None = None
    g: float | None = None
    delta: float | None = None
    model: str = "ideal"
    trials: int | None = None
    seed: int = 0
    format: str = "csv"
    out: str | None = None

    def validate(self) -> RunConfig:
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise UsageError(f"--alpha must lie in (0, 1), got {self.alpha}")
        if self.steps < 1:
            raise UsageError("--steps must be >= 1")
        lo, hi = self._bounds()
        if not 0.0 < lo <= hi < 1.0:
            raise UsageError("need 0 < alpha-min <= alpha-max < 1")
        if self.rounds < 1:
            raise UsageError("--rounds must be >= 1")
        for name in ("kappa_s", "gamma", "g"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be >= 0")
        if self.model not in ALL_MODELS:
            raise UsageError(f"unknown model {self.model!r}")
        if self.spacing not in ("linear", "angle"):
            raise UsageError(f"unknown spacing {self.spacing!r}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.trials is not None and self.trials < 1:
            raise UsageError("--trials must be >= 1")
        return self

    def cavity(self) -> CavityParams | None:
        vals = (self.kappa_s, self.gamma, self.g, self.delta)
        if all(v is None for v in vals):
            return None
        k, gm, g, d = (0.0 if v is None else float(v) for v in vals)
        return CavityParams.resonant(kappa_s=k, gamma=gm, g=g, delta=d)

    def _bounds(self) -> tuple[float, float]:
        lo = 0.01 if self.alpha_min is None else self.alpha_min
        hi = 0.99 if self.alpha_max is None else self.alpha_max
        return lo, hi

    def grid(self) -> list[float]:
        if self.alpha is not None:
            return [self.alpha]
        if self.spacing == "angle":
            # alpha = sin(theta). Without explicit bounds theta_k = k*pi/(2(steps+1)),
            # which is symmetric under alpha <-> sqrt(1 - alpha^2) and hits pi/4
            # exactly for odd step counts.
            if self.alpha_min is None and self.alpha_max is None:
                n = self.steps
                return [math.sin(k * math.pi / (2 * (n + 1))) for k in range(1, n + 1)]
            lo, hi = (math.asin(v) for v in self._bounds())
            return [math.sin(t) for t in np.linspace(lo, hi, self.steps)]
        lo, hi = self._bounds()
        return [float(a) for a in np.linspace(lo, hi, self.steps)]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        return cls.from_dict(json.loads(text))


def _records_to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else ("" if v is None else v) for v in row])
    return buf.getvalue()


def _records_to_json(header: list[str], rows: list[list], extra: dict | None = None) -> str:
    recs = [{h: (jnum(v) if isinstance(v, float) else v) for h, v in zip(header, row)}
            for row in rows]
    payload = recs if extra is None else {**extra, "records": recs}
    return json.dumps(payload, indent=2) + "\n"


def render_sweep(cfg: RunConfig) -> str:
    if cfg.model not in SWEEP_MODELS:
        raise UsageError(f"sweep supports models {SWEEP_MODELS}, got {cfg.model!r}")
    model = DegradationModel(cfg.model)
    reports = sweep_alpha(cfg.grid(), cfg.rounds, cfg.cavity(), model)
    header = ["alpha", "model", "K", "P_K", "P_cum"]
    rows = []
    for rep in reports:
        cum = 0.0
        for k, p in rep.per_round:
            cum += p
            rows.append([rep.alpha, cfg.model, k, p, cum])
    if cfg.format == "csv":
        return _records_to_csv(header, rows)
    return _records_to_json(header, rows)


def render_simulate(cfg: RunConfig) -> str:
    if cfg.model not in SIMULATE_MODELS:
        raise UsageError(f"simulate supports models {SIMULATE_MODELS}, got {cfg.model!r}")
    if cfg.alpha is None:
        raise UsageError("simulate needs --alpha")
    pair = EntangledPair.from_alpha(cfg.alpha)
    cavity = cfg.cavity()
    coeffs = None if cavity is None or cfg.model == "ideal" else scattering_coeffs(cavity)
    extra = {"alpha": jnum(cfg.alpha), "model": cfg.model, "rounds": cfg.rounds}

    if cfg.model == "monte-carlo":
        if cfg.trials is None:
            raise UsageError("monte-carlo mode needs --trials")
        mc = monte_carlo(pair, cfg.rounds, coeffs, cfg.trials, cfg.seed)
        header = ["K", "P_success", "P_recycle", "P_loss",
                  "se_success", "se_recycle", "se_loss", "P_cum"]
        freqs = [mc.frequency(c) for c in (mc.success, mc.recycle, mc.loss)]
        errs = [mc.stderr(c) for c in (mc.success, mc.recycle, mc.loss)]
        rows, cum = [], 0
        for i in range(cfg.rounds):
            cum += mc.success[i]
            rows.append([i + 1, freqs[0][i], freqs[1][i], freqs[2][i],
                         errs[0][i], errs[1][i], errs[2][i], cum / mc.trials])
        extra.update(trials=mc.trials, seed=mc.seed)
        if cfg.format == "csv":
            return f"# seed={mc.seed} trials={mc.trials}\n" + _records_to_csv(header, rows)
        return _records_to_json(header, rows, extra)

    tree = branch_tree_exact(pair, cfg.rounds, coeffs)
    header = ["K", "P_success", "P_recycle", "P_loss", "fidelity", "P_cum"]
    rows, cum = [], 0.0
    for d in range(1, cfg.rounds + 1):
        s = tree.success_mass(d)
        cum += s
        rows.append([d, s, tree.mass(d, Classification.RECYCLE),
                     tree.mass(d, Classification.LOSS), tree.success_fidelity(d), cum])
    if cfg.format == "csv":
        return _records_to_csv(header, rows)
    return _records_to_json(header, rows, extra)


def render_coeffs(cfg: RunConfig) -> str:
    c = scattering_coeffs(cfg.cavity() or CavityParams())
    header = ["name", "re", "im", "abs"]
    rows = [[k, float(v.real), float(v.imag), abs(v)] for k, v in c.as_dict().items()]
    if cfg.format == "csv":
        return _records_to_csv(header, rows)
    return _records_to_json(header, rows)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON RunConfig file; explicit flags override it")
    p.add_argument("--dump-config", action="store_true",
                   help="print the resolved config as JSON and exit")
    p.add_argument("--alpha", type=float)
    p.add_argument("--alpha-min", type=float)
    p.add_argument("--alpha-max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--spacing", choices=("linear", "angle"),
                   help="grid in alpha (linear) or in theta with alpha = sin(theta)")
    p.add_argument("--rounds", type=int, help="number of concentration rounds K (default 5)")
    p.add_argument("--kappa-s", dest="kappa_s", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--delta", type=float, help="common detuning of cavity and trion from the probe")
    p.add_argument("--model", choices=ALL_MODELS)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdecp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_run_flags(sub.add_parser("sweep", help="success probability versus alpha"))
    _add_run_flags(sub.add_parser("simulate", help="state-vector or Monte Carlo run at one alpha"))
    _add_run_flags(sub.add_parser("coeffs", help="print scattering coefficients"))
    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--tolerance", type=float, help="override every suite tolerance")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = RunConfig.from_json(fh.read()).to_dict()
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            base[f.name] = v
    return RunConfig.from_dict(base).validate()


def _emit(text: str, out: str | None) -> int:
    if out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"qdecp: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_verify(tolerance: float | None = None, interaction=None) -> int:
    results = run_suites(tolerance, interaction)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name:<22} max_err={r.max_error:.3e} tol={r.tolerance:.1e}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


RENDERERS = {"sweep": render_sweep, "simulate": render_simulate, "coeffs": render_coeffs}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "verify":
        return cmd_verify(args.tolerance)
    try:
        cfg = config_from_args(args)
        if args.dump_config:
            sys.stdout.write(cfg.to_json() + "\n")
            return EXIT_OK
        text = RENDERERS[args.command](cfg)
    except OSError as exc:
        print(f"qdecp: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ContractError, TypeError, ValueError) as exc:
        print(f"qdecp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return _emit(text, cfg.out)


if __name__ == "__main__":
    sys.exit(main())
