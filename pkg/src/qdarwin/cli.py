"""Command-line experiment driver.

    qdarwin pip --n-env 10 --overlap 0.5 --out curve.csv
    qdarwin redundancy --n-env 10 --overlap 0.5 --delta 0.1
    qdarwin foundations --seed 0
    qdarwin collide --n-env 12 --collision-angle 0.785398
    qdarwin scramble --n-env 8 --scramble-rounds 200 --seed 42
    qdarwin random --n-env 10 --seed 3

Flags may also come from ``--config FILE`` holding ``key = value`` lines
(keys are the long flag names, with or without dashes); command-line flags
win.  Output goes to ``--out`` or stdout.  Exit codes: 0 ok, 2 bad config,
3 capacity exceeded, 4 degenerate system, 5 foundations regression.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import dynamics, foundations, infotheory
from .errors import CapacityExceeded, DegenerateSystem, NeverReached, QDarwinError
from .hilbert import SubsystemLayout, partial_trace

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_DEGENERATE, EXIT_REGRESSION = 0, 2, 3, 4, 5

SUBCOMMANDS = ("pip", "redundancy", "foundations", "collide", "scramble", "random")


@dataclass
class ExperimentConfig:
    command: str
    n_env: int = 10
    alpha: float = 1 / math.sqrt(2)
    overlap: float = 0.0
    delta: float = infotheory.DEFAULT_DELTA
    seed: int = 0
    samples_per_size: int = infotheory.DEFAULT_MC_SAMPLES
    max_exhaustive: int = infotheory.DEFAULT_MAX_EXHAUSTIVE
    scramble_rounds: int = 200
    collision_angle: float = math.pi / 4
    out: str = "-"
    workers: int = 1
    inject_fault: bool = False

    def validate(self) -> None:
        if self.n_env < 1:
            raise ValueError("--n-env must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("--alpha must lie in [0, 1]")
        if not 0.0 <= self.overlap <= 1.0:
            raise ValueError("--overlap must lie in [0, 1]")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("--delta must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("--seed must be a 64-bit unsigned integer")
        if self.samples_per_size < 1 or self.max_exhaustive < 1:
            raise ValueError("--samples-per-size and --max-exhaustive must be >= 1")
        if self.scramble_rounds < 0:
            raise ValueError("--scramble-rounds must be >= 0")
        if self.workers < 1:
            raise ValueError("--workers must be >= 1")
        if self.command == "collide" and not 0.0 < self.collision_angle <= math.pi / 2:
            raise ValueError("--collision-angle must lie in (0, pi/2]")
        if self.command == "scramble" and self.n_env < 2:
            raise ValueError("scrambling needs --n-env >= 2")

    def echo(self) -> str:
        skip = {"out", "workers", "inject_fault"}
        return " ".join(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}"
                        for k, v in asdict(self).items() if k not in skip)


def fmt(x: float) -> str:
    s = f"{x:.12f}"
    return "0.000000000000" if s == "-0.000000000000" else s


def _round(x: float, digits: int = 12) -> float:
    return round(float(x), digits) + 0.0


# -- state builders ----------------------------------------------------------

def _beta(cfg: ExperimentConfig) -> float:
    return math.sqrt(max(0.0, 1.0 - cfg.alpha**2))


def branching(cfg: ExperimentConfig):
    spec = dynamics.BranchSpec((cfg.alpha, _beta(cfg)), cfg.n_env, 2, cfg.overlap)
    desc = f"branching(alpha={cfg.alpha!r},overlap={cfg.overlap!r},n_env={cfg.n_env})"
    return dynamics.build_branching_state(spec), desc


def _curve(state, cfg: ExperimentConfig) -> infotheory.PartialInfoCurve:
    return infotheory.partial_information_plot(
        state, max_exhaustive=cfg.max_exhaustive, mc_samples=cfg.samples_per_size,
        seed=cfg.seed, workers=cfg.workers)


def curve_csv(curve: infotheory.PartialInfoCurve, cfg: ExperimentConfig, desc: str,
              trailer: list[str] = ()) -> str:
    lines = [f"# H_S={fmt(curve.system_entropy)} seed={cfg.seed} state={desc}",
             f"# config: {cfg.echo()}",
             "m,f,samples,I_mean,I_std,I_min,I_max"]
    for m, f, n, mean, std, lo, hi in curve.rows():
        lines.append(",".join([str(m), fmt(f), str(n), fmt(mean), fmt(std), fmt(lo), fmt(hi)]))
    lines += list(trailer)
    return "\n".join(lines) + "\n"


def _plateau_line(curve, label="plateau_deviation") -> list[str]:
    if curve.n_env < 5:
        return []
    return [f"# {label}={fmt(infotheory.plateau_deviation(curve))}"]


# -- subcommands -------------------------------------------------------------

def cmd_pip(cfg: ExperimentConfig) -> tuple[str, int]:
    state, desc = branching(cfg)
    curve = _curve(state, cfg)
    return curve_csv(curve, cfg, desc, _plateau_line(curve)), EXIT_OK


def cmd_scramble(cfg: ExperimentConfig) -> tuple[str, int]:
    state, desc = branching(cfg)
    before = _curve(state, cfg)
    scrambled = dynamics.scramble_environment(
        state, dynamics.ScrambleConfig(cfg.scramble_rounds, cfg.seed))
    curve = _curve(scrambled, cfg)
    trailer = _plateau_line(curve) + _plateau_line(before, "plateau_deviation_unscrambled")
    desc = f"scrambled({desc},rounds={cfg.scramble_rounds})"
    return curve_csv(curve, cfg, desc, trailer), EXIT_OK


def cmd_random(cfg: ExperimentConfig) -> tuple[str, int]:
    state = dynamics.haar_random_state(SubsystemLayout.build(cfg.n_env), cfg.seed)
    curve = _curve(state, cfg)
    desc = f"haar(n_env={cfg.n_env})"
    return curve_csv(curve, cfg, desc, _plateau_line(curve)), EXIT_OK


def cmd_redundancy(cfg: ExperimentConfig) -> tuple[str, int]:
    state, _ = branching(cfg)
    curve = _curve(state, cfg)
    try:
        res = infotheory.redundancy(curve, cfg.delta)
    except DegenerateSystem as exc:
        print(f"error: {exc}", file=sys.stderr)
        doc = {"error": "degenerate_system", "n_env": cfg.n_env,
               "entropy_system_bits": _round(curve.system_entropy), "seed": cfg.seed}
        return json.dumps(doc, indent=2) + "\n", EXIT_DEGENERATE
    doc = {"n_env": res.n_env, "delta": cfg.delta,
           "entropy_system_bits": _round(res.system_entropy), "m_delta": res.m_delta,
           "f_delta": _round(res.f_delta), "redundancy": _round(res.redundancy),
           "seed": cfg.seed}
    return json.dumps(doc, indent=2) + "\n", EXIT_OK


def linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope, intercept and coefficient of determination."""
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def collision_redundancy(cfg: ExperimentConfig) -> list[tuple[int, int, float, float]]:
    """(t, m_delta, R_delta, H_S) after each collision t = 1..n_env."""
    system = dynamics.StateVector.single([cfg.alpha, _beta(cfg)])
    schedule = dynamics.CollisionSchedule(cfg.n_env, cfg.collision_angle)
    rows = []
    for t, state in enumerate(dynamics.iter_collisions(system, schedule), start=1):
        curve = _curve(state, cfg)
        res = infotheory.redundancy(curve, cfg.delta)
        rows.append((t, res.m_delta, res.redundancy, curve.system_entropy))
    return rows


def cmd_collide(cfg: ExperimentConfig) -> tuple[str, int]:
    rows = collision_redundancy(cfg)
    t = np.array([r[0] for r in rows], dtype=float)
    red = np.array([r[2] for r in rows])
    lines = [f"# seed={cfg.seed} state=collision(alpha={cfg.alpha!r},"
             f"angle={cfg.collision_angle!r},steps={cfg.n_env})",
             f"# config: {cfg.echo()}",
             "t,m_delta,R_delta,H_S"]
    lines += [f"{ti},{m},{fmt(r)},{fmt(h)}" for ti, m, r, h in rows]
    if len(rows) >= 2:
        slope, intercept, r2 = linear_fit(t, red)
        lines.append(f"# fit: slope={fmt(slope)} intercept={fmt(intercept)} r2={fmt(r2)}")
    return "\n".join(lines) + "\n", EXIT_OK


def _residual(x: float) -> float:
    return float(f"{x:.3e}")


def foundations_report(cfg: ExperimentConfig, born_max: int = 20, n_envariance: int = 100,
                       n_copier: int = 2000,
                       n_repeat: int = 1000) -> dict:
    checks = []
    sign = -1.0 if cfg.inject_fault else 1.0
    suite = foundations.envariance_suite(n_envariance, cfg.seed, counter_sign=sign)
    for kind in ("swap", "phase"):
        worst = max(1.0 - row[f"{kind}_fidelity"] for row in suite)
        checks.append({"name": f"envariance_{kind}", "trials": len(suite),
                       "passed": bool(worst <= foundations.ENVARIANCE_TOL),
                       "worst_residual": _residual(worst)})

    rng = np.random.default_rng([cfg.seed, 1])
    worst = 0.0
    for _ in range(n_repeat):
        u, v, copier = foundations.random_repeatable_triple(rng)
        pair = foundations.record_pair(u, v, copier)
        worst = max(worst, abs(pair.overlap_sys * (1 - pair.overlap_rec)))
    checks.append({"name": "repeatability_identity", "trials": n_repeat,
                   "passed": bool(worst <= 1e-10), "worst_residual": _residual(worst)})

    u = np.array([1.0, 0.0], dtype=np.complex128)
    v = np.array([0.6, 0.8], dtype=np.complex128)
    floor = foundations.copier_residual_floor(0.6)
    found = foundations.copier_search(u, v, n_copier, cfg.seed)
    checks.append({"name": "copier_floor", "trials": n_copier,
                   "passed": bool(found >= floor - 1e-12), "best_residual": _round(found),
                   "floor": _round(floor)})

    rows, worst, exact = [], 0.0, True
    for mu in range(1, born_max + 1):
        for nu in range(1, born_max + 1):
            spec = foundations.FinegrainSpec(mu, nu)
            p_up, p_down = foundations.born_probabilities(spec)
            exact &= (p_up, p_down) == (Fraction(mu, mu + nu), Fraction(nu, mu + nu))
            diag = partial_trace(foundations.finegrain_state(spec, verify="none"), (0,)).matrix
            res = max(abs(diag[0, 0].real - float(p_up)), abs(diag[1, 1].real - float(p_down)))
            worst = max(worst, res)
            rows.append({"mu": mu, "nu": nu, "p_up": str(p_up), "p_down": str(p_down),
                         "residual": _residual(res)})
    checks.append({"name": "born_finegraining", "trials": len(rows),
                   "passed": bool(exact and worst <= 1e-12), "worst_residual": _residual(worst),
                   "rows": rows})
    return {"seed": cfg.seed, "all_passed": all(c["passed"] for c in checks), "checks": checks}


def cmd_foundations(cfg: ExperimentConfig) -> tuple[str, int]:
    report = foundations_report(cfg)
    code = EXIT_OK if report["all_passed"] else EXIT_REGRESSION
    if code != EXIT_OK:
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        print(f"error: foundations checks failed: {', '.join(failed)}", file=sys.stderr)
    return json.dumps(report, indent=2) + "\n", code


COMMANDS = {"pip": cmd_pip, "redundancy": cmd_redundancy, "foundations": cmd_foundations,
            "collide": cmd_collide, "scramble": cmd_scramble, "random": cmd_random}


# -- argument handling -------------------------------------------------------

def read_config_file(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of 'key = value' defaults")
    common.add_argument("--n-env", type=int, help="environment subsystems (max steps for collide)")
    common.add_argument("--alpha", type=float, help="|alpha|; beta follows from normalization")
    common.add_argument("--overlap", type=float, help="record overlap c in [0, 1]")
    common.add_argument("--delta", type=float, help="information deficit")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples-per-size", type=int,
                        help="Monte-Carlo fragments per size when enumeration is too large")
    common.add_argument("--max-exhaustive", type=int,
                        help="enumerate all fragments of a size up to this many")
    common.add_argument("--scramble-rounds", type=int)
    common.add_argument("--collision-angle", type=float, help="per-collision record angle")
    common.add_argument("--workers", type=int, help="threads for fragment evaluation")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--inject-fault", action="store_true", default=None,
                        help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="qdarwin", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "pip": "partial-information plot of a branching state (CSV)",
        "redundancy": "redundancy R_delta of a branching state (JSON)",
        "foundations": "envariance, repeatability and Born-rule checks (JSON)",
        "collide": "redundancy growth in the collision model (CSV)",
        "scramble": "partial-information plot after environment scrambling (CSV)",
        "random": "partial-information plot of a Haar-random state (CSV)",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


_FIELD_TYPES = {"n_env": int, "alpha": float, "overlap": float, "delta": float, "seed": int,
                "samples_per_size": int, "max_exhaustive": int, "scramble_rounds": int,
                "collision_angle": float, "out": str, "workers": int}


def parse_config(argv: list[str] | None) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    values: dict = {}
    if args.config:
        for key, raw in read_config_file(args.config).items():
            if key not in _FIELD_TYPES:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _FIELD_TYPES[key](raw)
    for key in _FIELD_TYPES:
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    cfg = ExperimentConfig(command=args.command, inject_fault=bool(args.inject_fault), **values)
    cfg.validate()
    return cfg


def write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text, code = COMMANDS[cfg.command](cfg)
    except CapacityExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except NeverReached as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except QDarwinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_output(text, cfg.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
