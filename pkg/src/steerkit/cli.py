"""Command-line front end: state construction, simulated experiments,
quadric fitting, monogamy reports, and plot-ready CSV/JSON exports.

Angles are degrees on the command line and radians in JSON config files.
All randomness flows from a single --seed; when the flag is absent a seed
is drawn from system entropy and logged so the run can be reproduced.
"""

from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fitquad, monogamy, qstate, steer, tomosim

EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_IO = 4

TABLE_S1_ROWS = [
    ("a", np.pi / 2, 0.0),
    ("b", np.pi / 2, 0.187 * np.pi),
    ("c", np.pi / 2, 0.215 * np.pi),
    ("d", np.pi / 2, np.pi / 4),
    ("e", np.pi / 2, 0.285 * np.pi),
    ("f", np.pi / 2, 0.313 * np.pi),
    ("g", np.pi / 2, np.pi / 2),
    ("h", np.pi / 4, np.pi / 4),
    ("i", np.pi / 6, np.pi / 4),
    ("j", np.pi / 8, np.pi / 4),
    ("k", np.pi / 12, np.pi / 4),
    ("l", None, None),  # mixed W-class state
]

CLOUD_HEADER = ["dir_x", "dir_y", "dir_z", "bx", "by", "bz", "err_x", "err_y", "err_z"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Validated parameters of one simulated experiment."""

    rho: np.ndarray
    state_label: str
    scheme: str
    directions: int
    events: int
    seed: int
    noise: float
    efficiencies: tuple[float, float]

    @staticmethod
    def from_json(path: str) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        rho, label = _state_from_config(raw.get("state", {}))
        seed = raw.get("seed")
        if seed is None:
            seed = secrets.randbits(32)
            print(f"no seed in config; using seed {seed}", file=sys.stderr)
        return ExperimentConfig(
            rho=rho,
            state_label=label,
            scheme=raw.get("scheme", "uniform"),
            directions=int(raw.get("directions", 1000)),
            events=int(raw.get("events", 50000)),
            seed=int(seed),
            noise=float(raw.get("noise", 0.0)),
            efficiencies=tuple(raw.get("efficiencies", (1.0, 1.0))),
        )


def _state_from_config(spec: dict) -> tuple[np.ndarray, str]:
    """State from a JSON config block (angles in radians)."""
    kind = spec.get("kind")
    if kind == "family":
        a, b = float(spec["alpha"]), float(spec["beta"])
        return qstate.density_from_ket(qstate.family_state(a, b)), f"family({a:.6g},{b:.6g})"
    if kind == "two-qubit":
        g = float(spec["gamma"])
        return qstate.density_from_ket(qstate.pure_two_qubit(g)), f"two-qubit({g:.6g})"
    if kind == "mixed-w":
        return qstate.mixed_w_state(), "mixed-w"
    if kind == "bell-diagonal":
        p = spec["weights"]
        return qstate.bell_diagonal(p), f"bell-diagonal{tuple(p)}"
    raise ConfigError(f"unknown state kind {kind!r}")


def _add_state_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--family", nargs=2, type=float, metavar=("ALPHA", "BETA"),
                       help="three-qubit family state, angles in degrees")
    group.add_argument("--two-qubit", type=float, metavar="GAMMA",
                       help="pure two-qubit state cos(g)|01> + sin(g)|10>, degrees")
    group.add_argument("--mixed-w", action="store_true",
                       help="equal mixture of the two W-class states chi1, chi2")
    group.add_argument("--bell-diagonal", nargs=4, type=float,
                       metavar=("P1", "P2", "P3", "P4"),
                       help="Bell-diagonal weights over (psi-, psi+, phi-, phi+)")


def _state_from_args(args) -> tuple[np.ndarray, str]:
    if args.family is not None:
        a, b = np.deg2rad(args.family)
        return qstate.density_from_ket(qstate.family_state(a, b)), \
            f"family({args.family[0]:g}deg,{args.family[1]:g}deg)"
    if args.two_qubit is not None:
        g = np.deg2rad(args.two_qubit)
        return qstate.density_from_ket(qstate.pure_two_qubit(g)), \
            f"two-qubit({args.two_qubit:g}deg)"
    if args.mixed_w:
        return qstate.mixed_w_state(), "mixed-w"
    if args.bell_diagonal is not None:
        return qstate.bell_diagonal(args.bell_diagonal), \
            f"bell-diagonal{tuple(args.bell_diagonal)}"
    raise ConfigError("no state specified; use --family/--two-qubit/--mixed-w/--bell-diagonal")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = secrets.randbits(32)
    print(f"--seed not given; using seed {seed}", file=sys.stderr)
    return seed


def _directions(scheme: str, n: int, rng: np.random.Generator) -> tomosim.DirectionSet:
    if scheme == "uniform":
        return tomosim.uniform_directions(n, rng)
    if scheme == "icosahedron":
        return tomosim.icosahedron_directions(tomosim.random_rotation(rng))
    if scheme == "icosahedron-9":
        ico = tomosim.icosahedron_directions(tomosim.random_rotation(rng))
        return tomosim.subset_nine(ico, rng)
    raise ConfigError(f"unknown scheme {scheme!r}")


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_cloud_csv(path: Path, points: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CLOUD_HEADER)
        for p in points:
            writer.writerow(
                [repr(float(v)) for v in (*p.direction, *p.estimate.bloch_hat,
                                          *p.estimate.stderr)]
            )


def _marginal_ellipsoids(rho: np.ndarray) -> dict[str, steer.SteeringEllipsoid]:
    n = qstate.num_qubits(rho.shape[0])
    out = {}
    if n == 2:
        out["B|A"] = steer.ellipsoid(qstate.pauli_decompose(rho))
    else:
        out["B|A"] = steer.ellipsoid(
            qstate.pauli_decompose(qstate.partial_trace(rho, [0, 1])))
        out["C|A"] = steer.ellipsoid(
            qstate.pauli_decompose(qstate.partial_trace(rho, [0, 2])))
    return out


def cmd_ellipsoid(args) -> int:
    rho, label = _state_from_args(args)
    out_dir = Path(args.out)
    ells = _marginal_ellipsoids(rho)
    payload = {
        "state": label,
        "ellipsoids": {key: ell.to_dict() for key, ell in ells.items()},
    }
    _write_json(out_dir / "ellipsoid.json", payload)
    if args.mesh:
        from .plots import _ellipsoid_mesh
        for key, ell in ells.items():
            if ell.rank < 3:
                continue
            mesh = _ellipsoid_mesh(ell, n=30).reshape(3, -1).T
            path = out_dir / f"mesh_{key.replace('|', '_')}.csv"
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["x", "y", "z"])
                writer.writerows([[repr(float(v)) for v in row] for row in mesh])
    if args.plot:
        from . import plots
        for key, ell in ells.items():
            plots.save_cloud_figure(
                np.empty((0, 3)), ell,
                out_dir / f"ellipsoid_{key.replace('|', '_')}.png",
                title=f"{label} ellipsoid {key}",
            )
    for key, ell in ells.items():
        print(f"{key}: volume={ell.volume:.6f} rank={ell.rank}")
    return 0


def _fit_cloud(cloud: np.ndarray):
    """Guarded fit + refinement; returns (fit-or-None, diagnostics)."""
    diag = fitquad.degenerate_guard(cloud)
    if diag.verdict != "full":
        return None, diag
    f = fitquad.fit(cloud)
    return fitquad.refine(cloud, f), diag


def _fit_payload(fit, diag) -> dict:
    payload = {"verdict": diag.verdict,
               "cov_eigvals": [float(x) for x in diag.cov_eigvals]}
    if fit is not None:
        payload.update(fit.to_dict())
    return payload


def cmd_simulate(args) -> int:
    if args.config:
        cfg = ExperimentConfig.from_json(args.config)
    else:
        rho, label = _state_from_args(args)
        cfg = ExperimentConfig(
            rho=rho, state_label=label, scheme=args.scheme,
            directions=args.directions, events=args.events,
            seed=_resolve_seed(args), noise=args.noise,
            efficiencies=tuple(args.efficiencies),
        )
    out_dir = Path(args.out)
    rng = np.random.default_rng(cfg.seed)
    dirs = _directions(cfg.scheme, cfg.directions, rng)
    result = tomosim.run_experiment(
        cfg.rho, dirs, cfg.events, rng,
        noise=cfg.noise, efficiencies=cfg.efficiencies,
    )
    summary = {
        "state": cfg.state_label, "scheme": cfg.scheme, "seed": cfg.seed,
        "events": cfg.events, "noise": cfg.noise, "fits": {},
    }
    analytic = _marginal_ellipsoids(cfg.rho)
    for party, points in result.parties.items():
        _write_cloud_csv(out_dir / f"cloud_{party}.csv", points)
        cloud = result.cloud(party)
        fit, diag = _fit_cloud(cloud)
        payload = _fit_payload(fit, diag)
        payload["analytic"] = analytic[f"{party}|A"].to_dict()
        _write_json(out_dir / f"fit_{party}.json", payload)
        summary["fits"][party] = {
            "verdict": diag.verdict,
            "r_squared": None if fit is None else fit.r_squared,
            "fitted_volume": None if fit is None or fit.recovered is None
            else fit.recovered.volume,
            "analytic_volume": analytic[f"{party}|A"].volume,
        }
        if args.plot:
            from . import plots
            plots.save_cloud_figure(
                cloud, None if fit is None else fit.recovered,
                out_dir / f"cloud_{party}.png",
                title=f"{cfg.state_label} steered cloud {party}|A",
            )
    if qstate.num_qubits(cfg.rho.shape[0]) == 3:
        rep = monogamy.report(cfg.rho)
        _write_json(out_dir / "monogamy.json", rep.to_dict())
        summary["monogamy"] = rep.to_dict()
    _write_json(out_dir / "summary.json", summary)
    print(json.dumps(summary["fits"], indent=2, sort_keys=True))
    return 0


def cmd_fit(args) -> int:
    try:
        rows = np.genfromtxt(args.cloud, delimiter=",", names=True)
    except OSError as exc:
        print(f"cannot read {args.cloud}: {exc}", file=sys.stderr)
        return EXIT_IO
    names = rows.dtype.names
    if names and {"bx", "by", "bz"} <= set(names):
        cloud = np.column_stack([rows["bx"], rows["by"], rows["bz"]])
    elif names and {"x", "y", "z"} <= set(names):
        cloud = np.column_stack([rows["x"], rows["y"], rows["z"]])
    else:
        print("cloud CSV must have bx,by,bz or x,y,z columns", file=sys.stderr)
        return EXIT_CONFIG
    fit, diag = _fit_cloud(cloud)
    out_dir = Path(args.out)
    _write_json(out_dir / "fit.json", _fit_payload(fit, diag))
    if fit is None:
        print(f"cloud verdict: {diag.verdict}; fit skipped", file=sys.stderr)
        return EXIT_DEGENERATE
    if args.plot:
        from . import plots
        plots.save_cloud_figure(cloud, fit.recovered, out_dir / "fit.png")
    vol = None if fit.recovered is None else fit.recovered.volume
    print(f"R^2={fit.r_squared:.6f} volume={vol}")
    return 0


def cmd_monogamy(args) -> int:
    out_dir = Path(args.out)
    if args.sweep:
        n = args.sweep
        grid = np.linspace(0.0, np.pi / 2, n)
        path = out_dir / "monogamy_sweep.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        rows_for_plot = []
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["alpha", "beta", "v_ba", "v_ca",
                             "pure_residual", "mixed_residual"])
            for a in grid:
                for b in grid:
                    rho = qstate.density_from_ket(qstate.family_state(a, b))
                    v_ba, v_ca = monogamy.volumes(rho)
                    writer.writerow([
                        repr(float(a)), repr(float(b)), repr(v_ba), repr(v_ca),
                        repr(monogamy.pure_monogamy_residual(v_ba, v_ca)),
                        repr(monogamy.mixed_monogamy_residual(v_ba, v_ca)),
                    ])
                    rows_for_plot.append(("", v_ba, v_ca))
        if args.plot:
            from . import plots
            plots.save_monogamy_figure(rows_for_plot, out_dir / "monogamy_sweep.png")
        print(f"wrote {path}")
        return 0
    rho, label = _state_from_args(args)
    if qstate.num_qubits(rho.shape[0]) != 3:
        print("monogamy requires a three-qubit state", file=sys.stderr)
        return EXIT_CONFIG
    rep = monogamy.report(rho)
    _write_json(out_dir / "monogamy.json", rep.to_dict())
    if args.plot:
        from . import plots
        plots.save_monogamy_figure([(label, rep.v_ba, rep.v_ca)],
                                   out_dir / "monogamy.png")
    print(json.dumps(rep.to_dict(), indent=2, sort_keys=True))
    return 0


def _table_state(key: str, alpha, beta) -> np.ndarray:
    if key == "l":
        return qstate.mixed_w_state()
    return qstate.density_from_ket(qstate.family_state(alpha, beta))


def cmd_table_s1(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = _resolve_seed(args) if args.simulate else None
    master = np.random.default_rng(seed) if args.simulate else None
    header = ["state", "alpha", "beta", "v_ba_theory", "v_ca_theory"]
    if args.simulate:
        header += ["v_ba_sim", "v_ba_std", "r2_ba", "v_ca_sim", "v_ca_std", "r2_ca"]
    path = out_dir / "table_s1.csv"
    rows_for_plot = []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for key, alpha, beta in TABLE_S1_ROWS:
            rho = _table_state(key, alpha, beta)
            v_ba, v_ca = monogamy.volumes(rho)
            row = [key,
                   "" if alpha is None else repr(float(alpha)),
                   "" if beta is None else repr(float(beta)),
                   repr(v_ba), repr(v_ca)]
            if args.simulate:
                row += _simulate_table_row(rho, master, args)
            writer.writerow(row)
            rows_for_plot.append((key, v_ba, v_ca))
    if args.plot:
        from . import plots
        plots.save_monogamy_figure(rows_for_plot, out_dir / "table_s1.png")
    print(f"wrote {path}")
    return 0


def _simulate_table_row(rho, master, args) -> list:
    def one_sample(rng):
        dirs = tomosim.uniform_directions(args.directions, rng)
        result = tomosim.run_experiment(rho, dirs, args.events, rng)
        out = {}
        for party in result.parties:
            fit, diag = _fit_cloud(result.cloud(party))
            if fit is not None and fit.recovered is not None:
                out[f"v_{party}"] = fit.recovered.volume
                out[f"r2_{party}"] = fit.r_squared
        return out

    stats = tomosim.monte_carlo_errors(one_sample, args.mc_samples, master)
    cells = []
    for party in ("B", "C"):
        if f"v_{party}" in stats:
            mean, std = stats[f"v_{party}"]
            r2_mean, _ = stats[f"r2_{party}"]
            cells += [repr(mean), repr(std), repr(r2_mean)]
        else:
            cells += ["degenerate", "", ""]
    return cells


def cmd_icosahedron_robustness(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rho = qstate.bell_diagonal([0.6, 0.1, 0.1, 0.2])
    rng = np.random.default_rng(_resolve_seed(args))
    path = out_dir / "icosahedron_runs.csv"
    v12, v9 = [], []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "volume_12", "volume_9"])
        for run in range(args.runs):
            ico = tomosim.icosahedron_directions(tomosim.random_rotation(rng))
            res12 = tomosim.run_experiment(rho, ico, args.events, rng)
            f12 = fitquad.fit(res12.cloud("B"))
            nine = tomosim.subset_nine(ico, rng)
            res9 = tomosim.run_experiment(rho, nine, args.events, rng)
            f9 = fitquad.fit(res9.cloud("B"))
            v12.append(f12.recovered.volume)
            v9.append(f9.recovered.volume)
            writer.writerow([run, repr(v12[-1]), repr(v9[-1])])
    summary = {
        "runs": args.runs,
        "events": args.events,
        "volume_12": {"mean": float(np.mean(v12)), "std": float(np.std(v12, ddof=1))},
        "volume_9": {"mean": float(np.mean(v9)), "std": float(np.std(v9, ddof=1))},
        "analytic_volume": steer.normalized_volume(qstate.pauli_decompose(rho)),
    }
    _write_json(out_dir / "icosahedron_summary.json", summary)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steerkit",
        description="Quantum steering ellipsoids: closed-form geometry, "
                    "simulated tomography, quadric fitting, volume monogamy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ellipsoid", help="analytic steering ellipsoid geometry")
    _add_state_flags(p)
    p.add_argument("--mesh", action="store_true", help="also export CSV surface mesh")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_ellipsoid)

    p = sub.add_parser("simulate", help="finite-count steering experiment")
    _add_state_flags(p)
    p.add_argument("--config", help="JSON experiment config (angles in radians)")
    p.add_argument("--scheme", default="uniform",
                   choices=["uniform", "icosahedron", "icosahedron-9"])
    p.add_argument("--directions", type=int, default=1000)
    p.add_argument("--events", type=int, default=50000)
    p.add_argument("--seed", type=int)
    p.add_argument("--noise", type=float, default=0.0,
                   help="white-noise admixture lambda")
    p.add_argument("--efficiencies", nargs=2, type=float, default=[1.0, 1.0],
                   metavar=("ETA_PLUS", "ETA_MINUS"))
    p.add_argument("--plot", action="store_true")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit an external CSV point cloud")
    p.add_argument("cloud", help="CSV with bx,by,bz or x,y,z columns")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("monogamy", help="volume monogamy report or sweep")
    _add_state_flags(p)
    p.add_argument("--sweep", type=int, metavar="N",
                   help="emit an NxN (alpha, beta) family-state sweep CSV")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_monogamy)

    p = sub.add_parser("table-s1", help="the 12-row state table, theory and simulation")
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--directions", type=int, default=1000)
    p.add_argument("--events", type=int, default=50000)
    p.add_argument("--mc-samples", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--plot", action="store_true")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_table_s1)

    p = sub.add_parser("icosahedron-robustness",
                       help="repeated icosahedron-vertex experiments on the "
                            "Bell-diagonal state")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--events", type=int, default=500000)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_icosahedron_robustness)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except fitquad.DegenerateCloudError as exc:
        print(f"degenerate cloud: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
