"""Configuration-driven command line entry points.

Subcommands
-----------
simulate    advance a configured initial state, writing a run manifest and a
            time-series table (t, E_k, E_p, H_total, volume, min_eta,
            max_eta, mean_psi, elliptic_iters)
dispersion  tabulate analytic vs measured linearized frequencies about the
            reference cylinder
verify      run the full verification battery with machine-readable output
dtn         solve one Dirichlet-to-Neumann problem and dump the boundary
            fields plus trace-identity residuals

Flags: --config PATH (required), --out DIR (default ./out), --seed UINT
(default 0), --quiet.  Exit codes: 0 success, 2 configuration error,
3 verification failure, 4 pinch-off abort.

Configuration is flat INI-style key=value text with sections
grid/physics/ic/evolution/output (plus optional dispersion/verify).
Unknown keys are rejected by name.  Floating point output carries 17
significant digits, and a fixed seed gives byte-identical reruns.

The environment variable JETWAVE_THREADS caps the numeric thread pools; it
is applied before the numeric modules load.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_PINCH = 4

_SCHEMA = {
    "grid": {"n_theta", "n_z", "n_rho", "z_period"},
    "physics": {"r", "sigma"},
    "ic": None,  # mode.N keys, validated separately
    "evolution": {"dt", "t_final", "filter_eps", "record_every",
                  "elliptic_tol", "cfl"},
    "output": {"prefix"},
    "dispersion": {"modes"},
    "verify": {"fault", "heavy", "structure_states"},
}

_FLOAT_FMT = "%.17g"


class _ConfigProblem(Exception):
    pass


def _fmt(x):
    if isinstance(x, float):
        return _FLOAT_FMT % x
    return str(x)


def _parse_pi(text):
    text = text.strip().lower()
    import math
    if text.endswith("pi"):
        head = text[:-2].strip().rstrip("*")
        factor = float(head) if head else 1.0
        return factor * math.pi
    return float(text)


def load_config(path):
    """Parse and validate a run configuration; unknown keys are rejected."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise _ConfigProblem(f"config file not found: {path}")
    cfg = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise _ConfigProblem(f"unknown config section [{section}]")
        allowed = _SCHEMA[section]
        for key in parser[section]:
            if allowed is not None and key not in allowed:
                raise _ConfigProblem(
                    f"unknown key '{key}' in section [{section}]")
            if section == "ic" and not (key == "modes" or key.startswith("mode")):
                raise _ConfigProblem(f"unknown key '{key}' in section [ic]")
        cfg[section] = dict(parser[section])

    def need(section, key, cast=float):
        if section not in cfg or key not in cfg[section]:
            raise _ConfigProblem(f"missing required key '{key}' "
                                 f"in section [{section}]")
        try:
            return cast(cfg[section][key])
        except ValueError as exc:
            raise _ConfigProblem(f"bad value for '{key}': {exc}") from exc

    out = {
        "n_theta": need("grid", "n_theta", int),
        "n_z": need("grid", "n_z", int),
        "n_rho": need("grid", "n_rho", int),
        "z_period": _parse_pi(cfg.get("grid", {}).get("z_period", "2pi")),
        "R": need("physics", "r"),
        "sigma": need("physics", "sigma"),
        "modes": [],
        "dt": cfg.get("evolution", {}).get("dt", "auto"),
        "t_final": float(cfg.get("evolution", {}).get("t_final", 1.0)),
        "filter_eps": float(cfg.get("evolution", {}).get("filter_eps", 0.0)),
        "record_every": int(cfg.get("evolution", {}).get("record_every", 1)),
        "elliptic_tol": float(cfg.get("evolution", {}).get("elliptic_tol", 1e-11)),
        "cfl": float(cfg.get("evolution", {}).get("cfl", 0.5)),
        "prefix": cfg.get("output", {}).get("prefix", "run"),
        "dispersion_modes": cfg.get("dispersion", {}).get("modes", ""),
        "fault": cfg.get("verify", {}).get("fault") or None,
        "heavy": cfg.get("verify", {}).get("heavy", "true").lower()
        not in ("false", "0", "no"),
        "structure_states": int(cfg.get("verify", {}).get("structure_states", 100)),
    }
    if out["dt"] != "auto":
        out["dt"] = float(out["dt"])
    for key, raw in sorted(cfg.get("ic", {}).items()):
        for chunk in raw.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split()
            if len(parts) != 5:
                raise _ConfigProblem(
                    f"mode '{key}' must read 'amplitude m k target phase', "
                    f"got {chunk!r}")
            amp, m, k, target, phase = parts
            if target not in ("eta", "psi"):
                raise _ConfigProblem(
                    f"mode '{key}': target must be eta or psi, got {target!r}")
            out["modes"].append(
                (float(amp), int(m), float(k), target, float(phase)))
    return out


def _build_state(cfg):
    from .geometry import SurfaceState
    from .spectral import TorusField, TorusGrid

    grid = TorusGrid(cfg["n_theta"], cfg["n_z"], cfg["z_period"])
    eta_modes = [(a, m, k, p) for a, m, k, t, p in cfg["modes"] if t == "eta"]
    psi_modes = [(a, m, k, p) for a, m, k, t, p in cfg["modes"] if t == "psi"]
    eta = TorusField.constant(grid, cfg["R"]) + TorusField.from_modes(grid, eta_modes)
    psi = TorusField.from_modes(grid, psi_modes)
    return SurfaceState(eta, psi, cfg["R"], cfg["sigma"])


def _write_manifest(path, entries):
    with open(path, "w") as fh:
        for key, value in entries:
            fh.write(f"{key}={_fmt(value)}\n")


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(cfg, out_dir, seed, quiet):
    from .elliptic import DtnSolver
    from .evolution import EvolutionConfig, simulate

    state = _build_state(cfg)
    solver = DtnSolver(state.grid, cfg["n_rho"])
    econf = EvolutionConfig(dt=cfg["dt"], t_final=cfg["t_final"],
                            filter_eps=cfg["filter_eps"],
                            record_every=cfg["record_every"],
                            tol_elliptic=cfg["elliptic_tol"], cfl=cfg["cfl"])
    traj = simulate(state, econf, solver)
    rows = [
        (r.t, r.kinetic, r.potential, r.total, r.volume, r.min_eta,
         r.max_eta, r.mean_psi, r.elliptic_iterations)
        for r in traj.reports
    ]
    series = os.path.join(out_dir, cfg["prefix"] + "_series.csv")
    _write_csv(series,
               ["t", "E_k", "E_p", "H_total", "volume", "min_eta",
                "max_eta", "mean_psi", "elliptic_iters"],
               rows)
    manifest = os.path.join(out_dir, cfg["prefix"] + "_manifest.txt")
    _write_manifest(manifest, [
        ("command", "simulate"),
        ("status", traj.status),
        ("seed", seed),
        ("n_theta", cfg["n_theta"]),
        ("n_z", cfg["n_z"]),
        ("n_rho", cfg["n_rho"]),
        ("z_period", cfg["z_period"]),
        ("R", cfg["R"]),
        ("sigma", cfg["sigma"]),
        ("dt", traj.dt),
        ("t_final_requested", cfg["t_final"]),
        ("t_last_valid", traj.times[-1]),
        ("snapshots", len(traj.times)),
        ("series", series),
    ])
    if not quiet:
        print(f"wrote {series}")
        print(f"wrote {manifest}")
        print(f"status: {traj.status}, last valid t = {_fmt(traj.times[-1])}")
    return EXIT_PINCH if traj.status == "pinch_off" else EXIT_OK


def _default_dispersion_modes(cfg):
    raw = cfg["dispersion_modes"].strip()
    if raw:
        modes = []
        for chunk in raw.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            m, k = chunk.split()
            modes.append((int(m), float(k)))
        return modes
    return [(0, 1.0), (0, 2.0), (1, 1.0), (2, 0.0), (3, 0.0), (4, 0.0)]


def cmd_dispersion(cfg, out_dir, seed, quiet):
    from .evolution import measure_dispersion
    from .spectral import TorusGrid

    grid = TorusGrid(cfg["n_theta"], cfg["n_z"], cfg["z_period"])
    modes = _default_dispersion_modes(cfg)
    rows = measure_dispersion(grid, cfg["R"], cfg["sigma"], modes,
                              n_rho=cfg["n_rho"], tol=cfg["elliptic_tol"])
    path = os.path.join(out_dir, cfg["prefix"] + "_dispersion.csv")
    _write_csv(path, ["m", "k", "omega2_analytic", "omega2_measured",
                      "rel_error"], rows)
    if not quiet:
        print(f"wrote {path}")
        for m, k, a, b, rel in rows:
            print(f"  m={m} k={_fmt(k)}: omega^2 analytic {_fmt(a)} "
                  f"measured {_fmt(b)} rel {_fmt(rel)}")
    return EXIT_OK


def cmd_verify(cfg, out_dir, seed, quiet):
    from .spectral import TorusGrid
    from .verification import run_battery

    grid = TorusGrid(cfg["n_theta"], cfg["n_z"], cfg["z_period"])
    checks = run_battery(grid, cfg["n_rho"], seed, cfg["R"], cfg["sigma"],
                         fault=cfg["fault"], heavy=cfg["heavy"],
                         n_structure_states=cfg["structure_states"])
    path = os.path.join(out_dir, cfg["prefix"] + "_verify.txt")
    with open(path, "w") as fh:
        for c in checks:
            fh.write(c.record() + "\n")
    failed = [c for c in checks if not c.passed and not c.informational]
    if not quiet:
        for c in checks:
            print(c.line())
        print(f"wrote {path}")
        print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if failed:
        print("failing checks: " + ", ".join(c.name for c in failed),
              file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_dtn(cfg, out_dir, seed, quiet):
    from .elliptic import DtnSolver

    state = _build_state(cfg)
    solver = DtnSolver(state.grid, cfg["n_rho"])
    bundle = solver.trace_bundle(state.eta, state.psi, cfg["elliptic_tol"])
    grid = state.grid
    th, zz = grid.mesh()
    rows = []
    for i in range(grid.n_theta):
        for j in range(grid.n_z):
            rows.append((th[i, j], zz[i, j], bundle.B.values[i, j],
                         bundle.V_theta.values[i, j], bundle.V_z.values[i, j],
                         bundle.N.values[i, j], bundle.G.values[i, j]))
    path = os.path.join(out_dir, cfg["prefix"] + "_dtn_fields.csv")
    _write_csv(path, ["theta", "z", "B", "V_theta", "V_z", "N", "G"], rows)
    manifest = os.path.join(out_dir, cfg["prefix"] + "_dtn_manifest.txt")
    _write_manifest(manifest, [
        ("command", "dtn"),
        ("iterations", bundle.iterations),
        ("solver_residual", bundle.residual),
        ("kinetic_energy", bundle.kinetic_energy),
        ("gradient_identity_residual",
         bundle.gradient_identity_residual(state.psi, state.eta)),
        ("b_formula_residual",
         bundle.b_formula_residual(state.psi, state.eta)),
        ("g_consistency_residual", (bundle.G - bundle.G_trace).max_norm()),
        ("fields", path),
    ])
    if not quiet:
        print(f"wrote {path}")
        print(f"wrote {manifest}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv=None):
    threads = os.environ.get("JETWAVE_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)

    parser = argparse.ArgumentParser(
        prog="jetwave",
        description="capillary jet simulation and verification toolbox")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "dispersion", "verify", "dtn"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to INI config")
        p.add_argument("--out", default="./out", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="rng seed")
        p.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except _ConfigProblem as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    os.makedirs(args.out, exist_ok=True)
    handler = {
        "simulate": cmd_simulate,
        "dispersion": cmd_dispersion,
        "verify": cmd_verify,
        "dtn": cmd_dtn,
    }[args.command]
    try:
        return handler(cfg, args.out, args.seed, args.quiet)
    except _ConfigProblem as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
