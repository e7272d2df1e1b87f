"""Command-line entry point.

Subcommands: simulate, rates, spectrum, freeze, perturb, phase, relax,
verify.  A JSON config document can supply any field; flags override config
values.  Every output file carries a comment header with the hash of the
effective configuration (timestamps live only in that header, so the data
sections of two runs with the same config and seed are byte-identical).

Exit codes: 0 ok, 1 config error, 2 regime error (e.g. beta <= 1),
3 numeric failure.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys

import numpy as np

from . import dunklsim, freezing, jumprates, mastereq, perturb, radialsde
from .errors import (ConvergenceError, DimensionError, DunklError,
                     ExtrapolationError, InsufficientRangeError,
                     QuadratureError, RegimeError, SchemaError, SizeError,
                     StepError, StiffnessError, UnsupportedMultiplicity,
                     WallError)
from .rootsys import build_root_system
from .weylgroup import enumerate_group

CONFIG_EXIT = 1
REGIME_EXIT = 2
NUMERIC_EXIT = 3

REGIME_ERRORS = (RegimeError, DimensionError, UnsupportedMultiplicity,
                 SizeError)
NUMERIC_ERRORS = (StepError, ConvergenceError, StiffnessError, WallError,
                  ExtrapolationError, QuadratureError, InsufficientRangeError)


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

DEFAULTS = {
    "system": {"family": "A", "N": 2, "beta": 4.0, "k": None},
    "sampling": {"nsamples": 100_000, "replicas": 20_000, "dt": None,
                 "t0": 0.01, "T": 1.0},
    "seed": None,
    "cache_dir": None,
    "threads": 1,
}


def _merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        elif v is not None:
            out[k] = v
    return out


def load_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as f:
                file_cfg = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise SchemaError(f"cannot read config: {e}")
        if not isinstance(file_cfg, dict):
            raise SchemaError("config must be a JSON object")
        cfg = _merge(cfg, file_cfg)
    overrides = {"system": {}, "sampling": {}}
    for name, path in [("system", ("system", "family")),
                       ("n", ("system", "N")),
                       ("beta", ("system", "beta")),
                       ("samples", ("sampling", "nsamples")),
                       ("replicas", ("sampling", "replicas")),
                       ("dt", ("sampling", "dt")),
                       ("t0", ("sampling", "t0")),
                       ("T", ("sampling", "T"))]:
        v = getattr(args, name, None)
        if v is not None:
            overrides[path[0]][path[1]] = v
    cfg = _merge(cfg, overrides)
    for name in ("seed", "cache_dir", "threads"):
        v = getattr(args, name, None)
        if v is not None:
            cfg[name] = v
    if cfg.get("cache_dir") is None:
        cfg["cache_dir"] = os.environ.get("DUNKL_CACHE_DIR")
    k = args.k if getattr(args, "k", None) is not None else None
    if getattr(args, "k_short", None) is not None or \
            getattr(args, "k_long", None) is not None:
        k = {"short": args.k_short or 1.0, "long": args.k_long or 1.0}
    if k is not None:
        cfg["system"]["k"] = k
    _validate(cfg)
    return cfg


def _validate(cfg: dict):
    sysd = cfg["system"]
    if sysd["family"] not in ("A", "B"):
        raise SchemaError(f"system.family must be A or B, got {sysd['family']!r}")
    if not isinstance(sysd["N"], int) or sysd["N"] < 1:
        raise SchemaError("system.N must be a positive integer")
    if not (isinstance(sysd["beta"], (int, float)) and sysd["beta"] > 0):
        raise SchemaError("system.beta must be a positive number")
    if cfg["seed"] is None:
        raise SchemaError("seed is mandatory (flag --seed or config field)")
    if not isinstance(cfg["seed"], int):
        raise SchemaError("seed must be an integer")
    s = cfg["sampling"]
    for field, lo in (("nsamples", 1), ("replicas", 1)):
        if not (isinstance(s[field], int) and s[field] >= lo):
            raise SchemaError(f"sampling.{field} must be an integer >= {lo}")
    if s["dt"] is not None and not 0 < s["dt"] <= 1:
        raise SchemaError("sampling.dt must lie in (0, 1]")
    if not (s["t0"] > 0 and s["T"] > 0):
        raise SchemaError("sampling.t0 and sampling.T must be positive")


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))   # shortest round-trip decimal
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def write_csv(path: str, cfg: dict, columns: list, rows,
              extra_header: dict | None = None):
    with open(path, "w") as f:
        f.write(f"# config-hash: {config_hash(cfg)}\n")
        f.write(f"# generated: {datetime.datetime.now().isoformat()}\n")
        for k, v in (extra_header or {}).items():
            f.write(f"# {k}: {_fmt(v)}\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")


def write_json(path: str, cfg: dict, data: dict):
    doc = {"header": {"config_hash": config_hash(cfg),
                      "generated": datetime.datetime.now().isoformat()},
           "data": data}
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True, indent=1)
        f.write("\n")


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _build_system(cfg):
    sysd = cfg["system"]
    return build_root_system(sysd["family"], sysd["N"], sysd["beta"],
                             sysd.get("k"))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(cfg, args):
    R = _build_system(cfg)
    N = R.rank
    if args.x0 in (None, "grid"):
        x0 = (np.arange(N) - (N - 1) / 2.0 if R.family == "A"
              else np.arange(1.0, N + 1))
    else:
        x0 = np.array([float(v) for v in args.x0.split(",")])
        if len(x0) != N:
            raise SchemaError(f"x0 needs {N} components")
    try:
        table = enumerate_group(R)
    except SizeError:
        table = None            # large N: track raw (perm, signs) instead
    s = cfg["sampling"]
    path, traj = dunklsim.simulate_dunkl(
        R, table, x0, s["T"], dt=s["dt"], seed=cfg["seed"],
        save_stride=args.save_stride)
    write_csv(args.out_paths, cfg, ["t"] + [f"x_{i+1}" for i in range(N)],
              path.to_csv_rows())
    rows = []
    for (t, rid), g in zip(traj.events, traj.group_path[1:]):
        code = jumprates.root_code(R.positive_roots[rid], N)
        rows.append([t, code[0], code[1], g])
    write_csv(args.out_trajectory, cfg,
              ["t", "event_root_i", "event_root_j", "group_index"], rows,
              extra_header={"n_events": traj.n_events})
    print(f"simulate: {traj.n_events} events over T={s['T']}; "
          f"wrote {args.out_paths}, {args.out_trajectory}")
    return 0


def _rates_table(cfg, method="auto"):
    R = _build_system(cfg)
    return R, jumprates.estimate_rates_origin(
        R, cfg["sampling"]["nsamples"], seed=cfg["seed"], method=method,
        cache_dir=cfg["cache_dir"])


def cmd_rates(cfg, args):
    R, table = _rates_table(cfg, args.method)
    write_json(args.out, cfg, _jsonable(table.to_json_dict()))
    cf = table.total_closed_form
    extra = f" (closed form {cf:.6g})" if cf else ""
    print(f"rates: total {table.total:.6g} +- {table.total_stderr:.2g}{extra}; "
          f"wrote {args.out}")
    return 0


def cmd_spectrum(cfg, args):
    R, rates = _rates_table(cfg)
    table = enumerate_group(R)
    S = mastereq.spectrum(mastereq.build_master(rates, table))
    rows = []
    for gi, grp in enumerate(S.groups):
        for i in grp:
            rows.append([i, S.eigenvalues[i], gi])
    write_csv(args.out, cfg, ["index", "eigenvalue", "multiplicity_group"],
              rows, extra_header={"Lambda": S.Lambda})
    print(f"spectrum: r1 = {S.r1:.6g}, r_min = {S.r_min:.6g}; wrote {args.out}")
    return 0


def cmd_freeze(cfg, args):
    R = _build_system(cfg)
    pv = freezing.peak_vector(R)
    frozen = freezing.frozen_rate_table(R, pv)
    data = {"family": R.family, "N": R.rank, "z": pv.z,
            "residual": pv.residual,
            "frozen_rates": frozen.to_json_dict(),
            "pf_spectrum": None, "verifications": {}}
    if R.family == "A" and R.rank <= 7:
        rep = freezing.pf_spectrum(R.rank)
        data["pf_spectrum"] = {
            "eigenvalues": rep.eigenvalues,
            "half_multiplicity": rep.half_multiplicity,
            "min_eigenvalue": rep.min_eigenvalue}
        ver = {}
        if 2 <= R.rank <= 6:
            ver["exchange_dev"] = freezing.verify_exchange_identity(R.rank)
        if R.rank in (2, 3, 4):
            dk, dl = freezing.verify_ladder_commutators(R.rank)
            ver["commutator_dev"] = [dk, dl]
            sub = freezing.verify_ladder_subspace(R.rank)
            ver["subspace_report"] = {
                "stay": {str(k): v for k, v in sub["stay"].items()},
                "leave": {str(k): v for k, v in sub["leave"].items()},
                "eigen_residual": {str(k): v
                                   for k, v in sub["eigen_residual"].items()},
                "n_lowering": sub["n_lowering"]}
        data["verifications"] = ver
    write_json(args.out, cfg, _jsonable(data))
    print(f"freeze: residual {pv.residual:.2e}, total {frozen.total:.6g}; "
          f"wrote {args.out}")
    return 0


def cmd_perturb(cfg, args):
    R = _build_system(cfg)
    rep = perturb.build_report(R)
    betas = [float(b) for b in args.betas.split(",")] if args.betas else []
    if betas and args.measure:
        perturb.predict_vs_measured(
            R.family, R.rank, betas, nsamples=cfg["sampling"]["nsamples"],
            seed=cfg["seed"], cache_dir=cfg["cache_dir"], report=rep)
    else:
        rep.predictions = [{"beta": b, "r1_predicted": rep.predicted_r1(b)}
                           for b in betas]
    labels = [str(e.code) for e in freezing.frozen_rate_table(
        R, freezing.peak_vector(R)).entries]
    data = {"family": R.family, "N": R.rank, "z": rep.z, "H": rep.H,
            "ctilde": {"paper": dict(zip(labels, rep.ctilde_paper)),
                       "corrected": dict(zip(labels, rep.ctilde_corrected))},
            "sum_rule_residuals": rep.sum_rule_residuals,
            "r0": rep.r0, "r1": [list(s) for _, s in rep.r1],
            "gamma": rep.gamma, "r_star": rep.r_star,
            "threshold_coeff": rep.threshold_coeff,
            "predictions": rep.predictions}
    write_json(args.out, cfg, _jsonable(data))
    print(f"perturb: sum-rule residuals {rep.sum_rule_residuals}; "
          f"wrote {args.out}")
    return 0


def cmd_phase(cfg, args):
    sysd = cfg["system"]
    fam, beta = sysd["family"], sysd["beta"]
    n_lo = args.n_min or (2 if fam == "A" else 1)
    rows = []
    theory = dunklsim.bulk_limit(fam, beta)
    s = cfg["sampling"]
    for N in range(n_lo, args.n_max + 1):
        if args.mode == "closed_form":
            r = dunklsim.per_particle_rate(fam, N, beta, mode="closed_form")
        else:
            x0 = None
            if args.x0_norm:
                base = (np.arange(N) - (N - 1) / 2.0 if fam == "A"
                        else np.arange(1.0, N + 1))
                x0 = base / np.linalg.norm(base) * args.x0_norm
            r = dunklsim.per_particle_rate(
                fam, N, beta, x0=x0, mode="simulate",
                nreplicas=s["replicas"], dt=s["dt"], seed=cfg["seed"],
                cache_dir=cfg["cache_dir"], threads=cfg["threads"])
        rows.append([N, beta, r, theory, args.mode])
    write_csv(args.out, cfg, ["N", "beta", "rate_per_particle", "theory",
                              "mode"], rows)
    print(f"phase: {len(rows)} rows, limit {theory:.6g}; wrote {args.out}")
    return 0


def cmd_relax(cfg, args):
    R, rates = _rates_table(cfg)
    table = enumerate_group(R)
    op = mastereq.build_master(rates, table)
    S = mastereq.spectrum(op)
    s = cfg["sampling"]
    t0 = s["t0"]
    T = t0 * 10.0 ** args.t_decades
    P0 = mastereq.delta_distribution(op.dim, 0, t0)
    ts, emp = mastereq.simulate_chain(op, P0, t0, T, s["replicas"],
                                      seed=cfg["seed"], n_eval=args.n_eval)
    rows = []
    dists = []
    for t, d in zip(ts, emp):
        th = mastereq.solve_power_law(S, P0, t0, t)
        dists.append(d.distance_to_uniform())
        for tau in range(op.dim):
            rows.append([t, tau, d.p[tau], th.p[tau]])
    fit = mastereq.fit_relaxation_exponent(ts, emp, args.tail_fraction)
    write_csv(args.out, cfg, ["t", "tau_index", "p_emp", "p_theory"], rows,
              extra_header={"fitted_exponent": round(fit.slope, 6),
                            "fit_stderr": round(fit.stderr, 6),
                            "r1_spectrum": S.r1})
    print(f"relax: fitted exponent {fit.slope:.4f} +- {fit.stderr:.4f} "
          f"(spectrum r1 {S.r1:.4f}); wrote {args.out}")
    return 0


def cmd_verify(cfg, args):
    from . import verify as verify_mod
    ok = verify_mod.run_all(cfg, fast=args.fast)
    return 0 if ok else NUMERIC_EXIT


# ---------------------------------------------------------------------------
# parser / dispatch
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override")
    p.add_argument("--system", choices=("A", "B"), help="root-system family")
    p.add_argument("--n", type=int, help="particle count N")
    p.add_argument("--beta", type=float)
    p.add_argument("--k", type=float, help="multiplicity (all orbits)")
    p.add_argument("--k-short", type=float, dest="k_short")
    p.add_argument("--k-long", type=float, dest="k_long")
    p.add_argument("--seed", type=int)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--threads", type=int)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="dunkl",
        description="jump processes on reflection groups: simulation, rates, "
                    "spectra, freezing limit, perturbation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="radial path + jump trajectory CSVs")
    _add_common(p)
    p.add_argument("--x0", help='comma-separated start or "grid"')
    p.add_argument("--T", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--save-stride", type=int, default=100)
    p.add_argument("--out-paths", default="paths.csv")
    p.add_argument("--out-trajectory", default="trajectory.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rates", help="Monte Carlo origin rate table")
    _add_common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--method", default="auto",
                   choices=("auto", "tridiagonal", "mcmc"))
    p.add_argument("--out", default="rates.json")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("spectrum", help="master operator eigenvalues")
    _add_common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--out", default="spectrum.csv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("freeze", help="peak vector, frozen spectrum, "
                                      "operator identities")
    _add_common(p)
    p.add_argument("--out", default="freeze.json")
    p.set_defaults(func=cmd_freeze)

    p = sub.add_parser("perturb", help="first-order exponent corrections")
    _add_common(p)
    p.add_argument("--betas", help="comma list for predictions")
    p.add_argument("--measure", action="store_true",
                   help="also measure r1 by Monte Carlo at each beta")
    p.add_argument("--samples", type=int)
    p.add_argument("--out", default="perturb.json")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("phase", help="per-particle rate vs N")
    _add_common(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--n-min", type=int)
    p.add_argument("--mode", default="closed_form",
                   choices=("closed_form", "simulate"))
    p.add_argument("--x0-norm", type=float, dest="x0_norm")
    p.add_argument("--replicas", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--out", default="phase.csv")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("relax", help="chain simulation + exponent fit")
    _add_common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--t0", type=float)
    p.add_argument("--t-decades", type=float, default=2.0, dest="t_decades")
    p.add_argument("--n-eval", type=int, default=12)
    p.add_argument("--tail-fraction", type=float, default=0.5)
    p.add_argument("--out", default="relax.csv")
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("verify", help="run the invariant suite")
    _add_common(p)
    p.add_argument("--fast", action="store_true")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args)
    except SchemaError as e:
        print(f"config error: {e}", file=sys.stderr)
        return CONFIG_EXIT
    try:
        return args.func(cfg, args)
    except SchemaError as e:
        print(f"config error: {e}", file=sys.stderr)
        return CONFIG_EXIT
    except REGIME_ERRORS as e:
        print(f"regime error: {e}", file=sys.stderr)
        return REGIME_EXIT
    except NUMERIC_ERRORS as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return NUMERIC_EXIT
    except DunklError as e:
        print(f"error: {e}", file=sys.stderr)
        return NUMERIC_EXIT


if __name__ == "__main__":
    sys.exit(main())
