"""Invariant battery behind `dunkl verify`: one PASS/FAIL line per check.

These are quick versions of the structural invariants (the full statistical
suite lives in the test tree): reflection closure, group-table involutions,
sampler calibration, closed-form totals, master-operator structure, frozen
identities, and the perturbation sum rule.
"""

from __future__ import annotations

import numpy as np

from . import freezing, jumprates, mastereq, perturb, radialsde
from .rootsys import build_root_system, gaps, weight
from .weylgroup import act, enumerate_group


def _check_reflection_closure(R):
    mat = R.root_matrix
    for r in R.positive_roots:
        for z in R.positive_roots:
            img = z.vec - (2.0 * (z.vec @ r.vec) / r.norm_sq) * r.vec
            hit = np.any(np.all(np.abs(mat - img) < 1e-12, axis=1)) or \
                np.any(np.all(np.abs(mat + img) < 1e-12, axis=1))
            if not hit:
                return False, f"sigma_alpha zeta not in +-R+ for {r.vec}, {z.vec}"
    return True, "closed under reflections"


def _check_weight_invariance(R, table, seed=0):
    rng = radialsde.philox_stream(seed)
    worst = 0.0
    for _ in range(20):
        x = rng.standard_normal(R.rank)
        w0 = weight(R, x)
        for g in table.elements:
            worst = max(worst, abs(weight(R, act(g, x)) - w0) / max(w0, 1e-300))
    return worst < 1e-12, f"max relative deviation {worst:.2e}"


def _check_group_table(R, table):
    n = table.order
    ident = np.arange(n)
    for a in range(R.n_roots):
        rm = table.right_mult[a]
        if not (np.all(rm[rm] == ident) and np.all(rm != ident)):
            return False, f"right_mult[{a}] not a fixed-point-free involution"
    sg = table.signs_vector()
    for a in range(R.n_roots):
        if not np.all(sg[table.right_mult[a]] == -sg):
            return False, "signature does not flip across a reflection"
    return True, f"|W| = {n}"


def _check_calibration(R, n, seed):
    s = radialsde.sample_static(R, n, seed=seed)
    m = float(np.mean(np.sum(s.points ** 2, axis=1)))
    se = float(np.std(np.sum(s.points ** 2, axis=1), ddof=1) / np.sqrt(n))
    target = radialsde.calibration_moment(R)
    ok = abs(m - target) < 4 * se
    return ok, f"E|X|^2 = {m:.4f} vs {target} ({abs(m-target)/se:.1f} se)"


def _check_total_rate(R, n, seed):
    t = jumprates.estimate_rates_origin(R, n, seed=seed)
    cf = t.total_closed_form
    dev = abs(t.total - cf) / (3 * t.total_stderr)
    return dev < 1.0, f"total {t.total:.5f} vs {cf:.5f} ({3*dev:.1f} se)"


def _check_master(R, table, n, seed):
    rates = jumprates.estimate_rates_origin(R, n, seed=seed)
    op = mastereq.build_master(rates, table)
    M = op.matrix
    checks = []
    checks.append(np.max(np.abs(M - M.T)) == 0.0)
    checks.append(np.max(np.abs(M.sum(axis=0))) < 1e-13)
    S = mastereq.spectrum(op)
    checks.append(S.eigenvalues[0] < 1e-10)
    checks.append(abs(S.eigenvalues[0]) < 1e-10)
    sym = np.max(np.abs(np.sort(S.eigenvalues)
                        - np.sort(-2 * op.Lambda - S.eigenvalues)))
    checks.append(sym < 1e-9)
    checks.append(abs(S.r_min + 2 * op.Lambda) < 1e-9)
    sgn = table.signs_vector() / np.sqrt(op.dim)
    checks.append(np.max(np.abs(M @ sgn + 2 * op.Lambda * sgn)) < 1e-9)
    return all(checks), f"spectral symmetry residual {sym:.2e}"


def _check_frozen(N):
    R = build_root_system("A", N, 8.0)
    pv = freezing.peak_vector(R)
    hz = freezing.hermite_zeros(N)
    dev = np.max(np.abs(pv.z - hz))
    rep = freezing.pf_spectrum(N)
    ok = (pv.residual < 1e-12 and dev < 1e-10
          and rep.half_multiplicity == N - 1
          and abs(rep.min_eigenvalue + N * (N - 1) / 4.0) < 1e-9)
    return ok, (f"residual {pv.residual:.1e}, hermite dev {dev:.1e}, "
                f"mult(-1/2) = {rep.half_multiplicity}")


def _check_sum_rule(family, N):
    R = build_root_system(family, N, 8.0)
    rep = perturb.build_report(R)
    res = rep.sum_rule_residuals["corrected"]
    neg = all(np.all(s <= 1e-12) for _, s in rep.r1)
    return res < 1e-10 and neg, f"corrected residual {res:.2e}"


def run_all(cfg, fast: bool = False) -> bool:
    seed = cfg["seed"]
    n = 100_000 if fast else min(cfg["sampling"]["nsamples"], 400_000)
    systems = [("A", 2, 4.0), ("A", 3, 8.0), ("B", 2, 4.0)]
    ok_all = True
    checks = []
    for fam, N, beta in systems:
        R = build_root_system(fam, N, beta)
        table = enumerate_group(R)
        tag = f"{fam}{N} beta={beta:g}"
        checks.append((f"reflection closure {tag}",
                       _check_reflection_closure(R)))
        checks.append((f"weight invariance {tag}",
                       _check_weight_invariance(R, table, seed)))
        checks.append((f"group table {tag}", _check_group_table(R, table)))
        checks.append((f"sampler calibration {tag}",
                       _check_calibration(R, n, seed)))
        checks.append((f"total rate vs closed form {tag}",
                       _check_total_rate(R, n, seed)))
        checks.append((f"master operator {tag}",
                       _check_master(R, table, n, seed)))
    for N in (2, 3, 4):
        checks.append((f"frozen identities A{N}", _check_frozen(N)))
    checks.append(("exchange identity N=4",
                   (freezing.verify_exchange_identity(4) < 1e-12, "")))
    dk, dl = freezing.verify_ladder_commutators(3)
    checks.append(("ladder commutators N=3",
                   (max(dk, dl) < 1e-10, f"devs {dk:.1e}, {dl:.1e}")))
    checks.append(("perturbation sum rule A2", _check_sum_rule("A", 2)))
    checks.append(("perturbation sum rule B2", _check_sum_rule("B", 2)))

    for name, (ok, detail) in checks:
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}" + (f" — {detail}" if detail else ""))
        ok_all &= ok
    return ok_all
