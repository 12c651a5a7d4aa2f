"""Named verification suites and the JSON report behind `rabipt verify`.

Each check exercises one invariant of the stack end to end and reports a
single observed number against a tolerance.  Tolerances can be scaled
globally (tolerance_scale=0 turns every floating check into a forced
failure, which is the CLI's fault-injection path).  With a fixed seed the
report is deterministic except for the timing fields.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .bethe import bethe_residuals, constraint_residual, q_from_roots, \
    solve_bethe, to_gaudin
from .constraint import q_sequence, qes_points, qp_proportionality_residual
from .model import Branch, ModelParams, regular_spectrum
from .potentials import PotentialForm, full_energy, full_potential, \
    qes_potential, qes_wavefunction
from .schrodinger import Grid, eigenvalue_scan, fd_eigensolve, residual_check

__all__ = ["DEFAULT_PARAMS", "run_checks", "summary_lines"]

DEFAULT_PARAMS = ModelParams(delta=1.2, epsilon=0.3, omega=1.0)

_BRANCHES = (Branch.PLUS, Branch.MINUS)


def _all_points(params: ModelParams, n_max: int):
    for n in range(1, n_max + 1):
        for branch in _BRANCHES:
            for point in qes_points(params, n, branch):
                yield point


def _check_qes_point_counts(params, n_max, rng):
    bad = []
    for n in range(1, n_max + 1):
        got_p = len(qes_points(params, n, Branch.PLUS))
        got_m = len(qes_points(params, n, Branch.MINUS))
        if (got_p, got_m) != (n, n - 1):
            bad.append((n, got_p, got_m))
    observed = float(len(bad))
    detail = ("counts match n (plus) / n-1 (minus) for n <= %d" % n_max
              if not bad else "mismatch at %r" % bad)
    return observed, detail


def _check_juddian_consistency(params, n_max, rng):
    worst = 0.0
    for point in _all_points(params, n_max):
        p = params.replace(g=point.g)
        levels = regular_spectrum(
            p, level_count=n_max + 12, truncation=200).values
        worst = max(worst, float(np.min(np.abs(levels - point.energy))))
    return worst, "max distance of exceptional energies to diagonalization"


def _check_bethe_triple(params, n_max, rng):
    worst = 0.0
    for point in _all_points(params, n_max):
        p = params.replace(g=point.g)
        br = solve_bethe(p, point.n, point.branch)
        res = np.max(np.abs(bethe_residuals(br.roots, p, point.n,
                                            point.branch)))
        gp = to_gaudin(br)
        target = -(p.delta ** 2 / p.omega ** 2
                   + 2.0 * point.n * p.g ** 2 / p.omega ** 2)
        e_gap = abs(gp.A * np.sum(gp.v) - target)
        worst = max(worst, float(res), constraint_residual(br), float(e_gap))
    return worst, "max over points of Bethe/constraint/energy residuals"


def _check_qp_proportionality(params, n_max, rng, draws=100):
    worst = 0.0
    count = 0
    while count < draws:
        n = int(rng.integers(1, 9))
        omega = float(rng.uniform(0.6, 1.4))
        p = ModelParams(delta=float(rng.uniform(0.3, 2.0)),
                        epsilon=float(rng.uniform(-0.8, 0.8)),
                        omega=omega,
                        g=float(rng.uniform(0.1, 1.5)))
        branch = Branch.PLUS if rng.integers(2) else Branch.MINUS
        es = branch.sign * p.epsilon
        margin = min(min(abs(2.0 * es + (n - k) * omega)
                         for k in range(0, n + 1)),
                     min(abs(es + 0.5 * k * omega) for k in range(0, n + 1)))
        if margin < 0.05:
            continue
        worst = max(worst, qp_proportionality_residual(p, n, branch))
        count += 1
    return worst, "max relative residual over %d non-resonant draws" % draws


def _check_q_symmetric_identity(params, n_max, rng):
    worst = 0.0
    for point in _all_points(params, n_max):
        p = params.replace(g=point.g)
        br = solve_bethe(p, point.n, point.branch)
        q_rec = q_sequence(p, point.n, point.branch, last=point.n)
        q_sym = q_from_roots(br)
        a = q_rec.values / q_rec.values[0]
        b = q_sym.values / q_sym.values[0]
        scale = np.max(np.abs(a))
        worst = max(worst, float(np.max(np.abs(a - b)) / scale))
    return worst, "recurrence vs root-elementary-symmetric coefficients"


def _check_potential_form_equivalence(params, n_max, rng):
    x = np.linspace(0.35, 5.5, 41)
    worst = 0.0
    for point in _all_points(params, n_max):
        p = params.replace(g=point.g)
        vq = qes_potential(p, point.n, point.branch, x)
        vh = qes_potential(p, point.n, point.branch, x,
                           PotentialForm.HYPERBOLIC)
        vf = full_potential(p, point.energy, point.branch, x)
        scale = np.max(np.abs(vq))
        worst = max(worst,
                    float(np.max(np.abs(vq - vh)) / scale),
                    float(np.max(np.abs(vq - vf)) / scale))
    return worst, "partial-fraction vs hyperbolic vs energy-carrying forms"


def _check_schrodinger_residual(params, n_max, rng):
    grid = Grid.uniform(0.3, 6.0, 115)
    worst = 0.0
    for point in _all_points(params, min(n_max, 5)):
        p = params.replace(g=point.g)
        br = solve_bethe(p, point.n, point.branch)
        calE = full_energy(p, point.energy, point.branch)
        v = -br.roots
        r = residual_check(
            lambda x: qes_potential(p, point.n, point.branch, x),
            lambda x: qes_wavefunction(p, point.n, point.branch, v, x),
            calE, grid)
        worst = max(worst, r)
    return worst, "max Schrodinger residual of closed-form triples on [0.3,6]"


def _check_spectral_equivalence(params, n_max, rng):
    p = params.replace(g=0.7)
    oracle = regular_spectrum(p, level_count=5, truncation=240).values
    worst = 0.0
    for branch in _BRANCHES:
        hits = eigenvalue_scan(p, branch, float(oracle[0]) - 0.25,
                               float(oracle[2]) + 0.25, steps=70)
        for target in oracle[:3]:
            if not hits:
                return math.inf, "scan located no levels"
            nearest = min(hits, key=lambda h: abs(h.E_or_calE - target))
            worst = max(worst, abs(nearest.E_or_calE - target))
    return worst, "connection zeros vs diagonalization, 3 levels per branch"


def _check_oracle_eigensolver(params, n_max, rng):
    osc = fd_eigensolve(lambda x: x * x, (-10.0, 10.0), "dirichlet", count=3)
    well = fd_eigensolve(lambda x: -6.0 / np.cosh(x) ** 2, (-15.0, 15.0),
                         "dirichlet", count=2)
    worst = max(float(np.max(np.abs(np.array(osc) - [1.0, 3.0, 5.0]))),
                float(np.max(np.abs(np.array(well) - [-4.0, -1.0]))))
    return worst, "finite-difference eigensolver on solvable potentials"


_CHECKS = (
    ("qes_point_counts", _check_qes_point_counts, 0.0),
    ("juddian_consistency", _check_juddian_consistency, 1e-6),
    ("bethe_triple", _check_bethe_triple, 1e-8),
    ("qp_proportionality", _check_qp_proportionality, 1e-10),
    ("q_symmetric_identity", _check_q_symmetric_identity, 1e-6),
    ("potential_form_equivalence", _check_potential_form_equivalence, 1e-10),
    ("schrodinger_residual", _check_schrodinger_residual, 1e-6),
    ("spectral_equivalence", _check_spectral_equivalence, 1e-4),
    ("oracle_eigensolver", _check_oracle_eigensolver, 1e-6),
)


def run_checks(params: ModelParams | None = None, n_max: int = 3,
               seed: int = 1234, tolerance_scale: float = 1.0,
               names: tuple[str, ...] | None = None) -> dict:
    """Run the named suites; returns the JSON-ready report dict."""
    if params is None:
        params = DEFAULT_PARAMS
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if tolerance_scale < 0.0:
        raise ValueError("tolerance_scale must be non-negative")
    selected = [c for c in _CHECKS if names is None or c[0] in names]
    if names is not None:
        unknown = set(names) - {c[0] for c in _CHECKS}
        if unknown:
            raise ValueError(f"unknown check names: {sorted(unknown)}")
    checks = []
    all_passed = True
    for name, fn, base_tol in selected:
        rng = np.random.default_rng(seed)
        tol = base_tol * tolerance_scale
        t0 = time.perf_counter()
        observed, detail = fn(params, n_max, rng)
        seconds = time.perf_counter() - t0
        passed = bool(observed <= tol)
        all_passed = all_passed and passed
        checks.append({
            "name": name,
            "passed": passed,
            "tolerance": tol,
            "observed": float(observed),
            "detail": detail,
            "seconds": seconds,
        })
    return {
        "params": {"delta": params.delta, "epsilon": params.epsilon,
                   "omega": params.omega},
        "n_max": n_max,
        "seed": seed,
        "tolerance_scale": tolerance_scale,
        "all_passed": all_passed,
        "checks": checks,
    }


def summary_lines(report: dict) -> list[str]:
    lines = []
    for chk in report["checks"]:
        lines.append("%-28s %s   observed %.3e  tol %.1e  (%.2f s)" % (
            chk["name"], "PASS" if chk["passed"] else "FAIL",
            chk["observed"], chk["tolerance"], chk["seconds"]))
    lines.append("overall: %s" % ("PASS" if report["all_passed"] else "FAIL"))
    return lines
