"""Numerical verification layer for the transformed spectral problems.

Two independent kinds of evidence are produced here:

* residual_check certifies closed-form (calE, Psi, V) triples by evaluating
  the Schrodinger equation pointwise with high-order finite differences;

* connection (Wronskian) eigensolvers quantize the transformed equation and
  compare against direct diagonalization of the model.

The transformed potentials are singular at x = 0 with ell(ell+1)/x^2 leading
behavior, and the solution family equivalent to the model carries the
x^{-ell} Frobenius branch there (a regular/bounded boundary condition would
select the wrong solution and does not reproduce the model spectrum).

Two matching schemes are provided.  connection_wronskian works on the real
half line: x^{-ell} branch at the origin against the recessive
exp(-(g/w)^2 cosh x) direction at large x.  Its zeros certify the closed-form
exceptional solutions (which are recessive), but decay at real infinity is
not the model's closedness condition, so its zero set only approximates the
regular spectrum.  segment_wronskian instead follows x = i*theta,
theta in (0, pi), where cosh x = cos theta runs between the equation's two
finite singular points; selecting the singular Frobenius branch at BOTH
endpoints is the model's eigenvalue condition, and eigenvalue_scan built on
it reproduces the diagonalization spectrum to ~1e-9.  fd_eigensolve is an
independent finite-difference oracle for regular potentials.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import EvaluationRangeError, MeshError
from .model import Branch, ModelParams
from .potentials import FullCoefficients, PotentialKind, PotentialSpec, \
    full_coefficients, full_energy

__all__ = [
    "Grid",
    "ConnectionResult",
    "residual_check",
    "indicial_exponent",
    "matched_wronskian",
    "connection_wronskian",
    "segment_wronskian",
    "eigenvalue_scan",
    "fd_eigensolve",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grid:
    """Uniform evaluation grid on [x_min, x_max], bounded away from 0."""

    x_min: float
    x_max: float
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if self.x_min <= 0.0:
            raise ValueError("x_min must be positive")
        if self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("need at least two grid points")
        d = np.diff(pts)
        if np.any(d <= 0.0):
            raise ValueError("points must be strictly increasing")
        if not np.allclose(d, d[0], rtol=1e-9, atol=0.0):
            raise ValueError("points must be uniformly spaced")
        if not (math.isclose(pts[0], self.x_min)
                and math.isclose(pts[-1], self.x_max)):
            raise ValueError("points must span [x_min, x_max]")

    @classmethod
    def uniform(cls, x_min: float, x_max: float, count: int) -> "Grid":
        if count < 2:
            raise ValueError("count must be at least 2")
        return cls(x_min=float(x_min), x_max=float(x_max),
                   points=np.linspace(x_min, x_max, count))


@dataclass(frozen=True)
class ConnectionResult:
    """One evaluation (or located zero) of a connection mismatch."""

    E_or_calE: float
    wronskian: float
    left_exponent: float
    converged: bool


# ---------------------------------------------------------------------------
# pointwise residual certification

_STENCIL = np.array([1.0 / 90.0, -3.0 / 20.0, 1.5, -49.0 / 18.0,
                     1.5, -3.0 / 20.0, 1.0 / 90.0])


def _second_derivative(Psi, x: np.ndarray, h: float) -> np.ndarray:
    """6th-order central second derivative plus one Richardson step."""
    def stencil(step):
        acc = np.zeros_like(x)
        for j, c in zip(range(-3, 4), _STENCIL):
            acc += c * np.asarray(Psi(x + j * step))
        return acc / (step * step)

    d_h = stencil(h)
    d_h2 = stencil(0.5 * h)
    # leading error is O(h^6): one extrapolation step removes it
    return (64.0 * d_h2 - d_h) / 63.0


def residual_check(V, Psi, calE: float, grid: Grid, *,
                   h: float = 1e-3, max_halvings: int = 6) -> float:
    """Max of |-Psi'' + V Psi - calE Psi| / max|Psi| over the grid.

    The step is halved until the residual stops improving, guarding both
    truncation (h too large) and roundoff (h too small).  Callables are
    probed at extended-precision abscissas: steep exponential envelopes
    amplify argument rounding by the local log-derivative, and for the
    fastest-growing closed forms that alone would swamp a 1e-6 target.
    Evaluators that only support double silently degrade, which is fine
    for moderate envelopes.
    """
    x = grid.points.astype(np.longdouble)
    psi = np.asarray(Psi(x))
    vx = np.asarray(V(x))
    if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(vx))):
        raise EvaluationRangeError(
            "wavefunction or potential not finite on the grid; "
            "narrow the grid")
    scale = np.max(np.abs(psi))
    if scale == 0.0:
        raise EvaluationRangeError("wavefunction vanishes on the whole grid")
    best = math.inf
    prev = math.inf
    step = h
    for _ in range(max_halvings + 1):
        d2 = _second_derivative(Psi, x, step)
        if not np.all(np.isfinite(d2)):
            raise EvaluationRangeError(
                "difference stencil left the representable range; "
                "narrow the grid")
        r = float(np.max(np.abs(-d2 + vx * psi - calE * psi)) / scale)
        best = min(best, r)
        if r > prev:          # roundoff has taken over
            break
        if prev - r < 0.05 * prev:
            break
        prev = r
        step *= 0.5
    return best


# ---------------------------------------------------------------------------
# Frobenius data at the singular endpoints

def indicial_exponent(params: ModelParams, E: float, branch: Branch) -> float:
    """Exponent ell with V ~ ell(ell+1)/x^2 at x -> 0; selected branch x^{-ell}.

    ell = E/w + g^2/w^2 + eps/w + sign/2.  The pole coefficient of the
    branch potential factorizes accordingly for either branch sign (the
    absolute term of the partial-fraction pole at cosh x = 1 equals
    ell(ell+1)/2).
    """
    branch = Branch.parse(branch)
    w = params.omega
    return E / w + params.g ** 2 / w ** 2 + params.epsilon / w \
        + branch.sign / 2.0


def _even_series_cosh(K: int) -> np.ndarray:
    return np.array([1.0 / math.factorial(2 * m) for m in range(K + 1)])


def _even_series_sinh2(K: int) -> np.ndarray:
    c = np.zeros(K + 1)
    for m in range(1, K + 1):
        c[m] = 2.0 ** (2 * m - 1) / math.factorial(2 * m)
    return c


def _series_recip(c: np.ndarray, K: int) -> np.ndarray:
    r = np.zeros(K + 1)
    r[0] = 1.0 / c[0]
    for m in range(1, K + 1):
        top = min(m, len(c) - 1)
        r[m] = -np.dot(c[1:top + 1], r[m - 1::-1][:top]) / c[0]
    return r


def _regular_part_series(coef: FullCoefficients, calE: float,
                         K: int) -> np.ndarray:
    """Even Taylor coefficients of V(x) - 2a/x^2 - calE about x = 0.

    a = coef.pole_minus; 2a/x^2 is the full singular part since
    (cosh x - 1) = (x^2/2) s(x) with s(0) = 1.
    """
    ch = _even_series_cosh(K + 1)
    sh2 = _even_series_sinh2(K + 1)
    s = np.array([2.0 / math.factorial(2 * m + 2) for m in range(K + 2)])
    rs = _series_recip(s, K + 1)
    chp1 = ch.copy()
    chp1[0] += 1.0
    t = _series_recip(chp1, K + 1)
    W = np.zeros(K + 1)
    W[0] = coef.const - calE
    for m in range(K + 1):
        W[m] += (coef.cosh * ch[m] + coef.sinh2 * sh2[m]
                 + coef.pole_plus * t[m]
                 + 2.0 * coef.pole_minus * rs[m + 1])
    return W


def _frobenius_state(coef: FullCoefficients, ell: float, calE: float,
                     x0: float, K: int, *, segment: bool):
    """(Psi, Psi') of the x^{-ell} branch at x0 (or theta0 on the segment).

    Returns (state, converged): convergence fails near half-integer ell
    (indicial resonance) where the branch ceases to be a pure power series.
    """
    W = _regular_part_series(coef, calE, K)
    if segment:
        W = -W * np.array([(-1.0) ** m for m in range(K + 1)])
    a = np.zeros(K + 1)
    a[0] = 1.0
    ok = True
    for k in range(1, K + 1):
        den = 2.0 * k * (2.0 * k - 1.0 - 2.0 * ell)
        if den == 0.0:
            ok = False
            a[k:] = 0.0
            break
        a[k] = np.dot(W[:k], a[k - 1::-1]) / den
    x2 = x0 * x0
    u = 0.0
    du = 0.0
    for k in range(K, -1, -1):
        u = u * x2 + a[k]
    for k in range(K, 0, -1):
        du = du * x2 + 2 * k * a[k]
    du *= x0
    tail = abs(a[K] * x0 ** (2 * K))
    if not (tail <= 1e-10 * max(1.0, abs(u))):
        ok = False
    amp = x0 ** (-ell)
    psi = amp * u
    dpsi = amp * (du - (ell / x0) * u)
    nrm = math.hypot(psi, dpsi)
    return np.array([psi / nrm, dpsi / nrm]), ok


# ---------------------------------------------------------------------------
# two-sided matching

def matched_wronskian(V, calE: float, x_left: float, x_right: float,
                      x_match: float, left_state, right_state, *,
                      rtol: float = 1e-10) -> tuple[float, bool]:
    """Normalized Wronskian mismatch of two-sided integration of
    -Psi'' + V Psi = calE Psi; zero iff the sides are proportional.
    """
    if not x_left < x_match < x_right:
        raise ValueError("need x_left < x_match < x_right")

    def rhs(x, y):
        return [y[1], (V(x) - calE) * y[0]]

    sol_l = solve_ivp(rhs, (x_left, x_match), np.asarray(left_state, float),
                      method="RK45", rtol=rtol, atol=1e-280)
    sol_r = solve_ivp(rhs, (x_right, x_match), np.asarray(right_state, float),
                      method="RK45", rtol=rtol, atol=1e-280)
    ok = sol_l.success and sol_r.success
    pl, dl = sol_l.y[0][-1], sol_l.y[1][-1]
    pr, dr = sol_r.y[0][-1], sol_r.y[1][-1]
    denom = math.sqrt((pl * pl + dl * dl) * (pr * pr + dr * dr))
    if denom == 0.0 or not math.isfinite(denom):
        return math.nan, False
    return (dl * pr - pl * dr) / denom, ok


def _spec_data(spec: PotentialSpec):
    if spec.kind is not PotentialKind.FULL:
        raise ValueError("connection solvers take kind='full' potentials")
    return spec.params, float(spec.energy), spec.branch


def connection_wronskian(spec: PotentialSpec, calE: float,
                         x_min: float = 0.3, x_max: float | None = None, *,
                         x_match: float = 1.0, rtol: float = 1e-10,
                         series_terms: int = 14) -> ConnectionResult:
    """Real-half-line mismatch: x^{-ell} branch at 0 vs decay at infinity.

    calE is the probe value and may be off shell; the potential (and its
    indicial exponent) are fixed by spec.energy.  Zeros certify recessive
    solutions such as the closed-form exceptional ones; see the module
    docstring for why this zero set is not the full regular spectrum.
    """
    params, energy, branch = _spec_data(spec)
    w = params.omega
    k = params.g ** 2 / w ** 2
    if k <= 0.0:
        raise ValueError("needs g > 0 (the recessive direction degenerates)")
    if x_max is None:
        x_max = math.acosh(max(35.0 / k, math.cosh(x_match + 0.5)))
    if not 0.0 < x_min <= 0.15 * x_max:
        raise ValueError("x_min must be positive and well inside the domain")
    if k * math.cosh(x_max) < 30.0:
        raise ValueError("x_max too small: asymptotic separation "
                         "(g/w)^2 cosh x_max >= 30 required")
    ell = indicial_exponent(params, energy, branch)
    coef = full_coefficients(params, energy, branch)
    left, ok_series = _frobenius_state(coef, ell, calE, x_min, series_terms,
                                       segment=False)
    # recessive direction: Psi'/Psi = -k sinh x + a + b/sinh x + ...
    a_as = -(coef.cosh + k) / (2.0 * k)
    b_as = (a_as * a_as - coef.const + calE) / (2.0 * k)
    sh = math.sinh(x_max)
    right = np.array([1.0, -k * sh + a_as + b_as / sh])
    wr, ok = matched_wronskian(
        lambda x: (coef.const + coef.cosh * math.cosh(x)
                   + coef.sinh2 * math.sinh(x) ** 2
                   + coef.pole_minus / (math.cosh(x) - 1.0)
                   + coef.pole_plus / (math.cosh(x) + 1.0)),
        calE, x_min, x_max, x_match, left, right, rtol=rtol)
    return ConnectionResult(E_or_calE=calE, wronskian=wr, left_exponent=ell,
                            converged=ok and ok_series and math.isfinite(wr))


def segment_wronskian(params: ModelParams, E: float, branch: Branch, *,
                      t_min: float = 0.25, rtol: float = 1e-10,
                      series_terms: int = 16) -> ConnectionResult:
    """Mismatch along x = i*theta between the two finite singular points.

    With cosh x = cos theta the equation becomes
    Psi'' = (calE - V(i theta)) Psi on theta in (0, pi), singular at both
    endpoints; the x^{-ell} branch is imposed at theta = 0 and its mirror
    ((pi - theta)^{-ell'}, ell' from eps -> -eps and the opposite branch) at
    theta = pi.  Zeros of this mismatch in E reproduce the model spectrum.
    """
    branch = Branch.parse(branch)
    if not 0.0 < t_min <= 0.45:
        raise ValueError("t_min must lie in (0, 0.45]")
    calE = full_energy(params, E, branch)
    ell = indicial_exponent(params, E, branch)
    coef = full_coefficients(params, E, branch)
    left, ok_l = _frobenius_state(coef, ell, calE, t_min, series_terms,
                                  segment=True)
    mirror_params = params.replace(epsilon=-params.epsilon)
    mirror_branch = Branch(-branch.sign)
    ell_r = indicial_exponent(mirror_params, E, mirror_branch)
    mcoef = full_coefficients(mirror_params, E, mirror_branch)
    right, ok_r = _frobenius_state(mcoef, ell_r, calE, t_min, series_terms,
                                   segment=True)

    def rhs_factory(c):
        def rhs(t, y):
            co = math.cos(t)
            V = (c.const + c.cosh * co - c.sinh2 * math.sin(t) ** 2
                 + c.pole_minus / (co - 1.0) + c.pole_plus / (co + 1.0))
            return [y[1], (calE - V) * y[0]]
        return rhs

    half = 0.5 * math.pi
    sol_l = solve_ivp(rhs_factory(coef), (t_min, half), left,
                      method="RK45", rtol=rtol, atol=1e-280)
    sol_r = solve_ivp(rhs_factory(mcoef), (t_min, half), right,
                      method="RK45", rtol=rtol, atol=1e-280)
    pl, dl = sol_l.y[0][-1], sol_l.y[1][-1]
    pr, dr = sol_r.y[0][-1], -sol_r.y[1][-1]   # d/dtheta flips under mirror
    denom = math.sqrt((pl * pl + dl * dl) * (pr * pr + dr * dr))
    wr = (dl * pr - pl * dr) / denom if denom > 0.0 else math.nan
    ok = (sol_l.success and sol_r.success and ok_l and ok_r
          and math.isfinite(wr))
    return ConnectionResult(E_or_calE=E, wronskian=wr, left_exponent=ell,
                            converged=ok)


def _resonance_cuts(params: ModelParams, branch: Branch, e_min: float,
                    e_max: float, terms: int) -> list[float]:
    """Energies where either endpoint exponent hits a series pole.

    The Frobenius recursion divides by 2k(2k - 1 - 2*ell); the mismatch is
    discontinuous in E wherever ell (or the mirrored right exponent) crosses
    m - 1/2 for a computed step m.  Both exponent families are affine in E,
    so the cut energies are available in closed form.
    """
    w = params.omega
    k = (params.g / w) ** 2
    e = params.epsilon / w
    s = branch.sign
    cuts = []
    for base in (k + e + 0.5 * s, k - e - 0.5 * s):
        for m in range(1, terms + 1):
            E = w * (m - 0.5 - base)
            if e_min < E < e_max:
                cuts.append(E)
    return sorted(cuts)


def eigenvalue_scan(params: ModelParams, branch: Branch, e_min: float,
                    e_max: float, steps: int = 160, *,
                    accept_tol: float = 1e-4, xtol: float = 1e-7,
                    rtol: float = 1e-10,
                    series_terms: int = 16) -> list[ConnectionResult]:
    """Locate model energies as zeros of the segment mismatch.

    The range is first split at the closed-form indicial resonances
    (half-integer exponent, where the pure-power branch degenerates and the
    mismatch jumps): each smooth sub-interval is then scanned uniformly,
    sign changes bracketed and bisected to xtol.  A root is accepted only if
    the mismatch there is actually small (|W| < accept_tol), which rejects
    any residual pseudo-crossing.  Empty input range or no sign change gives
    an empty list.  Levels within the resonance guard band (1e-5 in E) are
    not observable here; at exceptional couplings the crossing energy itself
    is resonant by construction and must come from the constraint machinery.
    """
    branch = Branch.parse(branch)
    if steps < 1 or not e_min < e_max:
        log.debug("eigenvalue_scan: empty or inverted range [%s, %s]",
                  e_min, e_max)
        return []

    def w_of(E):
        return segment_wronskian(params, E, branch, rtol=rtol,
                                 series_terms=series_terms).wronskian

    guard = 1e-5 * params.omega
    segments: list[tuple[float, float, bool, bool]] = []
    lo, lo_cut = e_min, False
    for c in _resonance_cuts(params, branch, e_min, e_max, series_terms):
        if c - guard > lo:
            segments.append((lo, c - guard, lo_cut, True))
        lo, lo_cut = c + guard, True
    if e_max > lo:
        segments.append((lo, e_max, lo_cut, False))

    span = e_max - e_min
    out: list[ConnectionResult] = []
    for seg_lo, seg_hi, cut_l, cut_r in segments:
        n_seg = max(3, int(round(steps * (seg_hi - seg_lo) / span)))
        pts = list(np.linspace(seg_lo, seg_hi, n_seg + 1))
        # near a resonance the pole admixture dominates out to a parameter-
        # dependent halo; geometric clustering brackets its edge (and any
        # genuine zero beyond it) at every scale down to the guard band
        spacing = (seg_hi - seg_lo) / n_seg
        for edge, active, sign in ((seg_lo, cut_l, 1.0), (seg_hi, cut_r, -1.0)):
            d = 3.0 * guard
            while active and d < spacing:
                pts.append(edge + sign * d)
                d *= 3.0
        Es = np.unique(np.array(pts))
        n_seg = len(Es) - 1
        vals = np.array([w_of(E) for E in Es])
        for i in range(n_seg):
            a, b = vals[i], vals[i + 1]
            if not (np.isfinite(a) and np.isfinite(b)) or a * b > 0.0:
                continue
            if a == 0.0 and i > 0:
                continue
            root = brentq(w_of, Es[i], Es[i + 1], xtol=xtol)
            res = segment_wronskian(params, root, branch, rtol=rtol,
                                    series_terms=series_terms)
            if res.converged and abs(res.wronskian) < accept_tol:
                out.append(ConnectionResult(E_or_calE=float(root),
                                            wronskian=res.wronskian,
                                            left_exponent=res.left_exponent,
                                            converged=True))
            else:
                log.debug("eigenvalue_scan: rejected pseudo-crossing near "
                          "E=%.6f (|W|=%.2e)", root, abs(res.wronskian))
    if not out:
        log.debug("eigenvalue_scan: no accepted zeros in [%s, %s] (%d steps)",
                  e_min, e_max, steps)
    return out


# ---------------------------------------------------------------------------
# finite-difference oracle for regular potentials

def fd_eigensolve(V, interval: tuple[float, float], boundary: str = "dirichlet",
                  count: int = 1, mesh: int = 2400) -> list[float]:
    """Lowest eigenvalues of -Psi'' + V Psi on [a, b], Richardson-refined.

    boundary 'dirichlet' fixes Psi at both ends; 'even_parity' imposes
    Psi'(a) = 0 instead (ghost-node reflection, symmetrized).
    """
    a, b = interval
    if not a < b:
        raise ValueError("empty interval")
    if boundary not in ("dirichlet", "even_parity"):
        raise ValueError(f"unknown boundary {boundary!r}")
    if count < 1:
        raise ValueError("count must be positive")
    if mesh < 8 * count + 16:
        raise MeshError("mesh too coarse for the requested eigenvalue count")

    def levels(n):
        h = (b - a) / (n + 1)
        if boundary == "dirichlet":
            x = a + h * np.arange(1, n + 1)
            d = 2.0 / h ** 2 + np.asarray(V(x), dtype=float)
            e = np.full(n - 1, -1.0 / h ** 2)
        else:
            x = a + h * np.arange(0, n + 1)
            d = 2.0 / h ** 2 + np.asarray(V(x), dtype=float)
            e = np.full(n, -1.0 / h ** 2)
            e[0] = -math.sqrt(2.0) / h ** 2   # symmetrized ghost reflection
        return eigh_tridiagonal(d, e, select="i",
                                select_range=(0, count - 1),
                                eigvals_only=True)

    coarse = levels(mesh)
    fine = levels(2 * mesh)
    if np.max(np.abs(fine - coarse)) > 1e-2 * max(1.0, np.max(np.abs(fine))):
        raise MeshError(
            "mesh too coarse: refinement moved an eigenvalue by more than 1%")
    return list((4.0 * fine - coarse) / 3.0)
