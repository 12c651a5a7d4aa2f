"""Bethe-ansatz root sets behind each exceptional eigenfunction.

At a Juddian coupling the degree-n polynomial factor of the eigenfunction
has roots z_1..z_n obeying a Gaudin-like coupled system,

  sum_{j!=i} 2w/(z_i-z_j) = (n w^2 + 2 s eps w)/(w z_i - s g)
                          + (n w^2 - w^2)/(w z_i + s g) + 2 s g,   s = +/-1,

with the sum rule Delta^2 + 2 n g^2 + 2 s w g sum_i z_i = 0.  Roots are
obtained from the companion matrix of the truncated series polynomial in
u = (g - w z)/(g + w z) (after the Moebius map) and cross-polished by a
damped Newton iteration on the residuals.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constraint import QSequence, _check_degree, _recurrence, q_sequence
from .errors import (ConvergenceError, MapSingularityError,
                     RootCollisionError)
from .model import Branch, ModelParams

__all__ = [
    "BetheRoots",
    "GaudinParams",
    "bethe_residuals",
    "solve_bethe",
    "constraint_residual",
    "to_gaudin",
    "q_from_roots",
]


@dataclass(frozen=True)
class BetheRoots:
    """Root set for one exceptional level (roots sorted by real, then imag)."""

    params: ModelParams
    n: int
    branch: Branch
    roots: np.ndarray
    residual_norm: float
    degenerate_atomic: bool = False


@dataclass(frozen=True)
class GaudinParams:
    """Parameters (A, B, C, gamma), multiplicity M and quasimomenta v_j."""

    A: float
    B: float
    C: float
    gamma: float
    M: int
    v: np.ndarray
    calE: float | None = None

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.v, dtype=complex))
        object.__setattr__(self, "v", v)
        if self.M != len(v):
            raise ValueError(f"M = {self.M} but {len(v)} quasimomenta given")
        if self.calE is None:
            object.__setattr__(self, "calE", float((self.A * v.sum()).real))


def _raw_residuals(z: np.ndarray, params: ModelParams, n: int,
                   s: int) -> np.ndarray:
    w, g = params.omega, params.g
    zc = z[:, None] - z[None, :]
    np.fill_diagonal(zc, 1.0)          # dummy; the diagonal is zeroed below
    pair_terms = 2.0 * w / zc
    np.fill_diagonal(pair_terms, 0.0)
    return (pair_terms.sum(axis=1)
            - (n * w * w + 2.0 * s * params.epsilon * w) / (w * z - s * g)
            - (n * w * w - w * w) / (w * z + s * g)
            - 2.0 * s * g)


def bethe_residuals(roots, params: ModelParams, n: int,
                    branch: Branch) -> np.ndarray:
    """Residual vector of the coupled root equations (zero at a solution)."""
    n = _check_degree(n)
    branch = Branch.parse(branch)
    z = np.atleast_1d(np.asarray(roots, dtype=complex))
    if len(z) != n:
        raise ValueError(f"expected {n} roots, got {len(z)}")
    scale = max(1.0, float(np.max(np.abs(z))))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) < 1e-12 * scale:
                raise RootCollisionError(
                    f"roots {i} and {j} coincide at z = {z[i]:.6g}",
                    indices=(i, j))
    w, g = params.omega, params.g
    for i, zi in enumerate(z):
        for pole in (g / w, -g / w):
            if abs(zi - branch.sign * pole) < 1e-12 * max(1.0, abs(pole)):
                raise RootCollisionError(
                    f"root {i} sits on the pole z = {branch.sign * pole:.6g}",
                    indices=(i,))
    return _raw_residuals(z, params, n, branch.sign)


def _jacobian(z: np.ndarray, params: ModelParams, n: int,
              s: int) -> np.ndarray:
    w, g = params.omega, params.g
    zc = z[:, None] - z[None, :]
    np.fill_diagonal(zc, 1.0)          # dummy; the diagonal is zeroed below
    off = 2.0 * w / zc ** 2
    np.fill_diagonal(off, 0.0)
    diag = (-off.sum(axis=1)
            + w * (n * w * w + 2.0 * s * params.epsilon * w)
            / (w * z - s * g) ** 2
            + w * (n * w * w - w * w) / (w * z + s * g) ** 2)
    jac = off.copy()
    np.fill_diagonal(jac, diag)
    return jac


def _sorted(z: np.ndarray) -> np.ndarray:
    order = np.lexsort((z.imag, z.real))
    return z[order]


def _polynomial_route(params: ModelParams, n: int,
                      branch: Branch) -> np.ndarray:
    """Roots via the companion matrix of the u-space series polynomial."""
    coeffs = q_sequence(params, n, branch, last=n).values
    if abs(coeffs[-1]) < 1e-12 * np.max(np.abs(coeffs)):
        raise MapSingularityError(
            "leading series coefficient vanishes: a root sits at z = -g/w "
            "(degenerate atomic factor)")
    u = np.roots(coeffs[::-1])
    if np.any(np.abs(u - 1.0) < 1e-10):
        raise MapSingularityError("series root at u = 1 maps to z = infinity")
    # The series variable is centred on the branch-dependent singular pair
    # z = +-s g/w, so the inverse map carries the branch sign.
    g_over_w = params.g / params.omega
    return -branch.sign * g_over_w * (u + 1.0) / (u - 1.0)


def _newton_route(z0: np.ndarray, params: ModelParams, n: int,
                  branch: Branch, tol: float = 1e-12,
                  max_iter: int = 60) -> np.ndarray:
    s = branch.sign
    z = z0.astype(complex).copy()
    fvec = _raw_residuals(z, params, n, s)
    norm = float(np.max(np.abs(fvec)))
    for _ in range(max_iter):
        if norm <= tol or not np.isfinite(norm):
            break
        try:
            dz = np.linalg.solve(_jacobian(z, params, n, s), -fvec)
        except np.linalg.LinAlgError:
            raise ConvergenceError("singular Jacobian in root polish",
                                   best=z, residual=norm)
        lam, accepted = 1.0, False
        while lam >= 1.0 / 1024.0:
            z_try = z + lam * dz
            f_try = _raw_residuals(z_try, params, n, s)
            n_try = float(np.max(np.abs(f_try)))
            if np.isfinite(n_try) and n_try < (1.0 - 0.25 * lam) * norm:
                z, fvec, norm = z_try, f_try, n_try
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            break
    if not (norm <= 10.0 * tol or norm < 1e-10):
        raise ConvergenceError(
            f"Newton polish stalled at residual {norm:.3e}",
            best=z, residual=norm)
    return z


def constraint_residual(br: BetheRoots) -> float:
    """|Delta^2 + 2 n g^2 + 2 s w g sum z_i| for a root set."""
    p = br.params
    s = br.branch.sign
    return float(abs(p.delta ** 2 + 2.0 * br.n * p.g ** 2
                     + 2.0 * s * p.omega * p.g * br.roots.sum()))


def solve_bethe(params: ModelParams, n: int, branch: Branch, *,
                qes_rtol: float = 1e-6, tol: float = 1e-12) -> BetheRoots:
    """Solve the coupled root equations at a Juddian coupling.

    The polynomial route provides the configuration (and the seed); the
    Newton route polishes it.  Delta = 0 short-circuits to the degenerate
    configuration z_i = -g/w for all i (coincident roots are poles of the
    residual formula, so that check is skipped there).
    """
    n = _check_degree(n)
    branch = Branch.parse(branch)
    w, g = params.omega, params.g
    if params.delta == 0.0:
        z = np.full(n, -g / w, dtype=complex)
        return BetheRoots(params=params, n=n, branch=branch, roots=z,
                          residual_norm=0.0, degenerate_atomic=True)
    pval, _, pscale = _recurrence(n, (2.0 * g) ** 2, params.delta ** 2,
                                  branch.sign * params.epsilon, w)
    if abs(pval) > qes_rtol * pscale:
        raise ValueError(
            f"parameters are not at an exceptional point for n = {n}, "
            f"branch {branch}: scaled constraint value {abs(pval) / pscale:.3e}")
    z = _polynomial_route(params, n, branch)
    z = _newton_route(z, params, n, branch, tol=tol)
    z = _sorted(z)
    norm = float(np.max(np.abs(_raw_residuals(z, params, n, branch.sign))))
    br = BetheRoots(params=params, n=n, branch=branch, roots=z,
                    residual_norm=norm)
    if constraint_residual(br) > 1e-8:
        raise ConvergenceError(
            f"root-sum rule violated: {constraint_residual(br):.3e}",
            best=z, residual=norm)
    return br


def to_gaudin(br: BetheRoots) -> GaudinParams:
    """Map a root set to the Gaudin-type parameter block (A, B, C, gamma).

    v_j = -z_j and calE = A sum v_j, checked against the closed form
    -Delta^2/w^2 - 2 n g^2/w^2 to 1e-8.
    """
    p = br.params
    w, g, n = p.omega, p.g, br.n
    e = p.epsilon / w
    if br.branch is Branch.PLUS:
        A, B, C = -2.0 * g / w, n + 2.0 * e, float(n - 1)
    else:
        A, B, C = 2.0 * g / w, float(n - 1), n - 2.0 * e
    v = -br.roots
    cal = A * v.sum()
    expected = -p.delta ** 2 / w ** 2 - 2.0 * n * g ** 2 / w ** 2
    if abs(cal - expected) > 1e-8:
        raise ValueError(
            f"energy functional mismatch: A*sum(v) = {cal:.10g} vs "
            f"{expected:.10g}; root set invalid")
    return GaudinParams(A=A, B=B, C=C, gamma=2.0 * g / w, M=n, v=v,
                        calE=float(cal.real))


def q_from_roots(br: BetheRoots) -> QSequence:
    """Series coefficients reconstructed from the roots alone.

    Expands ((-1)^n / w) prod_k [(s g/w + z_k) u + (s g/w - z_k)] with s the
    branch sign; equal to the recurrence coefficients up to overall
    normalization (compare after scaling both to Q_0 = 1).
    """
    p = br.params
    w, g, n = p.omega, p.g, br.n
    gw = br.branch.sign * g / p.omega
    if np.any(np.abs(br.roots + gw) < 1e-10 * max(1.0, abs(gw))):
        warnings.warn("degenerate atomic factor z_k = -s g/w: leading "
                      "coefficient deflates", stacklevel=2)
    coeffs = np.array([1.0 + 0.0j])
    for zk in br.roots:
        coeffs = np.convolve(coeffs, np.array([gw - zk, gw + zk]))
    coeffs = coeffs * ((-1.0) ** n / w)
    if np.max(np.abs(coeffs.imag)) > 1e-9 * max(1.0, np.max(np.abs(coeffs))):
        raise ValueError("root set not closed under conjugation")
    vals = coeffs.real.copy()
    return QSequence(n=n, values=vals, normalization=float(vals[0]))
