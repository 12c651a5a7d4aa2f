"""Hyperbolic (generalised Poschl-Teller type) potentials on the half line.

Three related families, all even in x and singular at x = 0:

* the general Gaudin-type potential V(x; A, B, C, gamma, M),
* its specialisation to the two exceptional branches of the AQRM
  ("qes" kind, parameterised by the level index n), and
* the one-parameter extension carrying an arbitrary AQRM energy E
  ("full" kind), which reduces to the qes kind at E = n*w - g^2/w + s*eps.

Each of the qes/full potentials is available in the two printed forms —
partial fractions in cosh x -/+ 1, and csch^2/coth*csch — which agree
identically; keeping both allows a nontrivial cross-check.

Shorthand used throughout: e = eps/w, k = g^2/w^2, ch = cosh x.
"""

from __future__ import annotations

import enum
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .bethe import GaudinParams
from .errors import EvaluationRangeError, SingularPointError
from .model import Branch, ModelParams, qes_energy

__all__ = [
    "PotentialKind",
    "PotentialForm",
    "PotentialSpec",
    "KkConstants",
    "CanonicalQesForm",
    "FullCoefficients",
    "gaudin_potential",
    "gaudin_wavefunction",
    "qes_potential",
    "qes_wavefunction",
    "full_potential",
    "full_energy",
    "full_coefficients",
    "evaluate_potential",
    "canonical_qes_form",
    "partner_component",
    "kk_constants",
]

_X_ABS_MAX = 350.0        # sinh^2 overflows not far beyond
_EXP_ARG_MAX = 700.0      # exp overflow guard for wavefunctions


class PotentialKind(enum.Enum):
    GAUDIN = "gaudin"
    QES = "qes"
    FULL = "full"


class PotentialForm(enum.Enum):
    PARTIAL_FRACTION = "partial_fraction"
    HYPERBOLIC = "hyperbolic"

    @classmethod
    def parse(cls, token) -> "PotentialForm":
        if isinstance(token, PotentialForm):
            return token
        return cls(str(token).strip().lower().replace("-", "_"))


@dataclass(frozen=True)
class PotentialSpec:
    """Which potential to evaluate; exactly the fields its kind needs."""

    kind: PotentialKind
    branch: Branch | None = None
    params: ModelParams | None = None
    n: int | None = None
    energy: float | None = None
    gaudin: GaudinParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        if self.branch is not None:
            object.__setattr__(self, "branch", Branch.parse(self.branch))
        need = {
            PotentialKind.GAUDIN: ("gaudin",),
            PotentialKind.QES: ("params", "branch", "n"),
            PotentialKind.FULL: ("params", "branch", "energy"),
        }[self.kind]
        allf = ("params", "branch", "n", "energy", "gaudin")
        for f in allf:
            have = getattr(self, f) is not None
            if f in need and not have:
                raise ValueError(f"kind={self.kind.value} requires '{f}'")
            if f not in need and have:
                raise ValueError(f"kind={self.kind.value} forbids '{f}'")


FullCoefficients = namedtuple(
    "FullCoefficients", ["const", "cosh", "sinh2", "pole_minus", "pole_plus"])


def _as_x(x, *, allow_zero: bool = False):
    arr = np.asarray(x)
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not allow_zero and np.any(arr == 0.0):
        raise SingularPointError("potential/wavefunction singular at x = 0")
    if np.any(np.abs(arr) > _X_ABS_MAX):
        raise EvaluationRangeError(
            f"|x| > {_X_ABS_MAX:g}: hyperbolic terms overflow double "
            "precision; narrow the grid")
    return arr, scalar


def _ret(vals: np.ndarray, scalar: bool):
    if not np.all(np.isfinite(vals)):
        raise EvaluationRangeError("evaluation overflowed; narrow the grid")
    return float(vals[0]) if scalar else vals


# ---------------------------------------------------------------------------
# general Gaudin-type family


def gaudin_potential(gp: GaudinParams, x):
    """V(x) for the general (A, B, C, gamma, M) family, term by term."""
    arr, scalar = _as_x(x)
    ch, sh2 = np.cosh(arr), np.sinh(arr) ** 2
    A, B, C, gam, M = gp.A, gp.B, gp.C, gp.gamma, gp.M
    v = (M * (M - 1.0 - B - C + 0.5 * A * gam * ch)
         + 0.25 * (B + C + 1.0) ** 2
         + A * A * gam * gam / 16.0 * sh2
         + 0.25 * A * gam * (C - B)
         - 0.25 * A * gam * (B + C) * ch
         + (2.0 * B + 1.0) * (2.0 * B + 3.0) / (8.0 * (ch - 1.0))
         - (2.0 * C + 1.0) * (2.0 * C + 3.0) / (8.0 * (ch + 1.0)))
    return _ret(v, scalar)


def gaudin_wavefunction(gp: GaudinParams, x):
    """Closed-form bound-state factor for the general family."""
    arr, scalar = _as_x(x)
    ch = np.cosh(arr)
    A, B, C, gam = gp.A, gp.B, gp.C, gp.gamma
    expo = 0.25 * A * gam * ch
    if np.any(np.abs(expo) > _EXP_ARG_MAX):
        raise EvaluationRangeError("exponential factor overflows; narrow the "
                                   "grid or evaluate in log space")
    psi = ((ch - 1.0) ** (-(0.5 * B + 0.25))
           * (ch + 1.0) ** (-(0.5 * C + 0.25))
           * np.exp(expo))
    prod = np.ones(arr.shape, dtype=np.result_type(arr.dtype, np.complex128))
    for vj in np.atleast_1d(gp.v):
        prod = prod * (0.5 * gam * ch + vj)
    out = psi * prod
    if np.max(np.abs(out.imag)) > 1e-9 * max(1.0, np.max(np.abs(out))):
        raise ValueError("quasimomenta not closed under conjugation")
    return _ret(out.real, scalar)


# ---------------------------------------------------------------------------
# exceptional-branch (qes) family


def qes_potential(params: ModelParams, n: int, branch: Branch, x,
                  form=PotentialForm.PARTIAL_FRACTION):
    """Branch potential at level index n, in either printed form."""
    branch = Branch.parse(branch)
    form = PotentialForm.parse(form)
    arr, scalar = _as_x(x)
    w = params.omega
    e = params.epsilon / w
    k = params.g ** 2 / w ** 2
    ch = np.cosh(arr)
    sh2 = np.sinh(arr) ** 2
    if form is PotentialForm.PARTIAL_FRACTION:
        if branch is Branch.PLUS:
            v = (e * e + k * k * sh2
                 + k * (1.0 - ch) + 2.0 * k * e * (1.0 + ch)
                 - (4.0 * n * n - 1.0) / (8.0 * (ch + 1.0))
                 + (2.0 * n + 1.0 + 4.0 * e) * (2.0 * n + 3.0 + 4.0 * e)
                 / (8.0 * (ch - 1.0)))
        else:
            v = (e * e + k * k * sh2
                 + k * (1.0 + ch) - 2.0 * k * e * (1.0 - ch)
                 + (4.0 * n * n - 1.0) / (8.0 * (ch - 1.0))
                 - (2.0 * n + 1.0 - 4.0 * e) * (2.0 * n + 3.0 - 4.0 * e)
                 / (8.0 * (ch + 1.0)))
    else:
        csch2 = 1.0 / sh2
        cothcsch = ch / sh2
        if branch is Branch.PLUS:
            v = (e * e + k * (1.0 + 2.0 * e) - k * (1.0 - 2.0 * e) * ch
                 + k * k * sh2
                 + 0.25 * ((2. * n + 1.) ** 2 + 8. * e * (1. + n + e)) * csch2
                 + 0.5 * (2. * n + 1. + 4. * e * (1. + n + e)) * cothcsch)
        else:
            v = (e * e + k * (1.0 - 2.0 * e) + k * (1.0 + 2.0 * e) * ch
                 + k * k * sh2
                 + 0.25 * ((2. * n + 1.) ** 2 - 8. * e * (1. + n - e)) * csch2
                 - 0.5 * (2. * n + 1. - 4. * e * (1. + n - e)) * cothcsch)
    return _ret(v, scalar)


def qes_wavefunction(params: ModelParams, n: int, branch: Branch, v, x):
    """Closed-form exceptional eigenfunction from the quasimomenta v_j."""
    branch = Branch.parse(branch)
    arr, scalar = _as_x(x)
    w = params.omega
    e = params.epsilon / w
    k = params.g ** 2 / w ** 2
    ch = np.cosh(arr)
    if np.any(k * ch > _EXP_ARG_MAX):
        raise EvaluationRangeError("exp(k cosh x) overflows; narrow the grid")
    if branch is Branch.PLUS:
        psi = (np.exp(-k * ch)
               * (ch - 1.0) ** (-(2.0 * n + 1.0 + 4.0 * e) / 4.0)
               * (ch + 1.0) ** (-(2.0 * n - 1.0) / 4.0))
    else:
        psi = (np.exp(k * ch)
               * (ch - 1.0) ** (-(2.0 * n - 1.0) / 4.0)
               * (ch + 1.0) ** (-(2.0 * n + 1.0 - 4.0 * e) / 4.0))
    gw = params.g / w
    prod = np.ones(arr.shape, dtype=np.result_type(arr.dtype, np.complex128))
    for vj in np.atleast_1d(np.asarray(v, dtype=complex)):
        prod = prod * (gw * ch + vj)
    out = psi * prod
    if np.max(np.abs(out.imag)) > 1e-9 * max(1.0, np.max(np.abs(out))):
        raise ValueError("quasimomenta not closed under conjugation")
    return _ret(out.real, scalar)


# ---------------------------------------------------------------------------
# energy-carrying (full) family


def full_coefficients(params: ModelParams, energy: float,
                      branch: Branch) -> FullCoefficients:
    """Partial-fraction coefficients of the full potential.

    V = const + cosh*ch + sinh2*sh^2 + pole_minus/(ch-1) + pole_plus/(ch+1).
    """
    branch = Branch.parse(branch)
    s = branch.sign
    w = params.omega
    e = params.epsilon / w
    k = params.g ** 2 / w ** 2
    E, eps, g2 = energy, params.epsilon, params.g ** 2
    w2 = w * w
    t_plus = 2.0 * E * w + 2.0 * eps * w + 2.0 * g2
    t_minus = 2.0 * E * w - 2.0 * eps * w + 2.0 * g2
    if s > 0:
        pole_m = (t_plus + 3.0 * w2) * (t_plus + w2) / (8.0 * w2 * w2)
        pole_p = -(t_minus + w2) * (t_minus - w2) / (8.0 * w2 * w2)
    else:
        pole_m = (t_plus + w2) * (t_plus - w2) / (8.0 * w2 * w2)
        pole_p = -(t_minus + 3.0 * w2) * (t_minus + w2) / (8.0 * w2 * w2)
    return FullCoefficients(
        const=e * e + k * (1.0 + 2.0 * s * e),
        cosh=2.0 * k * e - s * k,
        sinh2=k * k,
        pole_minus=pole_m,
        pole_plus=pole_p)


def full_potential(params: ModelParams, energy: float, branch: Branch, x,
                   form=PotentialForm.PARTIAL_FRACTION):
    """Potential carrying an arbitrary AQRM energy E (either printed form)."""
    branch = Branch.parse(branch)
    form = PotentialForm.parse(form)
    arr, scalar = _as_x(x)
    ch = np.cosh(arr)
    sh2 = np.sinh(arr) ** 2
    if form is PotentialForm.PARTIAL_FRACTION:
        c = full_coefficients(params, energy, branch)
        v = (c.const + c.cosh * ch + c.sinh2 * sh2
             + c.pole_minus / (ch - 1.0) + c.pole_plus / (ch + 1.0))
    else:
        s = branch.sign
        w = params.omega
        e = params.epsilon / w
        k = params.g ** 2 / w ** 2
        S = energy / w + k + 0.5
        csch2 = 1.0 / sh2
        cothcsch = ch / sh2
        v = (e * e + k * (1.0 + 2.0 * s * e) + (2.0 * k * e - s * k) * ch
             + k * k * sh2
             + (S * S + e * e + s * e) * csch2
             + (2.0 * e + s) * S * cothcsch)
    return _ret(v, scalar)


def full_energy(params: ModelParams, energy: float, branch: Branch) -> float:
    """Spectral parameter calE of the transformed problem at AQRM energy E."""
    branch = Branch.parse(branch)
    w = params.omega
    g2 = params.g ** 2
    return (-2.0 * energy * g2 / w ** 3 - 2.0 * g2 * g2 / w ** 4
            - params.delta ** 2 / w ** 2
            + branch.sign * 2.0 * g2 * params.epsilon / w ** 3)


def evaluate_potential(spec: PotentialSpec, x,
                       form=PotentialForm.PARTIAL_FRACTION):
    """Dispatch a PotentialSpec to the matching evaluator."""
    if spec.kind is PotentialKind.GAUDIN:
        return gaudin_potential(spec.gaudin, x)
    if spec.kind is PotentialKind.QES:
        return qes_potential(spec.params, spec.n, spec.branch, x, form)
    return full_potential(spec.params, spec.energy, spec.branch, x, form)


# ---------------------------------------------------------------------------
# canonical second-order form and companions


@dataclass(frozen=True)
class CanonicalQesForm:
    """P y'' + [Q - ((n-1)/2) P'] y' + [R - (n/2) Q' + n(n-1)/12 P''] y = 0.

    Coefficient arrays are ascending in z; P is degree 2, Q degree 2, R a
    scalar.
    """

    n: int
    branch: Branch
    p_coeffs: tuple[float, float, float]
    q_coeffs: tuple[float, float, float]
    r: float


def canonical_qes_form(params: ModelParams, n: int, branch: Branch,
                       energy: float | None = None) -> CanonicalQesForm:
    """Canonical quasi-exactly-solvable form of the branch equation.

    The coefficients already assume the branch energy relation; if `energy`
    is passed it is validated against n*w - g^2/w + s*eps.
    """
    branch = Branch.parse(branch)
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    w, g, eps = params.omega, params.g, params.epsilon
    if energy is not None:
        expect = qes_energy(params, n, branch)
        if abs(energy - expect) > 1e-9 * max(1.0, abs(expect)):
            raise ValueError(
                f"energy {energy} inconsistent with the branch relation "
                f"{expect} for n = {n}")
    s = branch.sign
    p = (-g * g, 0.0, w * w)
    q = (-s * (g / w) * (w * w + 2.0 * s * eps * w - 2.0 * g * g),
         -(n * w * w + 2.0 * s * eps * w),
         -s * 2.0 * g * w)
    r = (n * n * w * w / 3.0 + n * w * w / 6.0 + s * n * eps * w
         - 2.0 * n * g * g - params.delta ** 2)
    return CanonicalQesForm(n=n, branch=branch, p_coeffs=p, q_coeffs=q, r=r)


def partner_component(params: ModelParams, energy: float, branch: Branch,
                      phi, z, dphi=None):
    """Second spinor component from the first via the coupled first-order pair.

    branch +:  phi_2(z) = -[(w z + g) phi'(z) - (g^2/w + E - eps) phi(z)]/Delta
    branch -:  phi_2(z) = -[(w z - g) phi'(z) - (g^2/w + E + eps) phi(z)]/Delta
    """
    branch = Branch.parse(branch)
    if params.delta == 0.0:
        raise ValueError("partner component undefined at Delta = 0")
    if dphi is None:
        deriv = getattr(phi, "deriv", None)
        if callable(deriv):
            dphi = phi.deriv()
        else:
            h = 1e-150
            dphi = lambda t: np.imag(phi(t + 1j * h)) / h  # complex step
    w, g = params.omega, params.g
    s = branch.sign
    shift = params.g ** 2 / w + energy - s * params.epsilon
    return -((w * np.asarray(z) + s * g) * dphi(z) - shift * phi(z)) / params.delta


@dataclass(frozen=True)
class KkConstants:
    """Constants of the confluent-hypergeometric reduction (free scale A)."""

    q: float
    lam: float
    B: float
    two_j: float
    L: float
    A: float


def kk_constants(params: ModelParams, energy: float,
                 A: float = 1.0) -> KkConstants:
    """Identify the reduction constants at energy E; q*A^2 = -4g^2/w^2."""
    if A == 0.0:
        raise ValueError("free scale A must be nonzero")
    w, g, eps = params.omega, params.g, params.epsilon
    E = energy
    g2 = g * g
    lam = (E * E / w ** 2 - 2.0 * E * g2 / w ** 3 + 4.0 * g2 * eps / w ** 3
           - 3.0 * g2 * g2 / w ** 4 - params.delta ** 2 / w ** 2
           - eps * eps / w ** 2)
    return KkConstants(
        q=-4.0 * g2 / (A * A * w * w),
        lam=lam,
        B=-1.0 - 4.0 * g2 / w ** 2 + 2.0 * eps / w,
        two_j=E / w + g2 / w ** 2 - eps / w,
        L=-E / w - g2 / w ** 2 - 0.5 + eps / w,
        A=A)
