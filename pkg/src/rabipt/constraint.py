"""Constraint polynomials locating the exceptional (Juddian) couplings.

P_0 = 1
P_1 = x + y - w^2 - 2*eps*w
P_k = (k x + y - k^2 w^2 - 2 k eps w) P_{k-1}
      - k (k-1) (n-k+1) x w^2 P_{k-2}

with x = (2g)^2 and y = Delta^2; the branch enters through eps -> sigma*eps.
Positive roots in x give the couplings where E = n*w - g^2/w + sigma*eps is
an eigenvalue.  A companion three-term recurrence generates the series
coefficients Q_k of the truncated polynomial solution; Q_{n+1} is
proportional to P_n, which this module verifies numerically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npp
from scipy.optimize import brentq

from .errors import (DegenerateAtomicLimitWarning, ResonantParameterError,
                     RootCollisionError)
from .model import Branch, ModelParams, qes_energy

__all__ = [
    "QesPoint",
    "QSequence",
    "constraint_poly_eval",
    "constraint_poly_coefficients",
    "qes_points",
    "q_sequence",
    "qp_proportionality_residual",
    "MAX_DEGREE",
]

# Double precision holds ~15 significant digits through the recurrence up to
# degree 12 for the parameter ranges of interest; refuse beyond that rather
# than silently losing digits.
MAX_DEGREE = 12


@dataclass(frozen=True)
class QesPoint:
    """One Juddian point: coupling g with E = n*w - g^2/w + sigma*eps."""

    n: int
    branch: Branch
    g: float
    energy: float
    constraint_residual: float


@dataclass(frozen=True)
class QSequence:
    """Series coefficients Q_0..Q_last of the truncated polynomial solution."""

    n: int
    values: np.ndarray
    normalization: float = 1.0


def _check_degree(n: int, minimum: int = 1) -> int:
    n = int(n)
    if n < minimum:
        raise ValueError(f"target degree n must be >= {minimum}, got {n}")
    if n > MAX_DEGREE:
        raise ValueError(
            f"n = {n} exceeds the double-precision-validated degree "
            f"{MAX_DEGREE}")
    return n


def _recurrence(n: int, x: float, y: float, epsilon: float, omega: float):
    """Evaluate (P_n, dP_n/dx, max intermediate magnitude) at one point."""
    w2 = omega * omega
    p_prev, d_prev = 1.0, 0.0
    p_cur = math.fsum((x, y, -w2, -2.0 * epsilon * omega))
    d_cur = 1.0
    scale = max(1.0, abs(p_cur))
    for k in range(2, n + 1):
        ck = math.fsum((k * x, y, -k * k * w2, -2.0 * k * epsilon * omega))
        dk = k * (k - 1) * (n - k + 1) * w2
        p_new = ck * p_cur - dk * x * p_prev
        d_new = k * p_cur + ck * d_cur - dk * (p_prev + x * d_prev)
        p_prev, p_cur = p_cur, p_new
        d_prev, d_cur = d_cur, d_new
        scale = max(scale, abs(p_cur))
    return p_cur, d_cur, scale


def constraint_poly_eval(n: int, x: float, y: float,
                         epsilon: float, omega: float = 1.0) -> float:
    """P_n(x, y) by direct recurrence (compensated coefficient sums)."""
    n = _check_degree(n, minimum=0)
    if n == 0:
        return 1.0
    return _recurrence(n, x, y, epsilon, omega)[0]


def constraint_poly_coefficients(n: int, y: float, epsilon: float,
                                 omega: float = 1.0) -> np.ndarray:
    """Ascending coefficients of x -> P_n(x, y); leading coefficient is n!."""
    n = _check_degree(n)
    w2 = omega * omega
    p_prev = np.array([1.0])
    p_cur = np.array([y - w2 - 2.0 * epsilon * omega, 1.0])
    for k in range(2, n + 1):
        bk = y - k * k * w2 - 2.0 * k * epsilon * omega
        dk = k * (k - 1) * (n - k + 1) * w2
        nxt = np.zeros(k + 1)
        nxt[1:] += k * p_cur
        nxt[:k] += bk * p_cur
        nxt[1:k] -= dk * p_prev
        p_prev, p_cur = p_cur, nxt
    return p_cur


def _poly_eval(coeffs: np.ndarray, x: float) -> float:
    # compensated: exact summation of the individually rounded terms
    return math.fsum(c * x ** i for i, c in enumerate(coeffs))


def _trim(coeffs: np.ndarray, rel: float = 1e-14) -> np.ndarray:
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return coeffs[:1]
    keep = len(coeffs)
    while keep > 1 and abs(coeffs[keep - 1]) < rel * scale:
        keep -= 1
    return coeffs[:keep]


def _sturm_chain(coeffs: np.ndarray) -> list[np.ndarray]:
    chain = [coeffs, npp.polyder(coeffs)]
    while len(chain[-1]) > 1:
        _, rem = npp.polydiv(chain[-2], chain[-1])
        rem = _trim(np.atleast_1d(-rem))
        if len(rem) == 1 and rem[0] == 0.0:
            break
        rem = rem / np.max(np.abs(rem))  # positive rescaling keeps signs
        chain.append(rem)
    return chain


def _sign_variations(chain: list[np.ndarray], x: float) -> int:
    signs = []
    for c in chain:
        v = _poly_eval(c, x)
        if v != 0.0:
            signs.append(1 if v > 0.0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_roots(chain, lo: float, hi: float) -> int:
    """Distinct real roots in (lo, hi]."""
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def _isolate_positive_roots(coeffs: np.ndarray) -> list[tuple[float, float]]:
    """Sturm-guided isolating intervals for every root in (0, inf)."""
    lead = coeffs[-1]
    bound = 1.0 + np.max(np.abs(coeffs[:-1])) / abs(lead)
    chain = _sturm_chain(coeffs)
    lo0 = 1e-13 * max(1.0, bound)  # exclude g = 0 itself
    total = _count_roots(chain, lo0, bound)
    intervals: list[tuple[float, float]] = []
    stack = [(lo0, bound, total)]
    while stack:
        lo, hi, cnt = stack.pop()
        if cnt == 0:
            continue
        if cnt == 1:
            intervals.append((lo, hi))
            continue
        if hi - lo < 1e-12 * max(1.0, hi):
            raise RootCollisionError(
                f"unresolved root cluster of {cnt} roots near x = {hi:.6g}")
        mid = 0.5 * (lo + hi)
        left = _count_roots(chain, lo, mid)
        stack.append((lo, mid, left))
        stack.append((mid, hi, cnt - left))
    return sorted(intervals)


def _polish_root(n: int, y: float, epsilon: float, omega: float,
                 lo: float, hi: float) -> float:
    f = lambda x: _recurrence(n, x, y, epsilon, omega)[0]
    fa, fb = f(lo), f(hi)
    if fa == 0.0:
        x0 = lo
    elif fb == 0.0:
        x0 = hi
    elif np.sign(fa) != np.sign(fb):
        x0 = brentq(f, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200)
    else:
        # even-multiplicity contact: put the root at the derivative zero
        df = lambda x: _recurrence(n, x, y, epsilon, omega)[1]
        x0 = brentq(df, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200)
    # a couple of Newton steps against the recurrence for 1e-12 relative
    for _ in range(3):
        p, d, _s = _recurrence(n, x0, y, epsilon, omega)
        if d == 0.0:
            break
        step = p / d
        x1 = x0 - step
        if not (lo * 0.5 <= x1 <= hi * 2.0):
            break
        x0 = x1
        if abs(step) <= 1e-15 * abs(x0):
            break
    return x0


def qes_points(params: ModelParams, n: int, branch: Branch) -> list[QesPoint]:
    """All Juddian couplings g > 0 for target degree n on one branch.

    Roots of x -> P_n(x, Delta^2) with x = (2g)^2 and eps -> sigma*eps,
    isolated by a Sturm partition and polished on the recurrence.  Delta = 0
    degenerates (every g belongs to the atomic-limit family): returns []
    and issues DegenerateAtomicLimitWarning.
    """
    n = _check_degree(n)
    branch = Branch.parse(branch)
    if params.delta == 0.0:
        warnings.warn(
            "Delta = 0: exceptional energies exist at every coupling; "
            "no isolated constraint roots to report",
            DegenerateAtomicLimitWarning, stacklevel=2)
        return []
    eps_eff = branch.sign * params.epsilon
    y = params.delta ** 2
    coeffs = constraint_poly_coefficients(n, y, eps_eff, params.omega)
    lead = coeffs[-1]
    assert lead != 0.0 and abs(lead - math.factorial(n)) < 1e-9 * math.factorial(n)
    points = []
    for lo, hi in _isolate_positive_roots(coeffs):
        x0 = _polish_root(n, y, eps_eff, params.omega, lo, hi)
        if x0 <= 0.0:
            continue
        g = 0.5 * math.sqrt(x0)
        pp = params.replace(g=g)
        resid, _, scale = _recurrence(n, x0, y, eps_eff, params.omega)
        points.append(QesPoint(
            n=n, branch=branch, g=g,
            energy=qes_energy(pp, n, branch),
            constraint_residual=abs(resid) / scale))
    points.sort(key=lambda p: p.g)
    return points


def q_sequence(params: ModelParams, n: int, branch: Branch,
               *, last: int | None = None) -> QSequence:
    """Series coefficients Q_0..Q_last (default last = n+1), Q_0 = 1.

        w (k+1) (2 eps_s + (n-k) w) Q_{k+1} =
            -Q_k [w^2 (2k^2 - 2kn - k) - 2 k eps_s w + 4 k g^2 + Delta^2]
            + Q_{k-1} (1-k) w^2 (n-k+1)

    Raises ResonantParameterError when a division actually performed hits a
    vanishing factor (2*eps_s/w equal to k-n for some computed step k).
    """
    n = _check_degree(n)
    branch = Branch.parse(branch)
    if last is None:
        last = n + 1
    w = params.omega
    eps_s = branch.sign * params.epsilon
    g2 = params.g ** 2
    d2 = params.delta ** 2
    values = [1.0]
    q_prev, q_cur = 0.0, 1.0
    for k in range(0, last):
        denom = w * (k + 1) * (2.0 * eps_s + (n - k) * w)
        if denom == 0.0:
            raise ResonantParameterError(
                f"resonant parameters: 2*eps*sigma + (n-k)*w = 0 at k = {k} "
                f"(eps_s/w = {eps_s / w})")
        num = (-q_cur * (w * w * (2 * k * k - 2 * k * n - k)
                         - 2.0 * k * eps_s * w + 4.0 * k * g2 + d2)
               + q_prev * (1 - k) * w * w * (n - k + 1))
        q_prev, q_cur = q_cur, num / denom
        values.append(q_cur)
    return QSequence(n=n, values=np.array(values), normalization=1.0)


def qp_proportionality_residual(params: ModelParams, n: int,
                                branch: Branch) -> float:
    """Relative mismatch between Q_{n+1} and its closed form in P_n.

    Q_{n+1} = (-1)^(n+1) Delta^2 P_n((2g)^2, Delta^2)
              / [w^(n+1) 2^(n+1) (n+1)! prod_{k=0..n}(eps_s + k w/2)]

    Zero (to roundoff) identically; the return value is normalised by the
    larger of the two sides with a magnitude floor so that exact Juddian
    points (both sides ~ 0) report ~0 rather than 0/0 noise.
    """
    n = _check_degree(n)
    branch = Branch.parse(branch)
    w = params.omega
    eps_s = branch.sign * params.epsilon
    prod = 1.0
    for k in range(0, n + 1):
        f = eps_s + 0.5 * k * w
        if f == 0.0:
            raise ResonantParameterError(
                f"eps*sigma + k*w/2 = 0 at k = {k}; closed form undefined")
        prod *= f
    kconst = ((-1.0) ** (n + 1) * params.delta ** 2
              / (w ** (n + 1) * 2.0 ** (n + 1) * math.factorial(n + 1) * prod))
    pval, _, pscale = _recurrence(n, (2.0 * params.g) ** 2, params.delta ** 2,
                                  eps_s, w)
    seq = q_sequence(params, n, branch).values
    lhs = seq[n + 1]
    rhs = kconst * pval
    floor = np.finfo(float).eps * max(1.0, np.max(np.abs(seq)),
                                      abs(kconst) * pscale)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), floor)
