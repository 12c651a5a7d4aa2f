"""Core model definitions for the asymmetric quantum Rabi model (AQRM).

H = Delta*sigma_z + eps*sigma_x + omega*a^dag a + g*sigma_x*(a^dag + a)

Conventions: hbar = 1; the qubit bias eps multiplies sigma_x together with
the coupling, the level splitting Delta multiplies sigma_z.  Exceptional
(Juddian) energies come in two branches sigma = +/-1,

    E = n*omega - g^2/omega + sigma*eps.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import TruncationError

__all__ = [
    "Branch",
    "ModelParams",
    "EnergyLevel",
    "Spectrum",
    "from_cqed",
    "qes_energy",
    "regular_spectrum",
    "rescaled_level",
]


class Branch(enum.IntEnum):
    """Exceptional-spectrum branch label; the integer value is the sign."""

    PLUS = 1
    MINUS = -1

    @property
    def sign(self) -> int:
        return int(self)

    @classmethod
    def parse(cls, token) -> "Branch":
        if isinstance(token, Branch):
            return token
        if token in (1, +1):
            return cls.PLUS
        if token == -1:
            return cls.MINUS
        key = str(token).strip().lower()
        if key in ("+", "plus", "p", "+1"):
            return cls.PLUS
        if key in ("-", "minus", "m", "-1"):
            return cls.MINUS
        raise ValueError(f"unrecognised branch label: {token!r}")

    def __str__(self) -> str:  # used in CSV/JSON output
        return "plus" if self is Branch.PLUS else "minus"


@dataclass(frozen=True)
class ModelParams:
    """AQRM parameter set (delta, epsilon, omega, g)."""

    delta: float
    epsilon: float
    omega: float = 1.0
    g: float = 0.0

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.g < 0.0:
            raise ValueError(f"g must be non-negative, got {self.g}")

    def replace(self, **kw) -> "ModelParams":
        data = {"delta": self.delta, "epsilon": self.epsilon,
                "omega": self.omega, "g": self.g}
        data.update(kw)
        return ModelParams(**data)


@dataclass(frozen=True)
class EnergyLevel:
    value: float
    index: int


@dataclass(frozen=True)
class Spectrum:
    """Ordered low-lying levels from a truncation-converged diagonalization."""

    params: ModelParams
    truncation: int
    levels: tuple[EnergyLevel, ...] = field(default_factory=tuple)

    def __post_init__(self):
        vals = [lv.value for lv in self.levels]
        if any(b < a - 1e-12 for a, b in zip(vals, vals[1:])):
            raise ValueError("levels must be non-decreasing")

    @property
    def values(self) -> np.ndarray:
        return np.array([lv.value for lv in self.levels], dtype=float)


def from_cqed(Omega: float, theta: float, omega: float, g: float) -> ModelParams:
    """Map circuit-QED angle parameters to (delta, epsilon).

    delta = (Omega/2) sin(theta), eps = (Omega/2) cos(theta).
    """
    return ModelParams(delta=0.5 * Omega * np.sin(theta),
                       epsilon=0.5 * Omega * np.cos(theta),
                       omega=omega, g=g)


def qes_energy(params: ModelParams, n: int, branch: Branch) -> float:
    """Exceptional (Juddian) energy E = n*omega - g^2/omega + sigma*eps."""
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a non-negative integer, got {n}")
    branch = Branch.parse(branch)
    w = params.omega
    return n * w - params.g ** 2 / w + branch.sign * params.epsilon


def rescaled_level(E: float, g: float, omega: float = 1.0):
    """Shifted level E + g^2/omega used on all spectral plots."""
    return E + g ** 2 / omega


def _hamiltonian(params: ModelParams, n_max: int) -> np.ndarray:
    """Dense AQRM Hamiltonian in the (sigma_x eigenbasis) x (Fock) ordering.

    With sigma_x diagonal the coupling adds a shifted-oscillator ladder to
    each 2x2 block and only Delta couples the blocks:

        [[ w*N + g*X + eps,  Delta        ],
         [ Delta,            w*N - g*X - eps]]
    """
    m = np.arange(n_max + 1, dtype=float)
    sq = np.sqrt(m[1:])
    num = np.diag(params.omega * m)
    xop = np.diag(sq, 1) + np.diag(sq, -1)
    eye = np.eye(n_max + 1)
    top = num + params.g * xop + params.epsilon * eye
    bot = num - params.g * xop - params.epsilon * eye
    h = np.block([[top, params.delta * eye], [params.delta * eye, bot]])
    return h


def regular_spectrum(params: ModelParams, level_count: int,
                     truncation: int = 200, *, margin: int = 50,
                     tol: float = 1e-9, max_doublings: int = 4) -> Spectrum:
    """Lowest `level_count` AQRM levels, converged under truncation doubling.

    The Fock cutoff is doubled until the requested levels move by less
    than `tol`; failure to settle raises TruncationError carrying the last
    two level arrays.
    """
    if level_count < 1:
        raise ValueError("level_count must be >= 1")
    if truncation < level_count + margin:
        raise ValueError(
            f"truncation {truncation} too small for {level_count} levels "
            f"(needs >= level_count + {margin})")
    n_max = int(truncation)
    prev = np.linalg.eigvalsh(_hamiltonian(params, n_max))[:level_count]
    for _ in range(max_doublings):
        n_max *= 2
        cur = np.linalg.eigvalsh(_hamiltonian(params, n_max))[:level_count]
        if np.max(np.abs(cur - prev)) < tol:
            levels = tuple(EnergyLevel(value=float(v), index=i)
                           for i, v in enumerate(cur))
            return Spectrum(params=params, truncation=n_max, levels=levels)
        prev = cur
    raise TruncationError(
        f"levels still moving after doubling to {n_max} photons",
        previous=prev, current=cur)
