"""Resonant dipole-dipole coupling functions for a pair of atoms.

``coupling_f`` gives the coherent exchange (chi / gamma) and ``coupling_g``
the collective decay (gamma^(12) / gamma) as functions of the dimensionless
separation ``phi = k R`` and the dipole/axis geometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

# Below this separation the near-field terms of G cancel catastrophically;
# switch to the power series of (sin x - x cos x) / x**3.
_SERIES_CUTOFF = 0.5
_SERIES_COEFFS = tuple(
    (-1) ** (n + 1) * 2 * n / factorial(2 * n + 1) for n in range(1, 16)
)


def _unit(vec) -> tuple[float, float, float]:
    arr = np.asarray(vec, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"expected a finite 3-vector, got {vec!r}")
    if abs(np.linalg.norm(arr) - 1.0) > 1e-12:
        raise ValueError(f"vector {vec!r} is not normalized (|v| = {np.linalg.norm(arr)})")
    return tuple(float(x) for x in arr)


@dataclass(frozen=True)
class GeometryConfig:
    """Dipole directions of both atoms and the interatomic axis.

    The default has both dipoles along z and the atoms separated along x, so
    the dipoles are collinear and perpendicular to the axis.
    """

    e1: tuple[float, float, float] = (0.0, 0.0, 1.0)
    e2: tuple[float, float, float] = (0.0, 0.0, 1.0)
    eR: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("e1", "e2", "eR"):
            object.__setattr__(self, name, _unit(getattr(self, name)))

    @property
    def axial_factor(self) -> float:
        """(e1 . eR)(e2 . eR)"""
        return float(np.dot(self.e1, self.eR) * np.dot(self.e2, self.eR))

    @property
    def transverse_factor(self) -> float:
        """e1 . e2 - (e1 . eR)(e2 . eR)"""
        return float(np.dot(self.e1, self.e2)) - self.axial_factor

    def to_dict(self) -> dict:
        return {"e1": list(self.e1), "e2": list(self.e2), "eR": list(self.eR)}


@dataclass(frozen=True)
class SystemConfig:
    gamma13: float = 1.0
    gamma23: float = 1.0
    phi13: float = 1.0
    freq_ratio: float = 1.0
    geometry: GeometryConfig = field(default_factory=GeometryConfig)

    def __post_init__(self):
        if isinstance(self.geometry, dict):
            object.__setattr__(self, "geometry", GeometryConfig(**self.geometry))
        problems = []
        if not self.gamma13 > 0:
            problems.append(f"gamma13 must be > 0 (got {self.gamma13})")
        if not self.gamma23 >= 0:
            problems.append(f"gamma23 must be >= 0 (got {self.gamma23})")
        if not self.phi13 > 0:
            problems.append(f"phi13 must be > 0 (got {self.phi13})")
        if not self.freq_ratio > 0:
            problems.append(f"freq_ratio must be > 0 (got {self.freq_ratio})")
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def phi23(self) -> float:
        return self.phi13 * self.freq_ratio

    def to_dict(self) -> dict:
        return {
            "gamma13": self.gamma13,
            "gamma23": self.gamma23,
            "phi13": self.phi13,
            "freq_ratio": self.freq_ratio,
            "geometry": self.geometry.to_dict(),
        }


@dataclass(frozen=True)
class RDDICouplings:
    f13: float
    f23: float
    g13: float
    g23: float
    chi13: float
    chi23: float
    gamma12_13: float
    gamma12_23: float

    @classmethod
    def from_dimensionless(cls, f13, f23, g13, g23, gamma13=1.0, gamma23=1.0):
        return cls(
            f13=f13,
            f23=f23,
            g13=g13,
            g23=g23,
            chi13=f13 * gamma13,
            chi23=f23 * gamma23,
            gamma12_13=g13 * gamma13,
            gamma12_23=g23 * gamma23,
        )

    @property
    def chi(self) -> tuple[float, float]:
        return (self.chi13, self.chi23)

    @property
    def gamma12(self) -> tuple[float, float]:
        return (self.gamma12_13, self.gamma12_23)

    def to_dict(self) -> dict:
        return {
            "f13": self.f13,
            "f23": self.f23,
            "g13": self.g13,
            "g23": self.g23,
            "chi13": self.chi13,
            "chi23": self.chi23,
            "gamma12_13": self.gamma12_13,
            "gamma12_23": self.gamma12_23,
        }


def _check_phi(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)) or np.any(phi <= 0):
        raise ValueError(f"dimensionless distance must be finite and > 0, got {phi}")
    return phi


def _j1_over_x(x: np.ndarray) -> np.ndarray:
    """(sin x - x cos x) / x**3, accurate down to x -> 0 (limit 1/3)."""
    out = np.empty_like(x)
    small = x < _SERIES_CUTOFF
    xs = x[small] ** 2
    acc = np.zeros_like(xs)
    for c in reversed(_SERIES_COEFFS):
        acc = acc * xs + c
    out[small] = acc
    xl = x[~small]
    out[~small] = (np.sin(xl) - xl * np.cos(xl)) / xl**3
    return out


def coupling_f(phi, geometry: GeometryConfig | None = None):
    """Coherent dipole-dipole coupling chi / gamma at separation ``phi``."""
    geometry = geometry or GeometryConfig()
    x = _check_phi(phi)
    c, s = np.cos(x), np.sin(x)
    near = c / x**3 + s / x**2
    val = 1.5 * (near - c / x) * geometry.transverse_factor - 3.0 * near * geometry.axial_factor
    return float(val) if val.ndim == 0 else val


def coupling_g(phi, geometry: GeometryConfig | None = None):
    """Collective decay rate gamma^(12) / gamma at separation ``phi``."""
    geometry = geometry or GeometryConfig()
    x = np.atleast_1d(_check_phi(phi))
    h = _j1_over_x(x)
    val = 1.5 * (np.sin(x) / x - h) * geometry.transverse_factor + 3.0 * h * geometry.axial_factor
    return float(val[0]) if np.ndim(phi) == 0 else val


def couplings_for_pair(config: SystemConfig) -> RDDICouplings:
    geom = config.geometry
    return RDDICouplings.from_dimensionless(
        f13=coupling_f(config.phi13, geom),
        f23=coupling_f(config.phi23, geom),
        g13=coupling_g(config.phi13, geom),
        g23=coupling_g(config.phi23, geom),
        gamma13=config.gamma13,
        gamma23=config.gamma23,
    )
