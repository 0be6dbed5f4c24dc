"""Effective Hamiltonian, radiative dissipator, lower-level jitter, Liouvillian.

Density matrices are vectorized row-major (``rho.reshape(-1)``), so that
``A @ rho @ B`` corresponds to ``kron(A, B.T) @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from lambdapair.hilbert import DIM, number_op, sigma_z, transition_op
from lambdapair.rddi import RDDICouplings, SystemConfig

LOWER = (1, 2)
_EYE = np.eye(DIM)


# --- pulse envelopes -------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    amplitude: float = 0.0
    kind = "constant"

    def __call__(self, t):
        return self.amplitude * np.ones_like(np.asarray(t, dtype=float))

    def to_dict(self):
        return {"kind": self.kind, "amplitude": self.amplitude}


@dataclass(frozen=True)
class Gaussian:
    """amplitude * exp(-(t - center)**2 / (2 width**2))"""

    amplitude: float
    width: float
    center: float = 0.0
    kind = "gaussian"

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"gaussian width must be > 0, got {self.width}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.exp(-((t - self.center) ** 2) / (2.0 * self.width**2))

    def to_dict(self):
        return {"kind": self.kind, "amplitude": self.amplitude, "width": self.width,
                "center": self.center}


@dataclass(frozen=True)
class Rectangular:
    amplitude: float
    start: float
    stop: float
    kind = "rectangular"

    def __post_init__(self):
        if not self.stop > self.start:
            raise ValueError(f"rectangular pulse needs stop > start, got [{self.start}, {self.stop}]")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= self.start) & (t <= self.stop), self.amplitude, 0.0)

    def to_dict(self):
        return {"kind": self.kind, "amplitude": self.amplitude, "start": self.start,
                "stop": self.stop}


Envelope = Union[Constant, Gaussian, Rectangular]
_ENVELOPES = {cls.kind: cls for cls in (Constant, Gaussian, Rectangular)}


def envelope_from_dict(spec: dict) -> Envelope:
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _ENVELOPES:
        raise ValueError(f"unknown envelope kind {kind!r}; expected one of {sorted(_ENVELOPES)}")
    return _ENVELOPES[kind](**spec)


def pulse_envelope(spec, t):
    """Evaluate an envelope descriptor (object or dict) at time(s) ``t``."""
    if isinstance(spec, dict):
        spec = envelope_from_dict(spec)
    val = spec(t)
    return float(val) if np.ndim(val) == 0 else val


# --- drive description -----------------------------------------------------


@dataclass(frozen=True)
class TransitionDrive:
    """Laser on one k<->3 transition.

    The Rabi frequencies on the two atoms share the magnitude given by the
    envelope and differ by the phase ``alpha``: Omega^(1) = Omega^(2) e^{i alpha}.
    ``delta`` multiplies the lower-level population n_k of each atom.
    """

    envelope: Envelope = field(default_factory=Constant)
    alpha: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.envelope.amplitude < 0:
            raise ValueError(f"Rabi amplitude must be >= 0, got {self.envelope.amplitude}")

    @classmethod
    def constant(cls, omega: float = 0.0, alpha: float = 0.0, delta: float = 0.0):
        return cls(Constant(omega), alpha, delta)

    @property
    def omega(self) -> float:
        return self.envelope.amplitude

    def to_dict(self):
        return {"envelope": self.envelope.to_dict(), "alpha": self.alpha, "delta": self.delta}


@dataclass(frozen=True)
class DriveSpec:
    d13: TransitionDrive = field(default_factory=TransitionDrive)
    d23: TransitionDrive = field(default_factory=TransitionDrive)

    def __iter__(self):
        return iter((self.d13, self.d23))

    @property
    def time_dependent(self) -> bool:
        return any(not isinstance(d.envelope, Constant) for d in self)

    def to_dict(self):
        return {"d13": self.d13.to_dict(), "d23": self.d23.to_dict()}


@dataclass(frozen=True)
class JitterSpec:
    """Elastic dephasing of the 1<->2 coherence at ``rate`` (Gamma_12)."""

    rate: float = 0.0
    mode: str = "collective"

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"jitter rate must be >= 0, got {self.rate}")
        if self.mode not in ("collective", "independent"):
            raise ValueError(f"jitter mode must be 'collective' or 'independent', got {self.mode!r}")

    def to_dict(self):
        return {"rate": self.rate, "mode": self.mode}


# --- Hamiltonian -----------------------------------------------------------


def drive_operator(k: int, alpha: float) -> np.ndarray:
    """Unit-amplitude drive on the k<->3 transition of both atoms (hermitian)."""
    raise_ = np.exp(1j * alpha) / 2 * transition_op(1, k, 3) + 0.5 * transition_op(2, k, 3)
    return raise_ + raise_.conj().T


def rddi_operator(k: int) -> np.ndarray:
    """Excitation exchange on the k<->3 transition: |3k><k3| + h.c."""
    hop = transition_op(1, k, 3) @ transition_op(2, 3, k)
    return hop + hop.conj().T


def static_hamiltonian(deltas, couplings: RDDICouplings) -> np.ndarray:
    """Detuning and RDDI part: sum_ik delta_k n_k^(i) + sum_k chi_k (exchange)."""
    h = np.zeros((DIM, DIM), dtype=complex)
    for k, delta, chi in zip(LOWER, deltas, couplings.chi):
        h += delta * (number_op(1, k) + number_op(2, k))
        h += chi * rddi_operator(k)
    return h


def hamiltonian_terms(drive: DriveSpec, couplings: RDDICouplings, energy_offset: float = 0.0):
    """Split H(t) into a static matrix and (envelope, operator) pairs.

    ``energy_offset`` is subtracted from the static part; it only changes the
    global phase of a pure state.
    """
    static = static_hamiltonian((drive.d13.delta, drive.d23.delta), couplings)
    static -= energy_offset * _EYE
    terms = []
    for k, d in zip(LOWER, drive):
        op = drive_operator(k, d.alpha)
        if isinstance(d.envelope, Constant):
            static = static + d.envelope.amplitude * op
        else:
            terms.append((d.envelope, op))
    return static, tuple(terms)


def build_hamiltonian(drive: DriveSpec, couplings: RDDICouplings, t: float = 0.0) -> np.ndarray:
    static, terms = hamiltonian_terms(drive, couplings)
    return static + sum((float(env(t)) * op for env, op in terms), np.zeros_like(static))


# --- superoperators --------------------------------------------------------


def spre(a: np.ndarray) -> np.ndarray:
    return np.kron(a, _EYE)


def spost(b: np.ndarray) -> np.ndarray:
    return np.kron(_EYE, b.T)


def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> a rho b."""
    return np.kron(a, b.T)


def commutator_superop(h: np.ndarray) -> np.ndarray:
    """-i[h, .]"""
    return -1j * (spre(h) - spost(h))


def _decay_rates(couplings: RDDICouplings, config: SystemConfig):
    # rate matrix gamma^(ij) per lower level k
    out = []
    for gamma, g12 in ((config.gamma13, couplings.gamma12_13), (config.gamma23, couplings.gamma12_23)):
        out.append(np.array([[gamma, g12], [g12, gamma]], dtype=float))
    return out


def dissipator_superop(couplings: RDDICouplings, config: SystemConfig) -> np.ndarray:
    sup = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    for k, rates in zip(LOWER, _decay_rates(couplings, config)):
        jumps = [transition_op(i, 3, k) for i in (1, 2)]
        for i in range(2):
            for j in range(2):
                if rates[i, j] == 0:
                    continue
                a, bd = jumps[i], jumps[j].conj().T
                ba = bd @ a
                sup += rates[i, j] / 2 * (2 * sandwich(a, bd) - spre(ba) - spost(ba))
    return sup


def apply_dissipator(rho, couplings: RDDICouplings, config: SystemConfig) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for k, rates in zip(LOWER, _decay_rates(couplings, config)):
        jumps = [transition_op(i, 3, k) for i in (1, 2)]
        for i in range(2):
            for j in range(2):
                a, bd = jumps[i], jumps[j].conj().T
                ba = bd @ a
                out += rates[i, j] / 2 * (2 * a @ rho @ bd - ba @ rho - rho @ ba)
    return out


def _jitter_pairs(jitter: JitterSpec):
    z = [sigma_z(1), sigma_z(2)]
    for i in range(2):
        for j in range(2):
            if jitter.mode == "independent" and i != j:
                continue
            yield z[i], z[j]


def jitter_superop(jitter: JitterSpec) -> np.ndarray:
    sup = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    if jitter.rate == 0:
        return sup
    for zi, zj in _jitter_pairs(jitter):
        zz = zi @ zj
        sup += jitter.rate * (2 * sandwich(zi, zj) - spost(zz) - spre(zz))
    return sup


def apply_jitter(rho, jitter: JitterSpec) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for zi, zj in _jitter_pairs(jitter):
        zz = zi @ zj
        out += jitter.rate * (2 * zi @ rho @ zj - rho @ zz - zz @ rho)
    return out


# --- Liouvillian -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Generator of d vec(rho)/dt, ``static + sum_c envelope_c(t) * term_c``."""

    static: np.ndarray
    terms: tuple = ()

    def __post_init__(self):
        self.static.setflags(write=False)
        for _, m in self.terms:
            m.setflags(write=False)

    @property
    def time_dependent(self) -> bool:
        return bool(self.terms)

    @property
    def matrix(self) -> np.ndarray:
        if self.time_dependent:
            raise ValueError("generator is time dependent; use at(t)")
        return self.static

    def at(self, t: float) -> np.ndarray:
        out = self.static.copy()
        for env, m in self.terms:
            out += float(env(t)) * m
        return out

    def rhs(self) -> Callable[[float, np.ndarray], np.ndarray]:
        static, terms = self.static, self.terms

        def f(t, y):
            out = static @ y
            for env, m in terms:
                out += float(env(t)) * (m @ y)
            return out

        return f

    def apply(self, rho, t: float = 0.0) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return (self.at(t) @ rho.reshape(-1)).reshape(DIM, DIM)


def assemble_liouvillian(
    drive: DriveSpec,
    couplings: RDDICouplings,
    config: SystemConfig,
    jitter: JitterSpec | None = None,
    dissipation: bool = True,
) -> Liouvillian:
    """Vectorized -i[H, .] + radiative dissipator + jitter.

    ``dissipation=False`` drops the radiative dissipator but keeps the RDDI
    shifts in H, for coherent-limit comparison runs.
    """
    jitter = jitter or JitterSpec()
    h_static, h_terms = hamiltonian_terms(drive, couplings)
    static = commutator_superop(h_static) + jitter_superop(jitter)
    if dissipation:
        static = static + dissipator_superop(couplings, config)
    terms = tuple((env, commutator_superop(op)) for env, op in h_terms)
    return Liouvillian(static, terms)
