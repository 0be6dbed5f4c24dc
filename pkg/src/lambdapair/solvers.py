"""Propagation of pure states and density matrices, and steady states."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm, svd

from lambdapair.dynamics import Liouvillian
from lambdapair.hilbert import DIM, validate_density, validate_pure

NULL_THRESHOLD = 1e-10


class SolverError(RuntimeError):
    """Integration failed or produced an invalid state."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message if time is None else f"{message} (at t = {time:.6g})")
        self.time = time


class DegenerateSteadyStateError(SolverError):
    def __init__(self, dimension: int):
        super().__init__(f"steady state is not unique: null space has dimension {dimension}")
        self.dimension = dimension


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    sample_times: tuple | None = None
    n_samples: int = 201
    method: str = "DOP853"

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("integrator tolerances must be > 0")
        if not self.max_step > 0:
            raise ValueError("max_step must be > 0")
        if self.sample_times is not None:
            ts = np.asarray(self.sample_times, dtype=float)
            if ts.ndim != 1 or np.any(np.diff(ts) <= 0):
                raise ValueError("sample_times must be strictly increasing")
            object.__setattr__(self, "sample_times", tuple(float(t) for t in ts))
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")

    def grid(self, span) -> np.ndarray:
        t0, t1 = span
        if self.sample_times is not None:
            ts = np.asarray(self.sample_times)
            if ts[0] < t0 or ts[-1] > t1:
                raise ValueError(f"sample_times fall outside the span [{t0}, {t1}]")
            return ts
        return np.linspace(t0, t1, self.n_samples)


@dataclass
class Trajectory:
    """Sampled evolution. ``states`` holds vectors (pure) or 9x9 matrices (mixed)."""

    times: np.ndarray
    states: np.ndarray
    observables: dict = field(default_factory=dict)

    @property
    def is_pure(self) -> bool:
        return self.states.ndim == 2

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def populations(self) -> np.ndarray:
        if self.is_pure:
            return np.abs(self.states) ** 2
        return np.real(np.diagonal(self.states, axis1=1, axis2=2))

    def target_population(self, target: np.ndarray) -> np.ndarray:
        if self.is_pure:
            return np.abs(self.states @ target.conj()) ** 2
        return np.real(np.einsum("i,tij,j->t", target.conj(), self.states, target))

    def concat(self, other: "Trajectory") -> "Trajectory":
        """Append ``other``, dropping its first sample when it repeats our last time."""
        skip = 1 if len(other.times) and len(self.times) and other.times[0] == self.times[-1] else 0
        obs = {k: np.concatenate([v, other.observables[k][skip:]])
               for k, v in self.observables.items() if k in other.observables}
        return Trajectory(
            np.concatenate([self.times, other.times[skip:]]),
            np.concatenate([self.states, other.states[skip:]]),
            obs,
        )

    def validity(self) -> dict:
        """Worst-case deviations from the state invariants over all samples."""
        if self.is_pure:
            norms = np.linalg.norm(self.states, axis=1)
            return {"norm_drift": float(np.max(np.abs(norms - 1.0)))}
        herm = np.max(np.abs(self.states - np.conj(np.transpose(self.states, (0, 2, 1)))))
        tr = np.real(np.trace(self.states, axis1=1, axis2=2))
        sym = (self.states + np.conj(np.transpose(self.states, (0, 2, 1)))) / 2
        min_eig = np.min(np.linalg.eigvalsh(sym))
        return {
            "trace_drift": float(np.max(np.abs(tr - 1.0))),
            "hermiticity": float(herm),
            "min_eigenvalue": float(min_eig),
        }


def _integrate(rhs, y0, span, cfg: IntegratorConfig):
    t_eval = cfg.grid(span)
    sol = solve_ivp(
        rhs,
        span,
        y0,
        method=cfg.method,
        t_eval=t_eval,
        rtol=cfg.rtol,
        atol=cfg.atol,
        max_step=cfg.max_step,
    )
    if sol.status != 0:
        failed_at = float(sol.t[-1]) if len(sol.t) else span[0]
        raise SolverError(f"integration failed: {sol.message}", failed_at)
    if not np.all(np.isfinite(sol.y)):
        raise SolverError("integration produced non-finite values")
    return sol.t, sol.y.T


def propagate_state(psi0, hamiltonian, span, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Solve d psi/dt = -i H(t) psi.

    ``hamiltonian`` is a 9x9 matrix or a callable ``t -> matrix``.
    """
    cfg = cfg or IntegratorConfig()
    psi0 = validate_pure(psi0)
    if callable(hamiltonian):
        def rhs(t, y):
            return -1j * (hamiltonian(t) @ y)
    else:
        h = np.asarray(hamiltonian, dtype=complex)

        def rhs(t, y):
            return -1j * (h @ y)

    times, ys = _integrate(rhs, psi0.astype(complex), tuple(span), cfg)
    return Trajectory(times, ys)


def propagate_density(rho0, generator: Liouvillian, span, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate d rho/dt = L(t) rho."""
    cfg = cfg or IntegratorConfig()
    rho0 = validate_density(rho0)
    times, ys = _integrate(generator.rhs(), rho0.reshape(-1).astype(complex), tuple(span), cfg)
    return Trajectory(times, ys.reshape(-1, DIM, DIM))


def expm_propagate(rho0, generator: Liouvillian, t: float) -> np.ndarray:
    """exp(L t) applied to rho0 (scaling and squaring)."""
    rho0 = validate_density(rho0)
    if t == 0:
        return rho0.copy()
    prop = expm(generator.matrix * t)
    if not np.all(np.isfinite(prop)):
        raise SolverError("matrix exponential overflowed", t)
    return (prop @ rho0.reshape(-1)).reshape(DIM, DIM)


@dataclass
class SteadyState:
    rho: np.ndarray | None
    null_dimension: int
    null_basis: np.ndarray
    singular_values: np.ndarray
    residual: float

    @property
    def unique(self) -> bool:
        return self.null_dimension == 1


def _normalize_null_vector(v: np.ndarray) -> np.ndarray:
    rho = v.reshape(DIM, DIM)
    rho = (rho + rho.conj().T) / 2
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise SolverError("null vector is traceless; cannot normalize to a state")
    return rho / tr


def steady_state(generator: Liouvillian, threshold: float = NULL_THRESHOLD) -> SteadyState:
    """Null space of a time-independent generator via SVD.

    Singular values below ``threshold * s_max`` count as null.  For a unique
    null vector the hermitian, unit-trace representative is returned in
    ``rho``; otherwise ``rho`` is None and ``null_basis`` holds an orthonormal
    basis (as 9x9 matrices).
    """
    mat = generator.matrix
    _, s, vh = svd(mat)
    cut = threshold * s[0]
    null = np.flatnonzero(s <= cut)
    if null.size == 0:
        raise SolverError(
            f"no null vector found (smallest singular value {s[-1]:.3e} > {cut:.3e})"
        )
    basis = vh[null].conj()
    rho = None
    residual = float(np.min(s))
    if null.size == 1:
        rho = _normalize_null_vector(basis[0])
        residual = float(np.linalg.norm(mat @ rho.reshape(-1)))
    return SteadyState(
        rho=rho,
        null_dimension=int(null.size),
        null_basis=basis.reshape(-1, DIM, DIM),
        singular_values=s,
        residual=residual,
    )
