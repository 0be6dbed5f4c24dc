"""Two-atom product space: 3 x 3 = 9 levels.

Basis ordering is row-major in (atom 1 level, atom 2 level), i.e.
|11>, |12>, |13>, |21>, ..., |33>.  Levels are labelled 1, 2 (stable lower
levels) and 3 (excited level).

``transition_op(i, k, l)`` is |l><k| on atom ``i``: it maps level ``k`` to
level ``l``.  With this reading sigma_3k = |k><3| lowers and sigma_k3 = |3><k|
raises.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

LEVELS = (1, 2, 3)
DIM = 9

DICKE_LABELS = ("11", "22", "33", "s12", "s13", "s23", "a12", "a13", "a23")
PRODUCT_LABELS = tuple(f"{a}{b}" for a, b in product(LEVELS, LEVELS))


def _check_level(level):
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")


def _check_atom(atom):
    if atom not in (1, 2):
        raise ValueError(f"atom must be 1 or 2, got {atom!r}")


def flat_index(a: int, b: int) -> int:
    _check_level(a)
    _check_level(b)
    return 3 * (a - 1) + (b - 1)


def levels_of(flat: int) -> tuple[int, int]:
    if not 0 <= flat < DIM:
        raise ValueError(f"flat index out of range: {flat}")
    return flat // 3 + 1, flat % 3 + 1


def ket(a: int, b: int) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[flat_index(a, b)] = 1.0
    return v


def _embed(single: np.ndarray, atom: int) -> np.ndarray:
    _check_atom(atom)
    eye = np.eye(3)
    return np.kron(single, eye) if atom == 1 else np.kron(eye, single)


def transition_op(atom: int, from_level: int, to_level: int) -> np.ndarray:
    _check_level(from_level)
    _check_level(to_level)
    single = np.zeros((3, 3), dtype=complex)
    single[to_level - 1, from_level - 1] = 1.0
    return _embed(single, atom)


def number_op(atom: int, level: int) -> np.ndarray:
    return transition_op(atom, level, level)


def sigma_z(atom: int) -> np.ndarray:
    """Lower-level population difference n_1 - n_2 (zero on level 3)."""
    return number_op(atom, 1) - number_op(atom, 2)


@lru_cache(maxsize=None)
def _swap() -> np.ndarray:
    s = np.zeros((DIM, DIM), dtype=complex)
    for a, b in product(LEVELS, LEVELS):
        s[flat_index(b, a), flat_index(a, b)] = 1.0
    return s


def swap_op() -> np.ndarray:
    """Exchange of the two atoms, |ab> -> |ba>."""
    return _swap().copy()


def dicke_state(kind: str, k: int, l: int) -> np.ndarray:
    """Product state |k>|l> or the (anti)symmetric combination of |kl> and |lk>."""
    _check_level(k)
    _check_level(l)
    if kind == "product":
        return ket(k, l)
    if k >= l:
        raise ValueError(f"entangled Dicke-like states need k < l, got k={k}, l={l}")
    if kind == "symmetric":
        return (ket(k, l) + ket(l, k)) / np.sqrt(2.0)
    if kind == "antisymmetric":
        return (ket(k, l) - ket(l, k)) / np.sqrt(2.0)
    raise ValueError(f"unknown Dicke state kind {kind!r}")


def named_state(label: str) -> np.ndarray:
    """State from a label such as '11', 's12' or 'a13'."""
    if len(label) == 2 and label.isdigit():
        return ket(int(label[0]), int(label[1]))
    kinds = {"s": "symmetric", "a": "antisymmetric"}
    if len(label) == 3 and label[0] in kinds and label[1:].isdigit():
        return dicke_state(kinds[label[0]], int(label[1]), int(label[2]))
    raise ValueError(f"unrecognized state label {label!r}")


@lru_cache(maxsize=None)
def _dicke_matrix() -> np.ndarray:
    return np.column_stack([named_state(lbl) for lbl in DICKE_LABELS])


def dicke_basis() -> np.ndarray:
    """Unitary whose columns are the Dicke-like states, ordered as DICKE_LABELS."""
    return _dicke_matrix().copy()


def to_dicke(op: np.ndarray) -> np.ndarray:
    u = _dicke_matrix()
    return u.conj().T @ op @ u


def from_dicke(op: np.ndarray) -> np.ndarray:
    u = _dicke_matrix()
    return u @ op @ u.conj().T


def is_hermitian(op: np.ndarray, atol: float = 1e-12) -> bool:
    return bool(np.allclose(op, op.conj().T, rtol=0.0, atol=atol))


def validate_pure(psi, atol: float = 1e-9) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (DIM,):
        raise ValueError(f"pure state must have shape ({DIM},), got {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise ValueError("pure state has non-finite entries")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"pure state is not normalized (norm {norm})")
    return psi


def validate_density(rho, atol: float = 1e-9, eig_floor: float = -1e-8) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM, DIM):
        raise ValueError(f"density matrix must have shape ({DIM}, {DIM}), got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > atol:
        raise ValueError(f"density matrix is not hermitian (max deviation {herm})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    min_eig = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
    if min_eig < eig_floor:
        raise ValueError(f"density matrix has negative eigenvalue {min_eig}")
    return rho


def as_density(state) -> np.ndarray:
    """Density matrix for a pure vector or a 9 x 9 matrix."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def fidelity(state, target) -> float:
    """Population of the pure ``target`` state in ``state``."""
    target = validate_pure(target)
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        validate_pure(state)
        return float(min(1.0, abs(np.vdot(target, state)) ** 2))
    validate_density(state)
    val = np.real(np.vdot(target, state @ target))
    return float(np.clip(val, 0.0, 1.0))


def populations(state) -> np.ndarray:
    """Product-basis populations in flat order."""
    state = np.asarray(state)
    if state.ndim == 1:
        return np.abs(state) ** 2
    return np.real(np.diagonal(state)).copy()
