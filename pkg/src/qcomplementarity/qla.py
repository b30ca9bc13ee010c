"""Dense linear algebra on finite-dimensional quantum states.

Matrices are plain complex ``numpy`` arrays. Subsystems are addressed by
party index into a list of local dimensions, e.g. ``dims=[2, 2, 2]`` for
three qubits with parties ``0, 1, 2`` (A, B, C).

All entropies are in bits.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

PSD_TOL = 1e-9
TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-9


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise InputError(f"invalid dimension list {dims}")
    n = int(np.prod(dims))
    if m.shape != (n, n):
        raise InputError(f"matrix shape {m.shape} does not match dims {dims}")
    return dims


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b``."""
    return np.kron(_as_matrix(a), _as_matrix(b))


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduce ``rho`` to the parties in ``keep``.

    The kept parties appear in ascending index order in the result.
    """
    rho = _as_matrix(rho)
    dims = _check_dims(rho, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise InputError("keep must name at least one party")
    if keep[0] < 0 or keep[-1] >= n:
        raise InputError(f"party index out of range for {n} parties: {keep}")
    if len(keep) == n:
        return rho.copy()

    traced = [i for i in range(n) if i not in keep]
    t = rho.reshape(dims + dims)
    # trace pairs from the highest index down so earlier axis numbers stay valid
    for count, i in enumerate(sorted(traced, reverse=True)):
        nleft = n - count
        t = np.trace(t, axis1=i, axis2=i + nleft)
    dk = int(np.prod([dims[k] for k in keep]))
    return t.reshape(dk, dk)


def partial_transpose(rho, dims: Sequence[int], party) -> np.ndarray:
    """Transpose the indices of one party (or a set of parties)."""
    rho = _as_matrix(rho)
    dims = _check_dims(rho, dims)
    n = len(dims)
    parties = {int(party)} if np.isscalar(party) else {int(p) for p in party}
    if any(p < 0 or p >= n for p in parties):
        raise InputError(f"party index out of range for {n} parties: {sorted(parties)}")
    axes = list(range(2 * n))
    for p in parties:
        axes[p], axes[p + n] = axes[p + n], axes[p]
    return rho.reshape(dims + dims).transpose(axes).reshape(rho.shape)


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise InputError(f"matrix is not square: {m.shape}")
    if m.size and np.max(np.abs(m - m.conj().T)) > tol:
        raise InputError("matrix is not Hermitian")
    return m


def hermitian_spectrum(m) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted descending."""
    m = check_hermitian(m)
    return np.linalg.eigvalsh(m)[::-1]


def _clamp(ev: np.ndarray) -> np.ndarray:
    if ev.size and ev.min() < -PSD_TOL:
        raise InputError(f"matrix is not positive semidefinite (eigenvalue {ev.min():.3e})")
    return np.where(ev < 0.0, 0.0, ev)


def entropy_of_eigenvalues(ev) -> float:
    """``-sum x log2 x`` with ``0 log 0 = 0``; no normalization is applied."""
    ev = np.asarray(ev, dtype=float)
    nz = ev[ev > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def density_spectrum(rho) -> np.ndarray:
    """Clamped descending spectrum of a validated density matrix."""
    ev = _clamp(hermitian_spectrum(rho))
    if abs(ev.sum() - 1.0) > TRACE_TOL:
        raise InputError(f"density matrix has trace {ev.sum():.12g}, expected 1")
    return ev


def von_neumann_entropy(rho) -> float:
    return entropy_of_eigenvalues(density_spectrum(rho))


def check_probabilities(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InputError("probability vector must be a non-empty 1-d sequence")
    if np.any(p < 0.0) or np.any(p > 1.0) or abs(p.sum() - 1.0) > 1e-9:
        raise InputError(f"not a probability vector: {p.tolist()}")
    return p


def shannon_entropy(p) -> float:
    return entropy_of_eigenvalues(check_probabilities(p))


def binary_entropy(e: float) -> float:
    if not 0.0 <= e <= 1.0:
        raise InputError(f"binary entropy argument {e} outside [0, 1]")
    return entropy_of_eigenvalues([e, 1.0 - e])


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    ev = hermitian_spectrum(m)
    return float(np.sum(np.abs(ev)))
