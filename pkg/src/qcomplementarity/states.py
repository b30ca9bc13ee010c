"""Canonical states, seeded random sampling and the JSON state format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qla
from .errors import InputError


@dataclass(frozen=True)
class MultipartiteState:
    """A density matrix together with the local dimensions of its parties."""

    rho: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        qla._check_dims(rho, dims)
        qla.check_hermitian(rho)
        qla.density_spectrum(rho)  # PSD and unit trace
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "dims", dims)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def reduce(self, keep) -> "MultipartiteState":
        keep = sorted(set(keep))
        return MultipartiteState(
            qla.partial_trace(self.rho, self.dims, keep), tuple(self.dims[k] for k in keep)
        )


@dataclass(frozen=True)
class SamplerConfig:
    dims: tuple[int, ...]
    rank: int
    seed: int
    count: int = 1

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims or any(d < 1 for d in dims):
            raise InputError(f"invalid dimension list {list(dims)}")
        total = int(np.prod(dims))
        if not 1 <= self.rank <= total:
            raise InputError(f"rank {self.rank} outside [1, {total}] for dims {list(dims)}")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        if self.count < 1:
            raise InputError("count must be positive")


def _projector(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def ghz_state() -> MultipartiteState:
    v = np.zeros(8, dtype=complex)
    v[0] = v[7] = 1 / np.sqrt(2)
    return MultipartiteState(_projector(v), (2, 2, 2))


def bell_state() -> MultipartiteState:
    """|phi+> = (|00> + |11>)/sqrt(2)."""
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / np.sqrt(2)
    return MultipartiteState(_projector(v), (2, 2))


def werner_state(p: float) -> MultipartiteState:
    """p |phi+><phi+| + (1 - p) I/4 on two qubits."""
    if not 0.0 <= p <= 1.0:
        raise InputError(f"Werner parameter p={p} outside [0, 1]")
    rho = p * bell_state().rho + (1 - p) * np.eye(4) / 4
    return MultipartiteState(rho, (2, 2))


def maximally_mixed(dims: Sequence[int]) -> MultipartiteState:
    n = int(np.prod(dims))
    return MultipartiteState(np.eye(n, dtype=complex) / n, tuple(dims))


def basis_product_state(labels: Sequence[int], dims: Sequence[int]) -> MultipartiteState:
    if len(labels) != len(dims):
        raise InputError("need one basis label per party")
    for lab, d in zip(labels, dims):
        if not 0 <= lab < d:
            raise InputError(f"basis label {lab} out of range for local dimension {d}")
    index = int(np.ravel_multi_index(tuple(labels), tuple(dims)))
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[index] = 1.0
    return MultipartiteState(_projector(v), tuple(dims))


def product_state(*states: MultipartiteState) -> MultipartiteState:
    rho = states[0].rho
    dims = list(states[0].dims)
    for s in states[1:]:
        rho = qla.tensor_product(rho, s.rho)
        dims += s.dims
    return MultipartiteState(rho, tuple(dims))


def sample_rng(seed: int, index: int, rank: int = 1) -> np.random.Generator:
    """Generator keyed by (seed, rank, sample index), independent of draw order."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rank, index))))


def induced_density_matrix(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    """G G† / tr(G G†) with G a dim x rank complex standard-Gaussian matrix.

    Equivalent to tracing a rank-dimensional ancilla out of a Haar-random
    pure state; ``rank=1`` gives a Haar-random pure state.
    """
    g = rng.standard_normal((dim, rank, 2))
    g = g[..., 0] + 1j * g[..., 1]
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def haar_ranked_one(cfg: SamplerConfig, index: int) -> MultipartiteState:
    dim = int(np.prod(cfg.dims))
    rho = induced_density_matrix(dim, cfg.rank, sample_rng(cfg.seed, index, cfg.rank))
    return MultipartiteState(rho, cfg.dims)


def haar_ranked(cfg: SamplerConfig) -> list[MultipartiteState]:
    return [haar_ranked_one(cfg, i) for i in range(cfg.count)]


def haar_pure(dims: Sequence[int], seed: int) -> MultipartiteState:
    return haar_ranked_one(SamplerConfig(tuple(dims), 1, seed, 1), 0)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# -- serialization ---------------------------------------------------------

def state_to_dict(state: MultipartiteState) -> dict:
    flat = state.rho.ravel()
    return {
        "dims": list(state.dims),
        "rho": [[float(z.real), float(z.imag)] for z in flat],
    }


def state_from_dict(doc: dict) -> MultipartiteState:
    try:
        dims = [int(d) for d in doc["dims"]]
        pairs = np.asarray(doc["rho"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed state document: {exc}") from exc
    n = int(np.prod(dims)) if dims else 0
    if pairs.shape != (n * n, 2):
        raise InputError(f"rho has shape {pairs.shape}, expected ({n * n}, 2) for dims {dims}")
    rho = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(n, n)
    return MultipartiteState(rho, tuple(dims))


def dumps_state(state: MultipartiteState) -> str:
    return json.dumps(state_to_dict(state))


def loads_state(text: str) -> MultipartiteState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"state file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("state document must be a JSON object")
    return state_from_dict(doc)
