"""Normalized purity and bipartite correlation measures.

Every measure is evaluated on a split of the parties into a first side X
and a second side Y. Measurement-based quantities (measured mutual
information, discord, one-way work deficit) measure the second side, which
must be a single qubit.
"""

from __future__ import annotations

import enum
import functools
import math
import string
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import qla
from .errors import InputError, UnsupportedInputError
from .states import MultipartiteState

OPT_TOL = 1e-3

GRID_THETA = 32
GRID_PHI = 64
REFINE_STARTS = 3
REFINE_MIN_GAIN = 1e-6
REFINE_PATIENCE = 3
REFINE_MIN_STEP = 1e-4
REFINE_MAX_ROUNDS = 200


class MeasureKind(enum.Enum):
    NEGATIVITY = "neg"
    LOG_NEGATIVITY = "logneg"
    QMI = "qmi"
    MEASURED_MI = "mmi"
    DISCORD = "discord"
    WORK_DEFICIT = "workdef"

    @property
    def tag(self) -> str:
        return self.value

    @property
    def optimizer_based(self) -> bool:
        return self in (MeasureKind.MEASURED_MI, MeasureKind.DISCORD, MeasureKind.WORK_DEFICIT)

    def max_value(self, d_x: int, d_y: int) -> float:
        """Normalization denominator for a d_x x d_y bipartition."""
        d = min(d_x, d_y)
        if self is MeasureKind.NEGATIVITY:
            return (d - 1) / 2
        if self is MeasureKind.QMI:
            return 2 * math.log2(d)
        return math.log2(d)

    @classmethod
    def from_tag(cls, tag: str) -> "MeasureKind":
        for kind in cls:
            if kind.value == tag:
                return kind
        raise InputError(f"unknown measure tag {tag!r}; valid tags: {', '.join(TAGS)}")


TAGS = tuple(k.value for k in MeasureKind)
ALL_KINDS = tuple(MeasureKind)


def parse_kinds(tags: str | Iterable[str]) -> tuple[MeasureKind, ...]:
    if isinstance(tags, str):
        tags = [t for t in tags.split(",") if t.strip()]
    kinds = tuple(MeasureKind.from_tag(t.strip()) for t in tags)
    if not kinds:
        raise InputError(f"no measures given; valid tags: {', '.join(TAGS)}")
    return kinds


@dataclass(frozen=True)
class BipartitionSpec:
    side_x: tuple[int, ...]
    side_y: tuple[int, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        x = tuple(sorted(set(int(i) for i in self.side_x)))
        y = tuple(sorted(set(int(i) for i in self.side_y)))
        dims = tuple(int(d) for d in self.dims)
        if not x or not y:
            raise InputError("both sides of a bipartition must be nonempty")
        if set(x) & set(y):
            raise InputError(f"sides overlap: {x} and {y}")
        if set(x) | set(y) != set(range(len(dims))):
            raise InputError(f"sides {x}:{y} do not cover all {len(dims)} parties")
        object.__setattr__(self, "side_x", x)
        object.__setattr__(self, "side_y", y)
        object.__setattr__(self, "dims", dims)

    @property
    def d_x(self) -> int:
        return int(np.prod([self.dims[i] for i in self.side_x]))

    @property
    def d_y(self) -> int:
        return int(np.prod([self.dims[i] for i in self.side_y]))

    @classmethod
    def parse(cls, text: str, dims: Sequence[int]) -> "BipartitionSpec":
        """Parse party-letter notation such as ``"AB:C"``."""
        letters = string.ascii_uppercase[: len(dims)]
        try:
            left, right = text.strip().upper().split(":")
        except ValueError:
            raise InputError(f"split {text!r} must look like 'AB:C'") from None
        for ch in left + right:
            if ch not in letters:
                raise InputError(f"party {ch!r} not among {letters} for {len(dims)} parties")
        return cls(
            tuple(letters.index(c) for c in left), tuple(letters.index(c) for c in right), dims
        )

    def label(self) -> str:
        letters = string.ascii_uppercase
        return "".join(letters[i] for i in self.side_x) + ":" + "".join(
            letters[i] for i in self.side_y
        )


def split_for(state: MultipartiteState, split: BipartitionSpec | str) -> BipartitionSpec:
    if isinstance(split, str):
        return BipartitionSpec.parse(split, state.dims)
    if split.dims != state.dims:
        raise InputError(f"split dims {split.dims} do not match state dims {state.dims}")
    return split


def _bipartite(state: MultipartiteState, split: BipartitionSpec) -> np.ndarray:
    """rho with parties reordered to (side_x..., side_y...)."""
    order = list(split.side_x) + list(split.side_y)
    n = state.n_parties
    if order == list(range(n)):
        return state.rho
    t = state.rho.reshape(state.dims + state.dims)
    t = t.transpose(order + [n + i for i in order])
    return t.reshape(state.rho.shape)


def _entropies(rho_xy: np.ndarray, d_x: int, d_y: int) -> tuple[float, float, float]:
    s_x = qla.von_neumann_entropy(qla.partial_trace(rho_xy, [d_x, d_y], [0]))
    s_y = qla.von_neumann_entropy(qla.partial_trace(rho_xy, [d_x, d_y], [1]))
    s_xy = qla.von_neumann_entropy(rho_xy)
    return s_x, s_y, s_xy


# -- purity and spectral measures --------------------------------------------

def purity_normalized(state: MultipartiteState, part: Iterable[int]) -> float:
    part = sorted(set(part))
    if not part:
        raise InputError("purity needs a nonempty set of parties")
    d = int(np.prod([state.dims[i] for i in part]))
    if d < 2:
        raise InputError("purity is undefined for a one-dimensional subsystem")
    s = qla.von_neumann_entropy(qla.partial_trace(state.rho, state.dims, part))
    return (math.log2(d) - s) / math.log2(d)


def _pt_trace_norm(state: MultipartiteState, split: BipartitionSpec) -> float:
    return qla.trace_norm(qla.partial_transpose(state.rho, state.dims, split.side_y))


def negativity(state: MultipartiteState, split) -> float:
    """Raw negativity (||rho^T_Y||_1 - 1) / 2."""
    split = split_for(state, split)
    return (_pt_trace_norm(state, split) - 1) / 2


def log_negativity(state: MultipartiteState, split) -> float:
    split = split_for(state, split)
    return math.log2(_pt_trace_norm(state, split))


def negativity_normalized(state: MultipartiteState, split) -> float:
    split = split_for(state, split)
    return negativity(state, split) / MeasureKind.NEGATIVITY.max_value(split.d_x, split.d_y)


def log_negativity_normalized(state: MultipartiteState, split) -> float:
    split = split_for(state, split)
    return log_negativity(state, split) / MeasureKind.LOG_NEGATIVITY.max_value(split.d_x, split.d_y)


def quantum_mutual_information(state: MultipartiteState, split) -> tuple[float, float]:
    """(S_X + S_Y - S_XY, normalized by 2 min(log2 d_x, log2 d_y))."""
    split = split_for(state, split)
    s_x, s_y, s_xy = _entropies(_bipartite(state, split), split.d_x, split.d_y)
    raw = s_x + s_y - s_xy
    return raw, raw / MeasureKind.QMI.max_value(split.d_x, split.d_y)


# -- projective measurements on a qubit ---------------------------------------

@dataclass(frozen=True)
class MeasurementOnQubit:
    """Projective measurement onto the +/- Bloch direction (theta, phi)."""

    theta: float
    phi: float

    @property
    def bloch(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        plus, minus = _bloch_kets(np.array([self.theta]), np.array([self.phi]))
        return np.outer(plus[0], plus[0].conj()), np.outer(minus[0], minus[0].conj())

    @classmethod
    def canonical(cls, theta: float, phi: float) -> "MeasurementOnQubit":
        theta = math.fmod(theta, 2 * math.pi)
        if theta < 0:
            theta += 2 * math.pi
        if theta > math.pi:
            theta = 2 * math.pi - theta
            phi += math.pi
        phi = math.fmod(phi, 2 * math.pi)
        if phi < 0:
            phi += 2 * math.pi
        return cls(theta, phi)


def _bloch_kets(theta: np.ndarray, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    e = np.exp(1j * phi)
    plus = np.stack([c + 0j, e * s], axis=-1)
    minus = np.stack([-np.conj(e) * s, c + 0j], axis=-1)
    return plus, minus


def _xlogx(x: np.ndarray) -> np.ndarray:
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, -x * np.log2(safe), 0.0)


_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


def _bloch_vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


@functools.lru_cache(maxsize=None)
def grid_points() -> tuple[np.ndarray, np.ndarray]:
    theta = np.linspace(0.0, math.pi, GRID_THETA)
    phi = np.arange(GRID_PHI) * (2 * math.pi / GRID_PHI)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    return t.ravel(), p.ravel()


@functools.lru_cache(maxsize=None)
def _antipode_index() -> np.ndarray:
    i, j = np.meshgrid(np.arange(GRID_THETA), np.arange(GRID_PHI), indexing="ij")
    return ((GRID_THETA - 1 - i) * GRID_PHI + (j + GRID_PHI // 2) % GRID_PHI).ravel()


class _MeasurementProblem:
    """Conditional spectra of X after measuring the qubit Y of rho_xy.

    With P = (I + r.sigma)/2, the unnormalized conditional state is
    tr_Y[(I x P) rho] = (rho_X + sum_i r_i tr_Y[(I x sigma_i) rho]) / 2.
    """

    def __init__(self, rho_xy: np.ndarray, d_x: int):
        r4 = rho_xy.reshape(d_x, 2, d_x, 2)
        self.d_x = d_x
        self.base = np.trace(r4, axis1=1, axis2=3) / 2
        pauli = np.einsum("sce,iejc->sij", _PAULI, r4) / 2
        self.pauli = pauli.reshape(3, d_x * d_x)

    def _spectra(self, bloch: np.ndarray, sign: float) -> np.ndarray:
        blocks = self.base + sign * (bloch @ self.pauli).reshape(-1, self.d_x, self.d_x)
        return np.linalg.eigvalsh(blocks)

    def terms(self, theta, phi) -> tuple[np.ndarray, np.ndarray]:
        """(sum_k -tr f(p_k rho_k), H(p)) with f(x) = x log2 x, per direction."""
        bloch = _bloch_vectors(np.asarray(theta, float), np.asarray(phi, float))
        both = np.concatenate([bloch, -bloch])
        ev = self._spectra(both, 1.0).reshape(2, len(bloch), self.d_x).transpose(1, 0, 2)
        return self._reduce(ev)

    def grid_terms(self) -> tuple[np.ndarray, np.ndarray]:
        theta, phi = grid_points()
        ev_plus = self._spectra(_bloch_vectors(theta, phi), 1.0)
        # the minus outcome of n is the plus outcome of -n, which is also on the grid
        ev = np.stack([ev_plus, ev_plus[_antipode_index()]], 1)
        return self._reduce(ev)

    @staticmethod
    def _reduce(ev: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ev = np.clip(ev, 0.0, None)
        h_joint = _xlogx(ev).sum(axis=(1, 2))
        h_outcome = _xlogx(ev.sum(axis=2)).sum(axis=1)
        return h_joint, h_outcome


Objective = Callable[[np.ndarray, np.ndarray], np.ndarray]


def optimize_measurement(
    objective: Objective, grid_values: np.ndarray | None = None
) -> tuple[MeasurementOnQubit, float]:
    """Minimize a vectorized objective over qubit measurement directions.

    ``objective(theta, phi)`` takes equal-length arrays and returns the
    objective per point. A 32 x 64 grid over (theta, phi) is scanned (or
    ``grid_values`` reused), then the best three grid points are refined by
    a shrinking 3 x 3 stencil search. The step halves whenever a round gains
    less than 1e-6; a start stops once three such rounds come in a row and
    the theta step is below 1e-4 rad.
    """
    theta_g, phi_g = grid_points()
    if grid_values is None:
        grid_values = objective(theta_g, phi_g)
    grid_values = np.asarray(grid_values, dtype=float).ravel()
    starts = np.argsort(grid_values, kind="stable")[:REFINE_STARTS]

    pos = np.stack([theta_g[starts], phi_g[starts]], axis=1)
    best = grid_values[starts].copy()
    step = np.tile([math.pi / (GRID_THETA - 1), 2 * math.pi / GRID_PHI], (len(starts), 1))
    stall = np.zeros(len(starts), dtype=int)
    # center first so ties keep the current point
    offsets = np.array([(0, 0)] + [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if (a, b) != (0, 0)])

    for _ in range(REFINE_MAX_ROUNDS):
        active = np.flatnonzero((stall < REFINE_PATIENCE) | (step[:, 0] > REFINE_MIN_STEP))
        if active.size == 0:
            break
        pts = pos[active, None, :] + offsets[None, :, :] * step[active, None, :]
        vals = np.asarray(objective(pts[..., 0].ravel(), pts[..., 1].ravel()), float)
        vals = vals.reshape(len(active), len(offsets))
        k = np.argmin(vals, axis=1)
        new = vals[np.arange(len(active)), k]
        gain = best[active] - new
        moved = new < best[active]
        pos[active[moved]] = pts[np.arange(len(active)), k][moved]
        best[active[moved]] = new[moved]
        small = gain < REFINE_MIN_GAIN
        step[active[small]] /= 2
        stall[active[small]] += 1
        stall[active[~small]] = 0

    i = int(np.argmin(best))
    return MeasurementOnQubit.canonical(*pos[i]), float(best[i])


def _measured_qubit(split: BipartitionSpec) -> None:
    if len(split.side_y) != 1 or split.d_y != 2:
        raise UnsupportedInputError(
            f"measurement-based measures need a single qubit on the measured side; got {split.label()}"
        )


@dataclass(frozen=True)
class OneWayResult:
    """Optimized one-way quantities for a split (bits)."""

    s_x: float
    s_y: float
    s_xy: float
    conditional_entropy: float | None  # min_k sum p_k S(rho_X^k)
    dephased_entropy: float | None  # min S(sum_k P_k rho P_k)
    conditional_measurement: MeasurementOnQubit | None = None
    dephasing_measurement: MeasurementOnQubit | None = None

    @property
    def qmi(self) -> float:
        return self.s_x + self.s_y - self.s_xy

    @property
    def measured_mi(self) -> float:
        return self.s_x - self.conditional_entropy

    @property
    def discord(self) -> float:
        return self.qmi - self.measured_mi

    @property
    def work_deficit(self) -> float:
        return self.dephased_entropy - self.s_xy


def one_way_quantities(
    state: MultipartiteState, split, *, conditional: bool = True, dephasing: bool = True
) -> OneWayResult:
    split = split_for(state, split)
    _measured_qubit(split)
    rho_xy = _bipartite(state, split)
    s_x, s_y, s_xy = _entropies(rho_xy, split.d_x, split.d_y)
    problem = _MeasurementProblem(rho_xy, split.d_x)
    h_joint, h_out = problem.grid_terms()

    cond = deph = None
    m_cond = m_deph = None
    if conditional:
        m_cond, cond = optimize_measurement(
            lambda t, p: np.subtract(*problem.terms(t, p)), h_joint - h_out
        )
    if dephasing:
        m_deph, deph = optimize_measurement(lambda t, p: problem.terms(t, p)[0], h_joint)
    return OneWayResult(s_x, s_y, s_xy, cond, deph, m_cond, m_deph)


def measured_mutual_information(state: MultipartiteState, split) -> tuple[float, float]:
    split = split_for(state, split)
    raw = one_way_quantities(state, split, dephasing=False).measured_mi
    return raw, raw / MeasureKind.MEASURED_MI.max_value(split.d_x, split.d_y)


def quantum_discord(state: MultipartiteState, split) -> tuple[float, float]:
    split = split_for(state, split)
    raw = one_way_quantities(state, split, dephasing=False).discord
    return raw, raw / MeasureKind.DISCORD.max_value(split.d_x, split.d_y)


def work_deficit(state: MultipartiteState, split) -> tuple[float, float]:
    split = split_for(state, split)
    raw = one_way_quantities(state, split, conditional=False).work_deficit
    return raw, raw / MeasureKind.WORK_DEFICIT.max_value(split.d_x, split.d_y)


# -- classical mutual information ---------------------------------------------

def _projector_family(meas, dim: int, side: str) -> list[np.ndarray]:
    if isinstance(meas, MeasurementOnQubit):
        meas = meas.projectors()
    family = [np.asarray(p, dtype=complex) for p in meas]
    if not family or any(p.shape != (dim, dim) for p in family):
        raise InputError(f"projectors on side {side} must be {dim}x{dim} matrices")
    if np.max(np.abs(sum(family) - np.eye(dim))) > 1e-9:
        raise InputError(f"projectors on side {side} do not sum to the identity")
    return family


def classical_mutual_information(state: MultipartiteState, split, meas_x, meas_y) -> float:
    """Mutual information of the joint outcome distribution of two local measurements.

    ``meas_x``/``meas_y`` are complete projector families (or a
    ``MeasurementOnQubit`` for a qubit side).
    """
    split = split_for(state, split)
    px = _projector_family(meas_x, split.d_x, "X")
    py = _projector_family(meas_y, split.d_y, "Y")
    rho_xy = _bipartite(state, split)
    joint = np.array(
        [[np.trace(np.kron(a, b) @ rho_xy).real for b in py] for a in px]
    )
    joint = np.clip(joint, 0.0, None)
    joint /= joint.sum()
    h = qla.entropy_of_eigenvalues
    return h(joint.sum(1)) + h(joint.sum(0)) - h(joint.ravel())


# -- dispatch -------------------------------------------------------------------

def measure_values(
    state: MultipartiteState, split, kinds: Iterable[MeasureKind]
) -> tuple[dict[MeasureKind, float], dict[MeasureKind, float]]:
    """(raw, normalized) values for each requested kind, sharing work between them."""
    split = split_for(state, split)
    kinds = list(dict.fromkeys(kinds))
    raw: dict[MeasureKind, float] = {}
    need_cond = any(k in (MeasureKind.MEASURED_MI, MeasureKind.DISCORD) for k in kinds)
    need_deph = MeasureKind.WORK_DEFICIT in kinds
    one_way = None
    if need_cond or need_deph:
        one_way = one_way_quantities(state, split, conditional=need_cond, dephasing=need_deph)
    tn = None
    if MeasureKind.NEGATIVITY in kinds or MeasureKind.LOG_NEGATIVITY in kinds:
        tn = _pt_trace_norm(state, split)

    for k in kinds:
        if k is MeasureKind.NEGATIVITY:
            raw[k] = (tn - 1) / 2
        elif k is MeasureKind.LOG_NEGATIVITY:
            raw[k] = math.log2(tn)
        elif k is MeasureKind.QMI:
            raw[k] = one_way.qmi if one_way else quantum_mutual_information(state, split)[0]
        elif k is MeasureKind.MEASURED_MI:
            raw[k] = one_way.measured_mi
        elif k is MeasureKind.DISCORD:
            raw[k] = one_way.discord
        elif k is MeasureKind.WORK_DEFICIT:
            raw[k] = one_way.work_deficit
    norm = {k: v / k.max_value(split.d_x, split.d_y) for k, v in raw.items()}
    return raw, norm
