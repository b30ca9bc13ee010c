"""Purity–correlation complementarity: bounds, per-state records, ensembles."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .measures import (
    BipartitionSpec,
    MeasureKind,
    measure_values,
    purity_normalized,
    split_for,
)
from .states import MultipartiteState, SamplerConfig, haar_ranked_one

SPECTRAL_TOL = 1e-6
OPTIMIZER_TOL = 1e-3
DEFAULT_BINS = 50
MIN_VARIANT_KINDS = (MeasureKind.NEGATIVITY, MeasureKind.QMI)


def tolerance(kind: MeasureKind) -> float:
    return OPTIMIZER_TOL if kind.optimizer_based else SPECTRAL_TOL


def bound_for(d_x: int, d_y: int) -> float:
    """Right-hand side of P_X + Q_{X:Y} <= b."""
    if d_x < 2 or d_y < 2:
        raise InputError("complementarity bound needs both dimensions >= 2")
    if d_x <= d_y:
        return 1.0
    return 2.0 - math.log2(d_y) / math.log2(d_x)


def perpendicular_distance(total: float, bound: float) -> float:
    """Signed distance of (P, Q) with P + Q = total from the line P + Q = bound."""
    return (bound - total) / math.sqrt(2)


@dataclass
class ComplementarityRecord:
    split: str
    bound: float
    purity: float
    raw_values: dict[MeasureKind, float]
    measure_values: dict[MeasureKind, float]
    sums: dict[MeasureKind, float]
    distances: dict[MeasureKind, float]
    # kinds whose raw value exceeds log2 d_y (automatic only for qmi)
    side_condition_breached: set[MeasureKind] = field(default_factory=set)

    def violations(self) -> list[MeasureKind]:
        return [k for k, s in self.sums.items() if s > self.bound + tolerance(k)]


def evaluate(
    state: MultipartiteState, split: BipartitionSpec | str, kinds: Iterable[MeasureKind]
) -> ComplementarityRecord:
    split = split_for(state, split)
    kinds = list(dict.fromkeys(kinds))
    bound = bound_for(split.d_x, split.d_y)
    purity = purity_normalized(state, split.side_x)
    raw, norm = measure_values(state, split, kinds)
    sums = {k: purity + norm[k] for k in kinds}
    distances = {k: perpendicular_distance(sums[k], bound) for k in kinds}
    log_dy = math.log2(split.d_y)
    breached = {
        k for k in kinds if k is not MeasureKind.QMI and raw[k] > log_dy + tolerance(k)
    }
    return ComplementarityRecord(split.label(), bound, purity, raw, norm, sums, distances, breached)


def min_single_party_variant(state: MultipartiteState, kind: MeasureKind) -> float:
    """P_AB + min(Q_{A:C}, Q_{B:C}) for a three-party state."""
    if state.n_parties != 3:
        raise InputError("the single-party variant needs exactly three parties")
    if kind not in MIN_VARIANT_KINDS:
        raise InputError(f"single-party variant supports {[k.tag for k in MIN_VARIANT_KINDS]}")
    purity = purity_normalized(state, (0, 1))
    values = []
    for keep in ((0, 2), (1, 2)):
        reduced = state.reduce(keep)
        values.append(measure_values(reduced, "A:B", [kind])[1][kind])
    return purity + min(values)


# -- ensembles --------------------------------------------------------------------

@dataclass
class Histogram:
    edges: np.ndarray
    frequencies: np.ndarray

    def rows(self):
        return zip(self.edges[:-1], self.edges[1:], self.frequencies)


def histogram(values: Sequence[float], low: float, high: float, bins: int) -> Histogram:
    """Equal-width relative-frequency histogram; values outside are clipped in."""
    if bins < 1:
        raise InputError("bin count must be positive")
    values = np.clip(np.asarray(values, dtype=float), low, high)
    counts, edges = np.histogram(values, bins=bins, range=(low, high))
    return Histogram(edges, counts / max(len(values), 1))


@dataclass
class SampleRecord:
    sample_id: int
    purity: float
    values: dict[MeasureKind, float]
    sums: dict[MeasureKind, float]
    distances: dict[MeasureKind, float]
    min_variant: dict[MeasureKind, float]


@dataclass
class EnsembleReport:
    rank: int
    samples: int
    bound: float
    kinds: tuple[MeasureKind, ...]
    records: list[SampleRecord]
    mean_distance: dict[MeasureKind, float]
    violation_count: dict[MeasureKind, int]
    histograms: dict[MeasureKind, Histogram]
    min_variant_violations: dict[MeasureKind, int]
    min_variant_histograms: dict[MeasureKind, Histogram]


def _sample_record(
    cfg: SamplerConfig, split: BipartitionSpec, kinds, index: int, with_min_variant: bool
) -> SampleRecord:
    state = haar_ranked_one(cfg, index)
    rec = evaluate(state, split, kinds)
    mins = {}
    if with_min_variant:
        mins = {k: min_single_party_variant(state, k) for k in MIN_VARIANT_KINDS}
    return SampleRecord(index, rec.purity, rec.measure_values, rec.sums, rec.distances, mins)


def _sample_chunk(args) -> list[SampleRecord]:
    cfg, split, kinds, indices, with_min_variant = args
    return [_sample_record(cfg, split, kinds, i, with_min_variant) for i in indices]


def ensemble_records(
    cfg: SamplerConfig,
    split: BipartitionSpec,
    kinds: Sequence[MeasureKind],
    *,
    workers: int = 1,
    with_min_variant: bool = False,
    chunk_size: int = 250,
) -> list[SampleRecord]:
    """Per-sample records in sample-index order, for any worker count."""
    chunks = [
        (cfg, split, tuple(kinds), range(lo, min(lo + chunk_size, cfg.count)), with_min_variant)
        for lo in range(0, cfg.count, chunk_size)
    ]
    if workers <= 1:
        results = map(_sample_chunk, chunks)
        return [r for chunk in results for r in chunk]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [r for chunk in pool.map(_sample_chunk, chunks) for r in chunk]


def ensemble_report(
    cfg: SamplerConfig,
    split: BipartitionSpec | str,
    kinds: Sequence[MeasureKind],
    bins: int = DEFAULT_BINS,
    *,
    workers: int = 1,
    with_min_variant: bool = False,
) -> EnsembleReport:
    if isinstance(split, str):
        split = BipartitionSpec.parse(split, cfg.dims)
    kinds = tuple(dict.fromkeys(kinds))
    bound = bound_for(split.d_x, split.d_y)
    records = ensemble_records(
        cfg, split, kinds, workers=workers, with_min_variant=with_min_variant
    )
    return summarize(cfg.rank, bound, kinds, records, bins)


def summarize(rank, bound, kinds, records: list[SampleRecord], bins: int) -> EnsembleReport:
    n = len(records)
    mean_distance, violations, hists = {}, {}, {}
    for k in kinds:
        sums = np.array([r.sums[k] for r in records])
        mean_distance[k] = float(np.mean([r.distances[k] for r in records]))
        violations[k] = int(np.sum(sums > bound + tolerance(k)))
        hists[k] = histogram(sums, 0.0, bound, bins)
    min_viol, min_hists = {}, {}
    if records and records[0].min_variant:
        for k in records[0].min_variant:
            vals = np.array([r.min_variant[k] for r in records])
            min_viol[k] = int(np.sum(vals > bound + SPECTRAL_TOL))
            min_hists[k] = histogram(vals, 0.0, bound, bins)
    return EnsembleReport(
        rank, n, bound, tuple(kinds), records, mean_distance, violations, hists, min_viol, min_hists
    )
