"""Evaluation reports: block stability, threshold sweeps, flip-rate summaries.

All reports are plain dataclass rows with CSV emitters; plotting stays out of
tree. Row order is deterministic (condition, then threshold, then block) so
reports diff cleanly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .bitvec import BitVector, hamming_distance
from .enroll import (
    DEFAULT_WINDOW_LENGTH,
    Mask,
    mark_stability,
    select_positions,
    weight_positions,
)
from .keygen import apply_mask

DEFAULT_THRESHOLDS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class BlockReport:
    block_index: int
    stable_count: int
    unstable_count: int

    @property
    def stable_fraction(self) -> float:
        return self.stable_count / (self.stable_count + self.unstable_count)


def block_stability(samples: list[BitVector],
                    block_size: int = DEFAULT_WINDOW_LENGTH) -> list[BlockReport]:
    """Stability statistics per full block; a trailing partial block is skipped."""
    if len(samples) < 2:
        raise ValueError("block statistics need at least 2 samples")
    length = min(len(s) for s in samples)
    reports = []
    for b in range(length // block_size):
        window = range(b * block_size, (b + 1) * block_size)
        stability = mark_stability(samples, window)
        stable = stability.stable_count()
        reports.append(BlockReport(block_index=b, stable_count=stable,
                                   unstable_count=block_size - stable))
    return reports


def skipped_trailing_bits(sample_length: int, block_size: int = DEFAULT_WINDOW_LENGTH) -> int:
    return sample_length % block_size


@dataclass(frozen=True)
class SweepRow:
    """Flip behavior of one block's selected positions under one condition."""

    condition: str
    threshold: int
    block_index: int
    selected_count: int
    max_flips: int
    sample_count: int
    samples_zero_flips: int
    samples_one_flip: int
    samples_multi_flips: int

    @property
    def pct_zero(self) -> float:
        return 100.0 * self.samples_zero_flips / self.sample_count

    @property
    def pct_one(self) -> float:
        return 100.0 * self.samples_one_flip / self.sample_count

    @property
    def pct_multi(self) -> float:
        return 100.0 * self.samples_multi_flips / self.sample_count


@dataclass(frozen=True)
class SweepReport:
    rows: list[SweepRow]

    def max_flips(self, threshold: int, condition: str | None = None) -> int:
        rows = [r for r in self.rows
                if r.threshold == threshold and (condition is None or r.condition == condition)]
        return max((r.max_flips for r in rows), default=0)

    def mean_selected(self, threshold: int) -> float:
        counts = {r.block_index: r.selected_count for r in self.rows if r.threshold == threshold}
        return float(np.mean(list(counts.values()))) if counts else 0.0


def threshold_sweep(enroll_samples: list[BitVector],
                    test_samples: dict[str, list[BitVector]],
                    thresholds: tuple[int, ...] = DEFAULT_THRESHOLDS,
                    block_size: int = DEFAULT_WINDOW_LENGTH) -> SweepReport:
    """Per block and threshold: how many positions qualify, and how the
    selected bits flip across each condition's test samples.

    The reference value of every selected position is its (constant) value in
    the enrollment samples; flips are counted per test sample against it.
    """
    if len(enroll_samples) < 2:
        raise ValueError("sweep needs at least 2 enrollment samples")
    length = min(len(s) for s in enroll_samples)
    num_blocks = length // block_size
    conditions = sorted(test_samples)

    selections: dict[tuple[int, int], np.ndarray] = {}
    references: dict[tuple[int, int], np.ndarray] = {}
    for b in range(num_blocks):
        window = range(b * block_size, (b + 1) * block_size)
        weights = weight_positions(mark_stability(enroll_samples, window))
        base = enroll_samples[0].bits[window.start:window.stop]
        for t in thresholds:
            chosen = select_positions(weights, t)
            selections[(b, t)] = chosen + window.start
            references[(b, t)] = base[chosen]

    rows = []
    for condition in conditions:
        sample_bits = [s.bits for s in test_samples[condition]]
        if not sample_bits:
            raise ValueError(f"condition {condition!r} has no test samples")
        if any(bits.size < num_blocks * block_size for bits in sample_bits):
            raise ValueError(f"condition {condition!r} has samples shorter than the "
                             f"enrolled {num_blocks} block(s)")
        for t in thresholds:
            for b in range(num_blocks):
                positions = selections[(b, t)]
                reference = references[(b, t)]
                flips = np.array([int(np.count_nonzero(bits[positions] != reference))
                                  for bits in sample_bits])
                rows.append(SweepRow(
                    condition=condition,
                    threshold=t,
                    block_index=b,
                    selected_count=int(positions.size),
                    max_flips=int(flips.max()),
                    sample_count=len(sample_bits),
                    samples_zero_flips=int(np.count_nonzero(flips == 0)),
                    samples_one_flip=int(np.count_nonzero(flips == 1)),
                    samples_multi_flips=int(np.count_nonzero(flips >= 2)),
                ))
    return SweepReport(rows=rows)


@dataclass(frozen=True)
class FlipRateSummary:
    """How often a condition's masked responses strayed from the reference."""

    condition: str
    sample_count: int
    flipped_samples: int
    max_flips: int

    @property
    def flipped_sample_pct(self) -> float:
        return 100.0 * self.flipped_samples / self.sample_count


def flip_rate_summary(mask: Mask, reference_response: BitVector,
                      test_samples: dict[str, list[BitVector]]) -> dict[str, FlipRateSummary]:
    """Per condition: share of raw test samples whose masked response differs
    from the reference at all, plus the worst-case differing bit count."""
    summaries = {}
    for condition in sorted(test_samples):
        samples = test_samples[condition]
        if not samples:
            raise ValueError(f"condition {condition!r} has no test samples")
        distances = [hamming_distance(apply_mask(s, mask), reference_response) for s in samples]
        summaries[condition] = FlipRateSummary(
            condition=condition,
            sample_count=len(samples),
            flipped_samples=sum(1 for d in distances if d > 0),
            max_flips=max(distances),
        )
    return summaries


def window_flip_rate(samples: list[BitVector], reference: BitVector | None = None) -> float:
    """Fraction of positions that differ from the reference in any sample.

    With the first sample as reference this is the share of positions an
    enrollment pass over the set would refuse to trust.
    """
    if reference is None:
        if len(samples) < 2:
            raise ValueError("need a reference or at least 2 samples")
        reference, samples = samples[0], samples[1:]
    if not samples:
        raise ValueError("no samples to compare")
    differs = np.zeros(len(reference), dtype=bool)
    for sample in samples:
        if len(sample) != len(reference):
            raise ValueError("samples must match the reference length")
        differs |= sample.bits != reference.bits
    return float(np.count_nonzero(differs)) / len(reference)


def block_reports_to_csv(reports: list[BlockReport]) -> str:
    out = io.StringIO()
    out.write("block_index,stable_count,unstable_count,stable_fraction\n")
    for r in reports:
        out.write(f"{r.block_index},{r.stable_count},{r.unstable_count},{r.stable_fraction:.6f}\n")
    return out.getvalue()


def sweep_to_csv(report: SweepReport) -> str:
    out = io.StringIO()
    out.write("condition,threshold,block_index,selected_count,max_flips,"
              "pct_samples_0_flips,pct_samples_1_flip,pct_samples_2plus_flips\n")
    for r in report.rows:
        out.write(f"{r.condition},{r.threshold},{r.block_index},{r.selected_count},"
                  f"{r.max_flips},{r.pct_zero:.4f},{r.pct_one:.4f},{r.pct_multi:.4f}\n")
    return out.getvalue()
