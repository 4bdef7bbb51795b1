"""Stable-bit selection: stability marks, cluster weights, threshold masks.

Enrollment watches a window of cells across many power-up samples, marks each
position stable (S) when its value never changed, and weights every stable
position by how deep it sits inside its run of consecutive stable cells: the
ends of a run weigh 1 and the weight grows by 1 per step toward the middle,
i.e. ``min(offset + 1, run_length - offset)``. Positions whose weight reaches
a threshold are collected, window by window, into a fixed-size mask of bit
positions that later filters raw power-up dumps into a response.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ._kv import (
    TextFormatError,
    atomic_write_text,
    format_kv_block,
    parse_kv_block,
    parse_int,
    require_keys,
)
from .bitvec import BitVector

DEFAULT_WINDOW_LENGTH = 1216
DEFAULT_TARGET_LEN = 128
MASK_FORMAT = "srampuf-mask-v1"


class InsufficientStableBitsError(Exception):
    """Not enough positions met the threshold; reports the per-window yield."""

    def __init__(self, needed: int, collected: int, window_counts: list[int]):
        self.needed = needed
        self.collected = collected
        self.window_counts = window_counts
        per_window = ", ".join(f"window {i}: {c}" for i, c in enumerate(window_counts))
        super().__init__(
            f"selected {collected} of {needed} required positions ({per_window}); "
            f"lower the threshold or provide more windows"
        )


@dataclass(frozen=True)
class StabilityMap:
    """Per-position S/U marks over one window of samples."""

    stable: np.ndarray          # bool, True where the bit never changed
    sample_count: int

    @property
    def window_length(self) -> int:
        return int(self.stable.size)

    def stable_count(self) -> int:
        return int(np.count_nonzero(self.stable))

    def stable_fraction(self) -> float:
        return self.stable_count() / self.window_length if self.window_length else 0.0


def mark_stability(samples: list[BitVector], window: range | None = None) -> StabilityMap:
    """Mark S where all samples agree, U elsewhere. Needs at least 2 samples."""
    if len(samples) < 2:
        raise ValueError("stability needs at least 2 samples")
    length = len(samples[0])
    if any(len(s) != length for s in samples):
        raise ValueError("samples must all have the same length")
    if window is None:
        window = range(0, length)
    if window.step != 1:
        raise ValueError("window must be a contiguous range")
    if window.start < 0 or window.stop > length:
        raise ValueError(f"window {window} does not fit samples of length {length}")
    stacked = np.stack([s.bits[window.start:window.stop] for s in samples])
    stable = np.all(stacked == stacked[0], axis=0)
    stable.flags.writeable = False
    return StabilityMap(stable=stable, sample_count=len(samples))


@dataclass(frozen=True)
class WeightMap:
    """Cluster-depth weight per position; unstable positions weigh 0."""

    weights: np.ndarray

    @property
    def window_length(self) -> int:
        return int(self.weights.size)


def _run_position_counts(stable: np.ndarray) -> np.ndarray:
    """Per position: how many consecutive True values end here (inclusive)."""
    cum = np.cumsum(stable, dtype=np.int64)
    at_reset = np.where(~stable, cum, 0)
    last_reset = np.maximum.accumulate(at_reset)
    return np.where(stable, cum - last_reset, 0)


def weight_positions(stability: StabilityMap) -> WeightMap:
    """Weight each stable position by its depth inside its run of S cells."""
    stable = stability.stable
    forward = _run_position_counts(stable)
    backward = _run_position_counts(stable[::-1])[::-1]
    weights = np.minimum(forward, backward)
    weights.flags.writeable = False
    return WeightMap(weights=weights)


def select_positions(weights: WeightMap, threshold: int) -> np.ndarray:
    """Ascending indices of all positions whose weight reaches the threshold."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    return np.flatnonzero(weights.weights >= threshold)


@dataclass(frozen=True)
class Mask:
    """Selected bit positions (relative to base_offset) plus how they were chosen."""

    device_id: str
    positions: np.ndarray
    threshold: int
    sample_count: int
    base_offset: int = 0
    window_length: int = DEFAULT_WINDOW_LENGTH
    num_windows: int = 1

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.int64)
        if pos.size and (np.any(np.diff(pos) <= 0) or pos[0] < 0):
            raise ValueError("mask positions must be strictly ascending and non-negative")
        if pos.size and pos[-1] >= self.num_windows * self.window_length:
            raise ValueError("mask positions exceed the enrolled windows")
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)

    @property
    def target_len(self) -> int:
        return int(self.positions.size)

    def required_dump_bits(self) -> int:
        return self.base_offset + int(self.positions[-1]) + 1 if self.positions.size else self.base_offset


def build_mask(samples: list[BitVector], threshold: int,
               target_len: int = DEFAULT_TARGET_LEN,
               window_length: int = DEFAULT_WINDOW_LENGTH,
               base_offset: int = 0,
               max_windows: int | None = None,
               device_id: str = "") -> Mask:
    """Select ``target_len`` positions from consecutive windows of the samples.

    Windows are scanned in order starting at ``base_offset``; each window's
    qualifying positions (ascending) are appended until the target is reached,
    so the lowest-index qualifiers win. Raises
    :class:`InsufficientStableBitsError` when all available windows together
    fall short.
    """
    if not samples:
        raise ValueError("no samples provided")
    if target_len < 1:
        raise ValueError("target_len must be >= 1")
    total_bits = min(len(s) for s in samples)
    available = (total_bits - base_offset) // window_length
    if max_windows is not None:
        available = min(available, max_windows)
    if available < 1:
        raise ValueError(
            f"samples of {total_bits} bits hold no full {window_length}-bit window "
            f"past offset {base_offset}"
        )

    collected: list[np.ndarray] = []
    window_counts: list[int] = []
    total = 0
    windows_used = 0
    for w in range(available):
        start = base_offset + w * window_length
        stability = mark_stability(samples, range(start, start + window_length))
        chosen = select_positions(weight_positions(stability), threshold)
        window_counts.append(int(chosen.size))
        collected.append(chosen + w * window_length)
        total += chosen.size
        windows_used = w + 1
        if total >= target_len:
            break

    if total < target_len:
        raise InsufficientStableBitsError(target_len, total, window_counts)
    positions = np.concatenate(collected)[:target_len]
    return Mask(
        device_id=device_id,
        positions=positions,
        threshold=threshold,
        sample_count=len(samples),
        base_offset=base_offset,
        window_length=window_length,
        num_windows=windows_used,
    )


def mask_to_text(mask: Mask) -> str:
    pairs = [
        ("format", MASK_FORMAT),
        ("device_id", mask.device_id),
        ("base_offset", str(mask.base_offset)),
        ("window_length", str(mask.window_length)),
        ("num_windows", str(mask.num_windows)),
        ("threshold", str(mask.threshold)),
        ("sample_count", str(mask.sample_count)),
        ("target_len", str(mask.target_len)),
        ("positions", ",".join(str(int(p)) for p in mask.positions)),
    ]
    return format_kv_block(pairs)


def mask_from_text(text: str) -> Mask:
    fields = parse_kv_block(text, what="mask")
    require_keys(fields, ["format", "device_id", "base_offset", "window_length",
                          "num_windows", "threshold", "sample_count", "target_len",
                          "positions"], what="mask")
    if fields["format"] != MASK_FORMAT:
        raise TextFormatError(f"mask: unsupported format {fields['format']!r}")
    try:
        positions = np.array([int(p) for p in fields["positions"].split(",") if p != ""],
                             dtype=np.int64)
    except ValueError:
        raise TextFormatError("mask: positions must be comma-separated integers") from None
    target_len = parse_int(fields, "target_len", what="mask")
    if positions.size != target_len:
        raise TextFormatError(f"mask: target_len says {target_len} but {positions.size} positions given")
    return Mask(
        device_id=fields["device_id"],
        positions=positions,
        threshold=parse_int(fields, "threshold", what="mask"),
        sample_count=parse_int(fields, "sample_count", what="mask"),
        base_offset=parse_int(fields, "base_offset", what="mask"),
        window_length=parse_int(fields, "window_length", what="mask"),
        num_windows=parse_int(fields, "num_windows", what="mask"),
    )


def mask_fingerprint(mask: Mask) -> str:
    """SHA-256 of the canonical mask file text; ties helper data to its mask."""
    return hashlib.sha256(mask_to_text(mask).encode("ascii")).hexdigest()


def save_mask(path, mask: Mask) -> None:
    atomic_write_text(path, mask_to_text(mask))


def load_mask(path) -> Mask:
    with open(path, "r", encoding="ascii") as fh:
        return mask_from_text(fh.read())
