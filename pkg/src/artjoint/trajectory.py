"""Uniformly sampled time series, comparison metrics, and CSV round-trip.

CSV layout: header ``t,<channel>,...`` then one row per sample. Floats are
written with shortest round-trip precision, so export/import is lossless and
repeated runs produce bit-identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DisjointTimeSpansError, MalformedCsvError


@dataclass
class Trajectory:
    """Sampled channels over a shared, strictly increasing time base."""

    times: np.ndarray
    channels: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1:
            raise ValueError("times must be one-dimensional")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        self.channels = {name: np.asarray(vals, dtype=float) for name, vals in self.channels.items()}
        for name, vals in self.channels.items():
            if vals.shape != self.times.shape:
                raise ValueError(
                    f"channel '{name}' has {vals.shape[0] if vals.ndim else 0} samples, expected {len(self.times)}"
                )

    def __len__(self) -> int:
        return len(self.times)

    @property
    def channel_names(self) -> list[str]:
        return list(self.channels)

    def channel(self, name: str) -> np.ndarray:
        return self.channels[name]

    def equals(self, other: "Trajectory") -> bool:
        """Exact structural equality (names, order, and every float)."""
        return (
            self.channel_names == other.channel_names
            and np.array_equal(self.times, other.times)
            and all(np.array_equal(self.channels[n], other.channels[n]) for n in self.channels)
        )


@dataclass(frozen=True)
class ChannelStats:
    rmse: float
    max_abs: float


@dataclass(frozen=True)
class ComparisonResult:
    per_channel: dict[str, ChannelStats]
    pooled_rmse: float
    pooled_max_abs: float
    n_samples: int


def compare(a: Trajectory, b: Trajectory) -> ComparisonResult:
    """Per-channel and pooled RMSE / max-abs error between two trajectories.

    Both must carry identical channel sets. When the time bases differ, ``b``
    is linearly interpolated onto ``a``'s samples restricted to the
    overlapping span; an empty overlap raises
    :class:`DisjointTimeSpansError`.
    """
    if a.channel_names != b.channel_names:
        if set(a.channel_names) == set(b.channel_names):
            pass  # same set, different order: fine, we index by name
        else:
            only_a = sorted(set(a.channel_names) - set(b.channel_names))
            only_b = sorted(set(b.channel_names) - set(a.channel_names))
            raise ValueError(f"channel sets differ (only in a: {only_a}, only in b: {only_b})")
    if len(a) == 0 or len(b) == 0:
        raise ValueError("cannot compare empty trajectories")

    same_base = len(a) == len(b) and np.array_equal(a.times, b.times)
    if same_base:
        times = a.times
        sample_b = dict(b.channels)
    else:
        t0 = max(a.times[0], b.times[0])
        t1 = min(a.times[-1], b.times[-1])
        if t0 > t1:
            raise DisjointTimeSpansError(
                f"time spans [{a.times[0]}, {a.times[-1]}] and [{b.times[0]}, {b.times[-1]}] do not overlap"
            )
        keep = (a.times >= t0) & (a.times <= t1)
        times = a.times[keep]
        if len(times) == 0:
            raise DisjointTimeSpansError("no samples of the first trajectory fall inside the overlap")
        sample_b = {name: np.interp(times, b.times, b.channels[name]) for name in a.channel_names}

    per_channel: dict[str, ChannelStats] = {}
    total_sq = 0.0
    total_n = 0
    pooled_max = 0.0
    for name in a.channel_names:
        ref = a.channels[name] if same_base else a.channels[name][keep]
        diff = ref - sample_b[name]
        sq = float(np.dot(diff, diff))
        max_abs = float(np.max(np.abs(diff))) if len(diff) else 0.0
        per_channel[name] = ChannelStats(rmse=float(np.sqrt(sq / len(diff))), max_abs=max_abs)
        total_sq += sq
        total_n += len(diff)
        pooled_max = max(pooled_max, max_abs)
    return ComparisonResult(
        per_channel=per_channel,
        pooled_rmse=float(np.sqrt(total_sq / total_n)),
        pooled_max_abs=pooled_max,
        n_samples=len(times),
    )


def average(trajectories: "list[Trajectory]") -> Trajectory:
    """Per-sample mean of trajectories sharing one time base and channel set
    (the way repeated trials of one experiment get pooled)."""
    if not trajectories:
        raise ValueError("nothing to average")
    first = trajectories[0]
    for other in trajectories[1:]:
        if not np.array_equal(first.times, other.times):
            raise ValueError("trajectories must share the same time base to be averaged")
        if first.channel_names != other.channel_names:
            raise ValueError("trajectories must share the same channels to be averaged")
    channels = {
        name: np.mean([t.channels[name] for t in trajectories], axis=0) for name in first.channel_names
    }
    return Trajectory(times=first.times.copy(), channels=channels)


def export_csv(trajectory: Trajectory, path: "str | Path") -> None:
    """Write ``t,<channels...>`` rows with shortest round-trip floats."""
    names = trajectory.channel_names
    for name in names:
        if "," in name or "\n" in name or '"' in name:
            raise ValueError(f"channel name {name!r} is not CSV-safe")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + names)
        columns = [trajectory.times] + [trajectory.channels[n] for n in names]
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])


def import_csv(path: "str | Path") -> Trajectory:
    """Read a trajectory CSV written by :func:`export_csv` (or shaped like
    one). Raises :class:`MalformedCsvError` on bad headers, ragged rows, or
    non-numeric cells."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedCsvError(f"{path}: empty file (no header)") from None
        if not header or header[0] != "t":
            raise MalformedCsvError(f"{path}: first header column must be 't', got {header[:1]}")
        names = header[1:]
        if len(set(names)) != len(names):
            raise MalformedCsvError(f"{path}: duplicate channel names in header")
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedCsvError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise MalformedCsvError(f"{path}:{lineno}: {exc}") from None
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(header)))
    try:
        return Trajectory(
            times=data[:, 0],
            channels={name: data[:, i + 1] for i, name in enumerate(names)},
        )
    except ValueError as exc:
        raise MalformedCsvError(f"{path}: {exc}") from None
