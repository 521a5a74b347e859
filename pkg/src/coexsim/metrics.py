"""Per-run counters and statistical reductions (throughput, box-plot stats)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import NS_PER_S


@dataclass(frozen=True, slots=True)
class RunMetrics:
    """Closed-out counters for one simulation run (integer-ns accounting)."""

    delivered_payload_bytes: int
    attempts: int
    failures: int
    drops: int
    wifi_airtime_ns: int
    lte_airtime_ns: int
    duration_ns: int


@dataclass(frozen=True)
class BoxStats:
    median: float
    q25: float
    q75: float
    whisker_lo: float
    whisker_hi: float
    outliers: list[float]


class MetricsAccumulator:
    """Mutable counters filled in by the nodes while a run executes."""

    def __init__(self) -> None:
        self.delivered_payload_bytes = 0
        self.attempts = 0
        self.failures = 0
        self.drops = 0
        self.wifi_intervals: list[tuple[int, int]] = []  # data + ACK emissions
        self.lte_intervals: list[tuple[int, int]] = []

    def finalize(self, duration_ns: int) -> RunMetrics:
        clip = lambda iv: max(0, min(iv[1], duration_ns) - min(iv[0], duration_ns))
        return RunMetrics(
            delivered_payload_bytes=self.delivered_payload_bytes,
            attempts=self.attempts,
            failures=self.failures,
            drops=self.drops,
            wifi_airtime_ns=sum(clip(iv) for iv in self.wifi_intervals),
            lte_airtime_ns=sum(clip(iv) for iv in self.lte_intervals),
            duration_ns=duration_ns,
        )


def throughput_mbps(m: RunMetrics) -> float:
    """Goodput over the run: delivered UDP payload bits per second, in Mbps."""
    if m.duration_ns <= 0:
        raise ValueError("run duration must be positive")
    return m.delivered_payload_bytes * 8.0 / (m.duration_ns / NS_PER_S) / 1e6


def normalized_throughput(run: RunMetrics, baseline: RunMetrics) -> float:
    """Throughput ratio against the same configuration at 0% duty cycle."""
    base = throughput_mbps(baseline)
    if base <= 0:
        raise ValueError("baseline throughput must be positive")
    return throughput_mbps(run) / base


def _quartile(ordered: list[float], q: float) -> float:
    # Inclusive linear interpolation: position q * (n - 1) into the sorted sample.
    pos = q * (len(ordered) - 1)
    lo = int(pos)
    hi = min(lo + 1, len(ordered) - 1)
    frac = pos - lo
    return ordered[lo] + frac * (ordered[hi] - ordered[lo])


def box_stats(samples: list[float]) -> BoxStats:
    """Box-and-whisker reduction: quartiles, 1.5xIQR whiskers, outliers.

    Whiskers sit on the most extreme samples still within 1.5xIQR of the
    quartiles; everything beyond is returned as outliers.
    """
    if not samples:
        raise ValueError("box_stats requires at least one sample")
    ordered = sorted(float(s) for s in samples)
    q25 = _quartile(ordered, 0.25)
    median = _quartile(ordered, 0.50)
    q75 = _quartile(ordered, 0.75)
    iqr = q75 - q25
    lo_fence = q25 - 1.5 * iqr
    hi_fence = q75 + 1.5 * iqr
    inside = [s for s in ordered if lo_fence <= s <= hi_fence]
    outliers = [s for s in ordered if s < lo_fence or s > hi_fence]
    return BoxStats(median, q25, q75, inside[0], inside[-1], outliers)


def airtime_partition(wifi_intervals: list[tuple[int, int]],
                      lte_intervals: list[tuple[int, int]],
                      duration_ns: int) -> dict[str, int]:
    """Exact integer-ns split of a run into wifi-only / lte-only / overlap / idle.

    Interval lists must each be sorted and internally non-overlapping (they
    are, by construction of the run loop).  Intervals are clipped to the run.
    """
    deltas: list[tuple[int, int, int]] = []
    for intervals, which in ((wifi_intervals, 0), (lte_intervals, 1)):
        for t0, t1 in intervals:
            t0, t1 = max(t0, 0), min(t1, duration_ns)
            if t1 > t0:
                deltas.append((t0, which, 1))
                deltas.append((t1, which, -1))
    deltas.sort()

    out = {"wifi_only": 0, "lte_only": 0, "overlap": 0, "idle": 0}
    keys = (("idle", "lte_only"), ("wifi_only", "overlap"))
    active = [0, 0]
    cursor = 0
    for t, which, delta in deltas:
        if t > cursor:
            out[keys[active[0] > 0][active[1] > 0]] += t - cursor
            cursor = t
        active[which] += delta
    out[keys[active[0] > 0][active[1] > 0]] += duration_ns - cursor
    return out
