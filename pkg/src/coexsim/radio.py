"""Link budgets, spectral overlap, SINR, and packet-reception decisions.

Everything here is a pure function over value types; both technologies share
these primitives.  Powers are dBm, gains dB (negative = loss), frequencies
relative MHz unless stated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# 802.11a OFDM rates and the hard-decision SINR thresholds used by default.
# Thresholds are configurable; they only need to be strictly increasing in rate.
DEFAULT_PER_THRESHOLDS_DB = {6: 5.0, 9: 6.0, 12: 7.0, 18: 10.0, 24: 13.0,
                             36: 18.0, 48: 23.0, 54: 25.0}


def mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def dbm(milliwatts: float) -> float:
    return 10.0 * math.log10(milliwatts)


@dataclass(frozen=True, slots=True)
class SpectrumBand:
    """Occupied-spectrum interval [center - width/2, center + width/2] in MHz."""

    center_mhz: float
    width_mhz: float

    def __post_init__(self) -> None:
        if self.width_mhz <= 0:
            raise ValueError(f"band width must be positive, got {self.width_mhz}")

    @property
    def low_mhz(self) -> float:
        return self.center_mhz - self.width_mhz / 2.0

    @property
    def high_mhz(self) -> float:
        return self.center_mhz + self.width_mhz / 2.0


@dataclass(frozen=True, slots=True)
class LinkBudget:
    """One directed radio path; received power = tx_power_dbm + path_gain_db."""

    tx_power_dbm: float
    path_gain_db: float  # includes both antenna gains

    @property
    def rx_power_dbm(self) -> float:
        return self.tx_power_dbm + self.path_gain_db


@dataclass(frozen=True)
class PerModel:
    """Packet-error behavior: per-MCS SINR thresholds plus optional soft transition.

    soft_slope_k = 0 selects the hard rule (success iff min SINR >= threshold).
    oob_floor_dbc is the out-of-band leakage floor relative to in-band PSD.
    """

    per_mcs_threshold_db: dict[int, float] = field(
        default_factory=lambda: dict(DEFAULT_PER_THRESHOLDS_DB))
    soft_slope_k: float = 0.0
    oob_floor_dbc: float = -30.0

    def __post_init__(self) -> None:
        if self.oob_floor_dbc > 0:
            raise ValueError("oob_floor_dbc must be <= 0")
        rates = sorted(self.per_mcs_threshold_db)
        thresholds = [self.per_mcs_threshold_db[r] for r in rates]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("PER thresholds must be strictly increasing with MCS rate")

    def threshold_db(self, mcs_mbps: int) -> float:
        return self.per_mcs_threshold_db[mcs_mbps]


class SinrTrace:
    """Piecewise-constant SINR over one packet's reception window.

    Segments are (start_ns, end_ns, sinr_db), contiguous, non-overlapping, and
    covering the window exactly.
    """

    def __init__(self, segments: list[tuple[int, int, float]]) -> None:
        if not segments:
            raise ValueError("trace must cover a non-empty window")
        for (a0, a1, _), (b0, _, _) in zip(segments, segments[1:]):
            if a1 != b0:
                raise ValueError("trace segments must be contiguous")
        for t0, t1, _ in segments:
            if t1 <= t0:
                raise ValueError("trace segments must have positive duration")
        self.segments = segments

    @property
    def start_ns(self) -> int:
        return self.segments[0][0]

    @property
    def end_ns(self) -> int:
        return self.segments[-1][1]

    def min_sinr_db(self) -> float:
        return min(s for _, _, s in self.segments)


def fspl_db(distance_m: float, freq_ghz: float) -> float:
    """Free-space path loss, 20 log10(d_km) + 20 log10(f_GHz) + 92.45 dB."""
    if distance_m <= 0 or freq_ghz <= 0:
        raise ValueError("distance and frequency must be positive")
    return 20.0 * math.log10(distance_m / 1000.0) + 20.0 * math.log10(freq_ghz) + 92.45


def overlap_fraction(interferer: SpectrumBand, victim: SpectrumBand,
                     oob_floor_dbc: float = -30.0) -> float:
    """Fraction of interferer power landing in the victim band.

    Flat in-band PSD: |intersection| / interferer width, floored by the linear
    equivalent of ``oob_floor_dbc`` so widely separated bands still leak a
    configurable residue (and the result stays monotone in |offset|).
    """
    intersection = min(interferer.high_mhz, victim.high_mhz) - max(
        interferer.low_mhz, victim.low_mhz)
    fraction = max(intersection, 0.0) / interferer.width_mhz
    return max(fraction, 10.0 ** (oob_floor_dbc / 10.0))


def noise_floor_dbm(bandwidth_mhz: float, noise_figure_db: float) -> float:
    """Thermal noise floor: -174 dBm/Hz integrated over the bandwidth, plus NF."""
    if bandwidth_mhz <= 0:
        raise ValueError("bandwidth must be positive")
    return -174.0 + 10.0 * math.log10(bandwidth_mhz * 1e6) + noise_figure_db


def sinr_db(signal_dbm: float, interferers: list[tuple[float, float]],
            noise_dbm: float) -> float:
    """SINR with each interferer weighted by its spectral overlap fraction.

    ``interferers`` is a list of (power_dbm, overlap_fraction) pairs.
    """
    denominator_mw = mw(noise_dbm)
    for power_dbm, fraction in interferers:
        denominator_mw += fraction * mw(power_dbm)
    return dbm(mw(signal_dbm) / denominator_mw)


def packet_outcome(mcs_mbps: int, trace: SinrTrace, model: PerModel,
                   rng: np.random.Generator) -> bool:
    """True iff the packet decodes.

    Hard rule (soft_slope_k = 0): success iff the minimum SINR over the trace
    clears the MCS threshold.  Soft rule: each constant-SINR segment decodes
    independently per started millisecond with probability
    sigmoid(k * (sinr - threshold)); the packet succeeds iff all segments do.
    Deterministic given the rng stream.
    """
    threshold = model.threshold_db(mcs_mbps)
    if model.soft_slope_k == 0.0:
        return trace.min_sinr_db() >= threshold
    log_p = 0.0
    for t0, t1, sinr in trace.segments:
        p = 1.0 / (1.0 + math.exp(-model.soft_slope_k * (sinr - threshold)))
        if p <= 0.0:
            return False
        log_p += ((t1 - t0) / 1e6) * math.log(p)
    return float(rng.uniform()) < math.exp(log_p)
