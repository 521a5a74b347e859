"""Duty-cycled unlicensed-LTE transmitter: on/off scheduling and spectrum occupancy.

The node alternates a fixed active interval with a randomized silent interval
(mean period = active + silent), starts every active interval on a radio-frame
boundary, and never carrier-senses: while on it radiates continuously over its
occupied band, while off it radiates nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import NS_PER_MS, Engine
from .radio import SpectrumBand

PRB_CHOICES = (6, 15, 25, 50, 75, 100)
PRB_WIDTH_MHZ = 0.18

RNG_LABEL = "lte-silent"


@dataclass(frozen=True)
class DutyCycleConfig:
    """On/off schedule: duty = long-run fraction of time spent radiating."""

    duty: float = 0.5
    mean_period_ms: float = 150.0
    silent_spread: float = 0.5  # uniform half-width, as a fraction of the mean silent time
    frame_align_ms: int = 10

    def __post_init__(self) -> None:
        if not 0.0 <= self.duty <= 1.0:
            raise ValueError(f"duty must be in [0, 1], got {self.duty}")
        if self.mean_period_ms <= 0:
            raise ValueError("mean_period_ms must be positive")
        if not 0.0 <= self.silent_spread < 1.0:
            raise ValueError("silent_spread must be in [0, 1)")
        if self.frame_align_ms < 1:
            raise ValueError("frame_align_ms must be >= 1")


@dataclass(frozen=True)
class LtePhyConfig:
    n_prb: int = 100
    center_offset_mhz: float = 0.0  # relative to the WiFi channel center
    tx_power_dbm: float = 12.0

    def __post_init__(self) -> None:
        if self.n_prb not in PRB_CHOICES:
            raise ValueError(f"n_prb must be one of {PRB_CHOICES}, got {self.n_prb}")


def _round_ms_to_ns(value_ms: float) -> int:
    # Half-up to whole subframes; all schedule arithmetic stays integer ns.
    return int(math.floor(value_ms + 0.5)) * NS_PER_MS


def on_duration_ns(cfg: DutyCycleConfig) -> int:
    """Fixed active interval: duty x mean period, whole 1 ms subframes."""
    return _round_ms_to_ns(cfg.duty * cfg.mean_period_ms)


def draw_silent_duration_ns(cfg: DutyCycleConfig, rng: np.random.Generator) -> int:
    """One randomized silent interval, whole subframes, at least 1 ms.

    Uniform on [(1-spread), (1+spread)] x mean silent time, so the long-run
    on fraction converges to the configured duty.  Requires duty < 1.
    """
    if cfg.duty >= 1.0:
        raise ValueError("duty 1 has no silent period")
    mean_off_ms = (1.0 - cfg.duty) * cfg.mean_period_ms
    low = (1.0 - cfg.silent_spread) * mean_off_ms
    high = (1.0 + cfg.silent_spread) * mean_off_ms
    return max(_round_ms_to_ns(float(rng.uniform(low, high))), NS_PER_MS)


def occupied_band(phy: LtePhyConfig) -> SpectrumBand:
    """Occupied spectrum: n_prb x 180 kHz centered at the configured offset."""
    return SpectrumBand(phy.center_offset_mhz, phy.n_prb * PRB_WIDTH_MHZ)


class LteNode:
    """Event-driven duty-cycle schedule; notifies the medium at each transition.

    Draws only from its own RNG stream, so the schedule for a given seed is
    identical whether or not WiFi nodes exist in the run.
    """

    name = "lte"

    def __init__(self, engine: Engine, cfg: DutyCycleConfig, phy: LtePhyConfig,
                 medium) -> None:
        self.engine = engine
        self.cfg = cfg
        self.phy = phy
        self.medium = medium
        self.rng = engine.rng_stream(RNG_LABEL)
        self.on = False
        self.transitions: list[tuple[int, bool]] = []  # (time_ns, now_on)
        self._on_ns = on_duration_ns(cfg)
        self._align_ns = cfg.frame_align_ms * NS_PER_MS

    def start(self) -> None:
        if self.cfg.duty > 0.0 and self._on_ns > 0:
            self.engine.schedule(0, "lte-on", self.name, self._turn_on)

    def _turn_on(self) -> None:
        now = self.engine.now
        self.on = True
        self.transitions.append((now, True))
        self.medium.lte_state_changed(now, True)
        if self.cfg.duty < 1.0:
            self.engine.schedule(now + self._on_ns, "lte-off", self.name, self._turn_off)

    def _turn_off(self) -> None:
        now = self.engine.now
        self.on = False
        self.transitions.append((now, False))
        self.medium.lte_state_changed(now, False)
        silent_ns = draw_silent_duration_ns(self.cfg, self.rng)
        expiry = now + silent_ns
        # Ceiling to the next frame boundary; the extra wait counts as off-time.
        next_on = -(-expiry // self._align_ns) * self._align_ns
        self.engine.schedule(next_on, "lte-on", self.name, self._turn_on)
