"""802.11 DCF saturated station pair: MAC timing, CCA profiles, backoff state machine.

One transmitter, one receiver, fixed MCS, always a 1500-byte payload queued.
The only contender is the duty-cycled LTE node, seen through energy-detect
carrier sensing (profile-dependent) and through SINR at decode time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import NS_PER_US, Engine
from .radio import PerModel, SinrTrace, SpectrumBand, overlap_fraction, packet_outcome

# Legacy OFDM rates: label (Mbps) -> data bits per 4 us symbol.
BITS_PER_SYMBOL = {6: 24, 9: 36, 12: 48, 18: 72, 24: 96, 36: 144, 48: 192, 54: 216}
MCS_RATES = tuple(sorted(BITS_PER_SYMBOL))
BASIC_RATES = (6, 12, 24)
SERVICE_TAIL_BITS = 16 + 6


@dataclass(frozen=True, slots=True)
class McsEntry:
    label_mbps: int
    bits_per_symbol: int
    min_sinr_db: float


@dataclass(frozen=True)
class DcfParams:
    """802.11a MAC timing constants; difs must equal sifs + 2 x slot."""

    slot_us: int = 9
    sifs_us: int = 16
    difs_us: int = 34
    cw_min: int = 15
    cw_max: int = 1023
    retry_limit: int = 7
    preamble_us: int = 20
    ack_bytes: int = 14
    control_rate_mbps: int = 24
    mac_overhead_bytes: int = 36

    def __post_init__(self) -> None:
        if self.difs_us != self.sifs_us + 2 * self.slot_us:
            raise ValueError("difs_us must equal sifs_us + 2 * slot_us")
        for cw in (self.cw_min, self.cw_max):
            if cw & (cw + 1):
                raise ValueError(f"contention windows must be 2^k - 1, got {cw}")
        if self.cw_max < self.cw_min:
            raise ValueError("cw_max must be >= cw_min")


@dataclass(frozen=True)
class CcaProfile:
    """Vendor carrier-sensing behavior.

    measure_band selects the span over which non-WiFi energy is integrated:
    the full 20 MHz channel or a 10 MHz sub-band centered on the carrier.
    mid_packet_abort=True freezes the backoff countdown the instant energy
    appears (the in-progress slot is voided); False lets the in-progress slot
    complete and decrement at its boundary, so the station reacts (and may
    even transmit) only at slot boundaries.
    """

    name: str
    ed_threshold_dbm: float
    measure_band: str  # "full20" | "primary10"
    mid_packet_abort: bool

    def __post_init__(self) -> None:
        if self.measure_band not in ("full20", "primary10"):
            raise ValueError(f"unknown measure_band {self.measure_band!r}")


# The sensed LTE level at the testbed geometry spans -47.4 dBm (-16 dBm LTE)
# to -19.4 dBm (+12 dBm).  vendor-A's threshold splits that range: low-power
# LTE is invisible to carrier sensing (collisions decide), -6 dBm and above
# defers.  vendor-B integrates over the centered 10 MHz sub-band, where the
# sensed level varies with occupied bandwidth (-47.4 dBm at <= 50 PRB down to
# -49.9 dBm at 100 PRB), so its busy decision flips across the PRB grid.
CCA_PRESETS = {
    "vendor-A": CcaProfile("vendor-A", ed_threshold_dbm=-40.0,
                           measure_band="full20", mid_packet_abort=True),
    "vendor-B": CcaProfile("vendor-B", ed_threshold_dbm=-48.0,
                           measure_band="primary10", mid_packet_abort=False),
}


def mcs_entry(label_mbps: int, per_model: PerModel) -> McsEntry:
    if label_mbps not in BITS_PER_SYMBOL:
        raise ValueError(f"mcs must be one of {MCS_RATES}, got {label_mbps}")
    return McsEntry(label_mbps, BITS_PER_SYMBOL[label_mbps],
                    per_model.threshold_db(label_mbps))


def frame_airtime_us(mcs_mbps: int, payload_bytes: int, params: DcfParams) -> int:
    """PPDU airtime: preamble + 4 us OFDM symbols covering service/tail/MAC/payload."""
    if payload_bytes <= 0:
        raise ValueError("payload_bytes must be positive")
    bits = SERVICE_TAIL_BITS + 8 * (payload_bytes + params.mac_overhead_bytes)
    return params.preamble_us + 4 * math.ceil(bits / BITS_PER_SYMBOL[mcs_mbps])


def ack_rate_mbps(data_rate_mbps: int, params: DcfParams) -> int:
    """Highest basic rate not exceeding min(data rate, configured control rate)."""
    cap = min(data_rate_mbps, params.control_rate_mbps)
    eligible = [r for r in BASIC_RATES if r <= cap]
    return max(eligible) if eligible else BASIC_RATES[0]


def ack_airtime_us(data_rate_mbps: int, params: DcfParams) -> int:
    rate = ack_rate_mbps(data_rate_mbps, params)
    bits = SERVICE_TAIL_BITS + 8 * params.ack_bytes
    return params.preamble_us + 4 * math.ceil(bits / BITS_PER_SYMBOL[rate])


def analytic_goodput_mbps(mcs_mbps: int, payload_bytes: int, params: DcfParams) -> float:
    """Exact-expectation single-station DCF goodput on an always-idle channel.

    Per-packet cycle: DIFS + E[backoff] x slot + data + SIFS + ACK, with
    E[backoff] = cw_min / 2 over the uniform {0..cw_min} draw.  This is the
    independent oracle the event-driven path is validated against.
    """
    cycle_us = (params.difs_us
                + params.cw_min / 2.0 * params.slot_us
                + frame_airtime_us(mcs_mbps, payload_bytes, params)
                + params.sifs_us
                + ack_airtime_us(mcs_mbps, params))
    return payload_bytes * 8.0 / cycle_us


def cca_busy(profile: CcaProfile, lte_power_at_sensor_dbm: float | None,
             lte_band: SpectrumBand | None, wifi_band: SpectrumBand,
             oob_floor_dbc: float = -30.0, peer_preamble: bool = False) -> bool:
    """Energy-detect decision: integrated non-WiFi energy in the measured band.

    A detected WiFi preamble from the peer always reads busy regardless of
    profile.  ``lte_power_at_sensor_dbm`` is the total LTE power arriving at
    the sensing antenna (None while the LTE node is silent).
    """
    if peer_preamble:
        return True
    if lte_power_at_sensor_dbm is None or lte_band is None:
        return False
    if profile.measure_band == "full20":
        measured = wifi_band
    else:
        measured = SpectrumBand(wifi_band.center_mhz, 10.0)
    in_band_dbm = lte_power_at_sensor_dbm + 10.0 * math.log10(
        overlap_fraction(lte_band, measured, oob_floor_dbc))
    return in_band_dbm >= profile.ed_threshold_dbm


def receiver_decode(channel, mcs: McsEntry, start_ns: int, end_ns: int,
                    model: PerModel, rng: np.random.Generator) -> bool:
    """Decode one data frame at the WiFi receiver against the LTE timeline."""
    trace = channel.sinr_trace_at_rx(start_ns, end_ns)
    return packet_outcome(mcs.label_mbps, trace, model, rng)


class DcfStation:
    """Saturated DCF transmitter driving the engine; its peer only sends ACKs.

    States: blocked (medium busy, optional residual counter), difs, backoff,
    tx, ack.  Standard DCF: idle DIFS, uniform backoff in [0, cw], freeze
    while the medium is busy, binary exponential backoff on failure, drop and
    reset after retry_limit consecutive failures.
    """

    name = "wifi-tx"

    def __init__(self, engine: Engine, channel, params: DcfParams, mcs: McsEntry,
                 cca: CcaProfile, per_model: PerModel, payload_bytes: int,
                 acc) -> None:
        self.engine = engine
        self.channel = channel
        self.params = params
        self.mcs = mcs
        self.cca = cca
        self.per_model = per_model
        self.payload_bytes = payload_bytes
        self.acc = acc
        self.rng = engine.rng_stream("wifi-backoff")
        self.decode_rng = engine.rng_stream("wifi-decode")

        self.slot_ns = params.slot_us * NS_PER_US
        self.sifs_ns = params.sifs_us * NS_PER_US
        self.difs_ns = params.difs_us * NS_PER_US
        self.data_air_ns = frame_airtime_us(mcs.label_mbps, payload_bytes, params) * NS_PER_US
        self.ack_air_ns = ack_airtime_us(mcs.label_mbps, params) * NS_PER_US
        self.ack_rate = ack_rate_mbps(mcs.label_mbps, params)

        self.state = "blocked"
        self.cw = params.cw_min
        self.consecutive_failures = 0
        self.pending_k: int | None = None  # residual backoff surviving a freeze
        self._event = None
        self._backoff_k = 0
        self._backoff_t0 = 0
        self._tx_start = 0
        self._ack_window: tuple[int, int] | None = None

        # Introspection for tests; draw_log stays None unless a test enables it.
        self.draw_log: list[int] | None = None
        self.difs_completed = 0
        self.backoff_slots_elapsed = 0
        self.data_decode_failures = 0
        self.ack_decode_failures = 0

    def start(self) -> None:
        self.engine.schedule(self.engine.now, "cca-sample", self.name,
                             self._begin_contention, "start")

    # -- contention ---------------------------------------------------------

    def _begin_contention(self) -> None:
        if self.channel.busy:
            self.state = "blocked"
            return
        self.state = "difs"
        self._event = self.engine.schedule_in(self.difs_ns, "difs-end", self.name,
                                              self._difs_end)

    def _difs_end(self) -> None:
        self.difs_completed += 1
        if self.pending_k is None:
            k = int(self.rng.integers(0, self.cw + 1))
            if self.draw_log is not None:
                self.draw_log.append(k)
        else:
            k = self.pending_k
            self.pending_k = None
        if k == 0:
            self._start_tx()
            return
        self.state = "backoff"
        self._backoff_k = k
        self._backoff_t0 = self.engine.now
        self._event = self.engine.schedule_in(k * self.slot_ns, "backoff-slot",
                                              self.name, self._backoff_done, f"k={k}")

    def _backoff_done(self) -> None:
        self.backoff_slots_elapsed += self._backoff_k
        self._start_tx()

    # -- transmission and acknowledgment ------------------------------------

    def _start_tx(self) -> None:
        self.state = "tx"
        self.acc.attempts += 1
        self._tx_start = self.engine.now
        self.channel.wifi_tx_changed(self.engine.now, True)
        self._event = self.engine.schedule_in(self.data_air_ns, "tx-end", self.name,
                                              self._tx_end)

    def _tx_end(self) -> None:
        now = self.engine.now
        self.channel.wifi_tx_changed(now, False)
        self.acc.wifi_intervals.append((self._tx_start, now))
        data_ok = receiver_decode(self.channel, self.mcs, self._tx_start, now,
                                  self.per_model, self.decode_rng)
        ack_start = now + self.sifs_ns
        ack_end = ack_start + self.ack_air_ns
        self.state = "ack"
        if data_ok:
            # The receiver answers SIFS after the data, carrier sense exempt.
            self._ack_window = (ack_start, ack_end)
            self._event = self.engine.schedule(ack_end, "ack-result", self.name,
                                               self._ack_result)
        else:
            self.data_decode_failures += 1
            self._ack_window = None
            self._event = self.engine.schedule(ack_end + self.slot_ns, "ack-timeout",
                                               self.name, self._ack_timeout)

    def _ack_result(self) -> None:
        ack_start, ack_end = self._ack_window
        self.acc.wifi_intervals.append((ack_start, ack_end))
        self._ack_window = None
        trace = self.channel.sinr_trace_at_tx(ack_start, ack_end)
        if packet_outcome(self.ack_rate, trace, self.per_model, self.decode_rng):
            self._success()
        else:
            self.ack_decode_failures += 1
            self._failure(resume_delay_ns=self.slot_ns)

    def _ack_timeout(self) -> None:
        self._failure(resume_delay_ns=0)

    def _success(self) -> None:
        self.acc.delivered_payload_bytes += self.payload_bytes
        self.cw = self.params.cw_min
        self.consecutive_failures = 0
        self._begin_contention()

    def _failure(self, resume_delay_ns: int) -> None:
        self.acc.failures += 1
        self.consecutive_failures += 1
        self.cw = min(2 * (self.cw + 1) - 1, self.params.cw_max)
        if self.consecutive_failures >= self.params.retry_limit:
            self.acc.drops += 1
            self.consecutive_failures = 0
            self.cw = self.params.cw_min
        if resume_delay_ns:
            self._event = self.engine.schedule_in(resume_delay_ns, "cca-sample",
                                                  self.name, self._begin_contention)
        else:
            self._begin_contention()

    # -- carrier-sense callbacks from the channel ----------------------------

    def busy_onset(self, now: int) -> None:
        """Deferral-grade energy appeared on the medium."""
        if self.state == "difs":
            # Any interruption restarts the DIFS wait once the medium clears.
            self.engine.cancel(self._event)
            self.state = "blocked"
        elif self.state == "backoff":
            elapsed = now - self._backoff_t0
            whole, within = divmod(elapsed, self.slot_ns)
            if self.cca.mid_packet_abort or within == 0:
                self.engine.cancel(self._event)
                self.pending_k = self._backoff_k - whole
                self.backoff_slots_elapsed += whole
                self.state = "blocked"
            elif whole + 1 < self._backoff_k:
                # Slot in progress still completes; react at its boundary.
                self.engine.cancel(self._event)
                remaining = self._backoff_k - (whole + 1)
                completed = whole + 1
                self._event = self.engine.schedule(
                    self._backoff_t0 + completed * self.slot_ns, "backoff-slot",
                    self.name, lambda: self._slot_boundary(remaining, completed))
            # else: the final slot completes and the pending event transmits.

    def _slot_boundary(self, remaining: int, completed: int) -> None:
        self.backoff_slots_elapsed += completed
        if self.channel.busy:
            self.pending_k = remaining
            self.state = "blocked"
        else:
            self._backoff_k = remaining
            self._backoff_t0 = self.engine.now
            self._event = self.engine.schedule_in(remaining * self.slot_ns,
                                                  "backoff-slot", self.name,
                                                  self._backoff_done,
                                                  f"k={remaining}")

    def busy_cleared(self, now: int) -> None:
        if self.state == "blocked":
            self._begin_contention()

    # -- end of run -----------------------------------------------------------

    def flush(self, t_end_ns: int) -> None:
        """Account in-flight emissions when the run is cut off at t_end."""
        if self.state == "tx":
            self.acc.wifi_intervals.append((self._tx_start, t_end_ns))
        elif self._ack_window is not None and self._ack_window[0] < t_end_ns:
            self.acc.wifi_intervals.append((self._ack_window[0],
                                            min(self._ack_window[1], t_end_ns)))
