"""Half-duplex decode-and-forward relaying cycle simulation.

Covers the three strategies compared in the relaying experiments:
static (fixed at the midpoint), mobile (sawtooth shuttle each phase),
and data ferrying (load-carry-and-deliver, communicating only while
hovering at the endpoints).  Phase 1 fills the on-board buffer from the
source link, phase 2 drains it to the destination; integration is
left-endpoint Riemann over the trajectory time step.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import (ChannelModel, LinkGeometry, SnrReference,
                      free_space_path_loss, sample_rician_gain, snr_at,
                      spectral_efficiency)
from .mobility import (FerryInfeasibleError, RelayGeometry, Trajectory,
                       ferry_trajectory, mobile_relay_trajectory)

_HOVER_EPS = 1e-6  # m, horizontal proximity that counts as hovering overhead


class RelayStrategy(str, Enum):
    STATIC = "static"
    MOBILE = "mobile"
    FERRY = "ferry"


@dataclass(frozen=True)
class RelayRunResult:
    """Per-cycle bit ledger and traces; rates are per unit bandwidth."""

    strategy: RelayStrategy
    bits_received: float   # bits/Hz accepted into the buffer in phase 1
    bits_delivered: float  # bits/Hz drained to the destination in phase 2
    end_to_end_se: float   # bits_delivered / (2*delta), bps/Hz
    peak_occupancy: float  # bits/Hz
    path_loss_trace: tuple[tuple[float, float, float], ...]  # (t, src dB, dst dB)
    se_trace: tuple[tuple[float, float], ...]                # (t, active-link SE)
    buffer_trace: tuple[tuple[float, float], ...]            # (t, occupancy)


def _cycle_trajectory(strategy: RelayStrategy, geom: RelayGeometry,
                      time_step: float) -> Trajectory:
    if strategy == RelayStrategy.STATIC:
        static = RelayGeometry(separation=geom.separation,
                               uav_altitude=geom.uav_altitude,
                               v_max=0.0, delay_budget=geom.delay_budget)
        return mobile_relay_trajectory(static, time_step)
    if strategy == RelayStrategy.MOBILE:
        return mobile_relay_trajectory(geom, time_step)
    if strategy == RelayStrategy.FERRY:
        return ferry_trajectory(geom, time_step)
    raise ValueError(f"unknown strategy {strategy!r}")


def _link_geometry(uav_position, ground_position) -> LinkGeometry:
    dx = uav_position[0] - ground_position[0]
    dy = uav_position[1] - ground_position[1]
    return LinkGeometry(horizontal_separation=math.hypot(dx, dy),
                        transmitter_height=uav_position[2],
                        receiver_height=ground_position[2])


def simulate_cycle(strategy: RelayStrategy, geom: RelayGeometry,
                   channel: ChannelModel, ref: SnrReference,
                   buffer_capacity: float = math.inf,
                   time_step: float = 0.01,
                   rng: np.random.Generator | None = None) -> RelayRunResult:
    """Simulate one relaying cycle [0, 2*delta] and return the bit ledger.

    Phase 1 (t < delta): accumulate source-link spectral efficiency into
    the buffer, clipped at ``buffer_capacity``.  Phase 2: drain at the
    destination-link spectral efficiency, never below zero occupancy.
    The ferry communicates only while hovering at an endpoint.  With the
    Rician channel variant, per-step fading draws come from ``rng``
    (defaults to a fixed seed for reproducibility).
    """
    if buffer_capacity < 0:
        raise ValueError("buffer_capacity must be >= 0 (or math.inf)")
    strategy = RelayStrategy(strategy)
    traj = _cycle_trajectory(strategy, geom, time_step)
    delta = geom.delay_budget
    fading = channel.variant == "rician"
    if fading and rng is None:
        rng = np.random.default_rng(0)

    occupancy = 0.0
    bits_received = 0.0
    bits_delivered = 0.0
    peak = 0.0
    pl_trace = []
    se_trace = []
    buf_trace = []
    n_steps = len(traj.states) - 1
    for i, state in enumerate(traj.states):
        geo_src = _link_geometry(state.position, geom.source_position)
        geo_dst = _link_geometry(state.position, geom.destination_position)
        pl_trace.append((state.time,
                         channel.path_loss_db(geo_src),
                         channel.path_loss_db(geo_dst)))
        buf_trace.append((state.time, occupancy))
        phase1 = state.time < delta - 1e-12
        link_geo = geo_src if phase1 else geo_dst
        silent = (strategy == RelayStrategy.FERRY
                  and link_geo.horizontal_separation > _HOVER_EPS)
        if silent:
            se = 0.0
        else:
            snr_db = snr_at(link_geo, channel, ref)
            if fading:
                gain = abs(sample_rician_gain(channel.k_factor_db, rng)) ** 2
                snr_db += 10.0 * math.log10(gain) if gain > 0 else -math.inf
            se = spectral_efficiency(snr_db)
        se_trace.append((state.time, se))
        if i == n_steps:
            break  # left endpoints only; the final state just closes traces
        if phase1:
            accepted = min(se * time_step, buffer_capacity - occupancy)
            occupancy += accepted
            bits_received += accepted
        else:
            drained = min(se * time_step, occupancy)
            occupancy -= drained
            bits_delivered += drained
        peak = max(peak, occupancy)

    buf_trace[-1] = (buf_trace[-1][0], occupancy)
    return RelayRunResult(
        strategy=strategy,
        bits_received=bits_received,
        bits_delivered=bits_delivered,
        end_to_end_se=bits_delivered / (2.0 * delta),
        peak_occupancy=peak,
        path_loss_trace=tuple(pl_trace),
        se_trace=tuple(se_trace),
        buffer_trace=tuple(buf_trace),
    )


def path_loss_trace(strategy: RelayStrategy, geom: RelayGeometry,
                    frequency: float, time_step: float = 0.01):
    """Free-space path loss per step: (time, loss to source, loss to destination)."""
    traj = _cycle_trajectory(RelayStrategy(strategy), geom, time_step)
    out = []
    for state in traj.states:
        pl_src = free_space_path_loss(
            _link_geometry(state.position, geom.source_position), frequency)
        pl_dst = free_space_path_loss(
            _link_geometry(state.position, geom.destination_position), frequency)
        out.append((state.time, pl_src, pl_dst))
    return tuple(out)


@dataclass(frozen=True)
class SweepRow:
    delay_budget: float
    v_max: float
    strategy: RelayStrategy
    end_to_end_se: float | None
    feasible: bool
    note: str = ""


def sweep_delay(strategies, geom_template: RelayGeometry,
                delays, speeds, channel: ChannelModel, ref: SnrReference,
                buffer_capacity: float = math.inf,
                time_step: float = 0.01) -> list[SweepRow]:
    """End-to-end SE over the (delay, speed, strategy) grid.

    Infeasible cells (ferry too slow) are recorded per-row, not fatal.
    Row order follows input index order: delay-major, then speed, then
    strategy.
    """
    if not delays or not speeds:
        raise ValueError("delays and speeds must be non-empty")
    rows = []
    for delta in delays:
        for v in speeds:
            geom = RelayGeometry(separation=geom_template.separation,
                                 uav_altitude=geom_template.uav_altitude,
                                 v_max=v, delay_budget=delta)
            for strategy in strategies:
                strategy = RelayStrategy(strategy)
                try:
                    result = simulate_cycle(strategy, geom, channel, ref,
                                            buffer_capacity, time_step)
                    rows.append(SweepRow(delta, v, strategy,
                                         result.end_to_end_se, True))
                except FerryInfeasibleError as exc:
                    rows.append(SweepRow(delta, v, strategy, None, False,
                                         note=str(exc)))
    return rows


def buffer_requirement(strategy: RelayStrategy, geom: RelayGeometry,
                       channel: ChannelModel, ref: SnrReference,
                       time_step: float = 0.01) -> float:
    """Minimum buffer capacity (bits/Hz) achieving the unbounded throughput.

    Equals the peak occupancy of an unbounded-buffer run.
    """
    result = simulate_cycle(strategy, geom, channel, ref,
                            buffer_capacity=math.inf, time_step=time_step)
    return result.peak_occupancy


def write_trace_csv(result: RelayRunResult, path) -> None:
    """Trace file: time_s, pl_src_db, pl_dst_db, se_bpshz, buffer_bits."""
    se = dict(result.se_trace)
    buf = dict(result.buffer_trace)
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time_s", "pl_src_db", "pl_dst_db", "se_bpshz",
                         "buffer_bits"])
        for t, pl_src, pl_dst in result.path_loss_trace:
            writer.writerow([repr(t), repr(pl_src), repr(pl_dst),
                             repr(se[t]), repr(buf[t])])


def write_sweep_csv(rows, path) -> None:
    """Sweep table: delta_s, v_mps, strategy, se_bpshz, feasible."""
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["delta_s", "v_mps", "strategy", "se_bpshz", "feasible"])
        for row in rows:
            writer.writerow([repr(row.delay_budget), repr(row.v_max),
                             row.strategy.value,
                             "" if row.end_to_end_se is None
                             else repr(row.end_to_end_se),
                             int(row.feasible)])
