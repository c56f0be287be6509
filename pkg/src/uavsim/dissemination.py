"""D2D-enhanced two-phase file dissemination over a ground-node field.

Phase 1: the UAV broadcasts one distinct coded packet per slot along its
flight; nodes inside the coverage radius receive each packet
independently with probability 1 - erasure_probability.  The coding is
an ideal rateless abstraction: any K distinct coded packets decode the
K-packet file.  Phase 2: nodes redistribute packets over error-free
short-range D2D links in synchronous gossip rounds.  The baseline
repeats uncoded transmission passes until every node holds the whole
file individually.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .mobility import Trajectory


@dataclass
class GroundNode:
    """Ground terminal with its accumulated coded-packet set."""

    id: int
    position: tuple[float, float]  # m, ground plane
    received_packets: set[int] = field(default_factory=set)


@dataclass(frozen=True)
class FileSpec:
    """File of K source packets; decodes once K distinct coded packets arrive."""

    source_packet_count: int

    def __post_init__(self):
        if self.source_packet_count <= 0:
            raise ValueError("source_packet_count must be > 0")

    @property
    def decode_threshold(self) -> int:
        return self.source_packet_count

    def decoded(self, node: GroundNode) -> bool:
        return len(node.received_packets) >= self.decode_threshold


@dataclass(frozen=True)
class ReceptionModel:
    """Binary coverage disc plus i.i.d. packet erasure."""

    coverage_radius: float      # m, slant, > 0
    erasure_probability: float  # in [0, 1)

    def __post_init__(self):
        if self.coverage_radius <= 0:
            raise ValueError("coverage_radius must be > 0")
        if not 0.0 <= self.erasure_probability < 1.0:
            raise ValueError("erasure_probability must lie in [0, 1)")


class D2dGraph:
    """Symmetric adjacency over node ids: edge iff ground distance <= range."""

    def __init__(self, nodes: list[GroundNode], d2d_range: float):
        self.d2d_range = d2d_range
        self.neighbors: dict[int, set[int]] = {n.id: set() for n in nodes}
        for i, a in enumerate(nodes):
            for b in nodes[i + 1:]:
                if math.dist(a.position, b.position) <= d2d_range:
                    self.neighbors[a.id].add(b.id)
                    self.neighbors[b.id].add(a.id)

    def connected_components(self) -> list[list[int]]:
        """Components as sorted id lists, ordered by smallest member."""
        seen: set[int] = set()
        components = []
        for start in sorted(self.neighbors):
            if start in seen:
                continue
            stack = [start]
            component = []
            while stack:
                node = stack.pop()
                if node in seen:
                    continue
                seen.add(node)
                component.append(node)
                stack.extend(self.neighbors[node] - seen)
            components.append(sorted(component))
        return components


def _slot_count(traj: Trajectory, slot_duration: float) -> int:
    return max(1, int(round(traj.duration / slot_duration)))


def _in_range(uav_position, node: GroundNode, rx: ReceptionModel) -> bool:
    slant = math.sqrt((uav_position[0] - node.position[0]) ** 2
                      + (uav_position[1] - node.position[1]) ** 2
                      + uav_position[2] ** 2)
    return slant <= rx.coverage_radius


def phase1_broadcast(traj: Trajectory, nodes: list[GroundNode], file: FileSpec,
                     rx: ReceptionModel, slot_duration: float,
                     rng: np.random.Generator) -> int:
    """Broadcast one distinct coded packet per slot along the trajectory.

    Mutates each node's ``received_packets``.  Returns the number of UAV
    transmissions (one per slot over the full flight).
    """
    if slot_duration <= 0:
        raise ValueError("slot_duration must be > 0")
    n_slots = _slot_count(traj, slot_duration)
    for slot in range(n_slots):
        uav_pos = traj.position_at(traj.states[0].time + slot * slot_duration)
        for node in nodes:
            if not _in_range(uav_pos, node, rx):
                continue
            if rng.random() >= rx.erasure_probability:
                node.received_packets.add(slot)
    return n_slots


@dataclass(frozen=True)
class ExchangeResult:
    rounds_used: int
    success: bool
    stalled_components: tuple[tuple[int, ...], ...] = ()  # id tuples
    component_union_sizes: tuple[int, ...] = ()


def phase2_exchange(nodes: list[GroundNode], graph: D2dGraph, file: FileSpec,
                    rng: np.random.Generator,
                    round_cap: int = 10_000) -> ExchangeResult:
    """Synchronous gossip until every node decodes, a component stalls,
    or the round cap is hit.

    Each round, every node holding at least one packet broadcasts one
    uniformly random packet it has not broadcast before (falling back to
    a uniform draw over its whole set once everything has been sent).
    The no-repeat choice stays agnostic of what neighbors need but
    guarantees a component with a sufficient packet union finishes
    within K rounds.
    """
    by_id = {n.id: n for n in nodes}
    components = graph.connected_components()
    union_sizes = []
    stalled = []
    for component in components:
        union = set().union(*(by_id[i].received_packets for i in component))
        union_sizes.append(len(union))
        if len(union) < file.decode_threshold:
            stalled.append(tuple(component))

    def all_decoded() -> bool:
        return all(file.decoded(n) for n in nodes)

    already_sent: dict[int, set[int]] = {n.id: set() for n in nodes}
    rounds = 0
    while not all_decoded():
        if stalled:
            # Some component can never finish; stop once the others have.
            reachable = {i for c in components
                         if tuple(c) not in {tuple(s) for s in stalled}
                         for i in c}
            if all(file.decoded(by_id[i]) for i in reachable):
                break
        if rounds >= round_cap:
            return ExchangeResult(rounds, False, tuple(stalled),
                                  tuple(union_sizes))
        # Snapshot first: all broadcasts in a round are simultaneous.
        broadcasts = []
        for node in nodes:
            if not node.received_packets:
                continue
            fresh = sorted(node.received_packets - already_sent[node.id])
            pool = fresh if fresh else sorted(node.received_packets)
            packet = pool[rng.integers(len(pool))]
            already_sent[node.id].add(packet)
            broadcasts.append((node.id, packet))
        for sender, packet in broadcasts:
            for neighbor in graph.neighbors[sender]:
                by_id[neighbor].received_packets.add(packet)
        rounds += 1
    return ExchangeResult(rounds, all_decoded(), tuple(stalled),
                          tuple(union_sizes))


@dataclass(frozen=True)
class BaselineResult:
    uav_transmissions: int
    passes_used: int
    success: bool
    missing_per_node: dict[int, int] | None = None  # populated on cap failure


def run_baseline(traj: Trajectory, nodes: list[GroundNode], file: FileSpec,
                 rx: ReceptionModel, slot_duration: float,
                 rng: np.random.Generator,
                 pass_cap: int = 1_000) -> BaselineResult:
    """Repeat uncoded passes until every node holds all K packets.

    The UAV cycles packet indices 0..K-1 across consecutive slots,
    continuing the cycle over repeated flights of the same trajectory.
    Returns total transmissions (count at the completing slot).
    """
    if slot_duration <= 0:
        raise ValueError("slot_duration must be > 0")
    k = file.source_packet_count
    slots_per_pass = _slot_count(traj, slot_duration)
    pending = [n for n in nodes if len(n.received_packets) < k]
    transmissions = 0
    for pass_index in range(pass_cap):
        for slot in range(slots_per_pass):
            packet = transmissions % k
            transmissions += 1
            uav_pos = traj.position_at(traj.states[0].time
                                       + slot * slot_duration)
            for node in pending:
                if not _in_range(uav_pos, node, rx):
                    continue
                if rng.random() >= rx.erasure_probability:
                    node.received_packets.add(packet)
            pending = [n for n in pending if len(n.received_packets) < k]
            if not pending:
                return BaselineResult(transmissions, pass_index + 1, True)
    missing = {n.id: k - len(n.received_packets) for n in pending}
    return BaselineResult(transmissions, pass_cap, False, missing)


def cluster_nodes(nodes: list[GroundNode], d2d_range: float) -> list[list[int]]:
    """Connected components of the D2D graph, as sorted node-id lists."""
    return D2dGraph(nodes, d2d_range).connected_components()


def write_summary_csv(rows, path) -> None:
    """Per-run summary rows: (scenario_id, seed, scheme, uav_transmissions,
    d2d_rounds, success)."""
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario_id", "seed", "scheme", "uav_transmissions",
                         "d2d_rounds", "success"])
        for row in rows:
            writer.writerow(list(row))


def write_node_detail_csv(rows, path) -> None:
    """Per-node rows: (node_id, packets_after_phase1, decoded_after_phase2)."""
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "packets_after_phase1",
                         "decoded_after_phase2"])
        for row in rows:
            writer.writerow(list(row))
