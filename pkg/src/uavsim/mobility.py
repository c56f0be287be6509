"""UAV kinematics: trajectory types, generators, and validation.

Trajectories are uniform-step sampled polylines (discrete-time state
sequences) subject to a max-speed transition constraint.  Generators
cover the three flight patterns used by the relaying and dissemination
simulations: the mobile-relay sawtooth, the data-ferry shuttle, and a
constant-velocity overflight.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

SPEED_TOLERANCE = 1e-9  # slack on the per-step displacement bound, m/s


class TrajectoryConfigError(ValueError):
    """Raised for invalid trajectory generator parameters."""


class FerryInfeasibleError(TrajectoryConfigError):
    """Ferry shuttle cannot complete a cycle at the given speed."""

    def __init__(self, v_max: float, minimum_speed: float):
        self.minimum_speed = minimum_speed
        super().__init__(
            f"ferry infeasible: v_max={v_max} m/s cannot cover the "
            f"separation within the delay budget; minimum feasible speed "
            f"is {minimum_speed} m/s")


@dataclass(frozen=True)
class UavState:
    """Kinematic sample: time, 3D position, instantaneous speed."""

    time: float                          # s
    position: tuple[float, float, float]  # m
    speed: float = 0.0                   # m/s, >= 0


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered uniform-step sequence of UAV states."""

    states: tuple[UavState, ...]
    time_step: float  # s, > 0

    def __post_init__(self):
        if self.time_step <= 0:
            raise TrajectoryConfigError("time_step must be > 0")
        if not self.states:
            raise TrajectoryConfigError("trajectory must contain states")

    @property
    def duration(self) -> float:
        return self.states[-1].time - self.states[0].time

    def position_at(self, t: float) -> tuple[float, float, float]:
        """Linearly interpolated position; clamped outside the time span."""
        states = self.states
        if t <= states[0].time:
            return states[0].position
        if t >= states[-1].time:
            return states[-1].position
        i = min(int((t - states[0].time) / self.time_step), len(states) - 2)
        a, b = states[i], states[i + 1]
        if t > b.time:  # guard against float rounding of the index
            a, b = b, states[i + 2]
        w = (t - a.time) / (b.time - a.time)
        return tuple(pa + w * (pb - pa) for pa, pb in zip(a.position, b.position))

    def to_csv(self, path) -> None:
        """Write columns time_s, x_m, y_m, z_m."""
        with open(path, "w", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["time_s", "x_m", "y_m", "z_m"])
            for s in self.states:
                writer.writerow([repr(s.time), repr(s.position[0]),
                                 repr(s.position[1]), repr(s.position[2])])


@dataclass(frozen=True)
class RelayGeometry:
    """Source/destination layout and flight constraints for relaying."""

    separation: float      # R, m, > 0
    uav_altitude: float    # H, m, > 0
    v_max: float           # m/s, >= 0
    delay_budget: float    # delta, s, > 0 (one phase; a cycle spans 2*delta)

    def __post_init__(self):
        if self.separation <= 0:
            raise TrajectoryConfigError("separation must be > 0")
        if self.uav_altitude <= 0:
            raise TrajectoryConfigError("uav_altitude must be > 0")
        if self.v_max < 0:
            raise TrajectoryConfigError("v_max must be >= 0")
        if self.delay_budget <= 0:
            raise TrajectoryConfigError("delay_budget must be > 0")

    @property
    def source_position(self) -> tuple[float, float, float]:
        return (0.0, 0.0, 0.0)

    @property
    def destination_position(self) -> tuple[float, float, float]:
        return (self.separation, 0.0, 0.0)

    @property
    def midpoint_position(self) -> tuple[float, float, float]:
        """UAV start/static position: above the midpoint at altitude H."""
        return (self.separation / 2.0, 0.0, self.uav_altitude)

    @property
    def midpoint_slant(self) -> float:
        return math.hypot(self.separation / 2.0, self.uav_altitude)


def _check_step_divides(delta: float, time_step: float) -> int:
    n = round(delta / time_step)
    if n < 1 or abs(n * time_step - delta) > 1e-9:
        raise TrajectoryConfigError(
            f"time_step {time_step} does not divide the phase duration {delta}")
    return n


def _states_from_x(xs, times, altitude: float, time_step: float):
    states = []
    for i, (t, x) in enumerate(zip(times, xs)):
        if i + 1 < len(xs):
            speed = abs(xs[i + 1] - x) / time_step
        elif i > 0:
            speed = abs(x - xs[i - 1]) / time_step
        else:
            speed = 0.0
        states.append(UavState(time=t, position=(x, 0.0, altitude), speed=speed))
    return tuple(states)


def mobile_relay_trajectory(geom: RelayGeometry, time_step: float) -> Trajectory:
    """One mobile-relaying cycle over [0, 2*delta].

    Phase 1: from the midpoint, fly toward the point above the source at
    v_max; hover there if the speed allows, otherwise turn around at
    delta/2; back at the midpoint exactly at t = delta.  Phase 2 mirrors
    phase 1 toward the destination.
    """
    delta = geom.delay_budget
    n = _check_step_divides(delta, time_step)
    half = geom.separation / 2.0
    v = geom.v_max

    def x_phase1(t: float) -> float:
        # Horizontal position during [0, delta], source side.
        if v == 0.0:
            return half
        if v * delta / 2.0 >= half:
            t_fly = half / v
            if t <= t_fly:
                return half - v * t
            if t <= delta - t_fly:
                return 0.0
            return v * (t - (delta - t_fly))
        if t <= delta / 2.0:
            return half - v * t
        return half - v * (delta - t)

    times = [i * time_step for i in range(2 * n + 1)]
    xs = []
    for t in times:
        if t <= delta:
            xs.append(x_phase1(t))
        else:
            # Phase 2 mirrors phase 1 through the midpoint plane.
            xs.append(geom.separation - x_phase1(t - delta))
    return Trajectory(states=_states_from_x(xs, times, geom.uav_altitude, time_step),
                      time_step=time_step)


def ferry_trajectory(geom: RelayGeometry, time_step: float) -> Trajectory:
    """One data-ferry shuttle cycle over [0, 2*delta].

    Hover above the source for delta - R/v, fly to above the destination
    (R/v), hover there equally long, fly back.  Requires v_max*delta >= R.
    """
    delta = geom.delay_budget
    n = _check_step_divides(delta, time_step)
    v, R = geom.v_max, geom.separation
    if v * delta < R - 1e-9:
        raise FerryInfeasibleError(v, R / delta)
    t_fly = R / v
    t_hover = delta - t_fly

    def x(t: float) -> float:
        if t <= t_hover:
            return 0.0
        if t <= delta:
            return v * (t - t_hover)
        if t <= delta + t_hover:
            return R
        return R - v * (t - delta - t_hover)

    times = [i * time_step for i in range(2 * n + 1)]
    xs = [min(max(x(t), 0.0), R) for t in times]
    return Trajectory(states=_states_from_x(xs, times, geom.uav_altitude, time_step),
                      time_step=time_step)


def overflight_trajectory(start: tuple[float, float, float],
                          end: tuple[float, float, float],
                          speed: float, time_step: float) -> Trajectory:
    """Constant-velocity straight path from start to end."""
    if speed <= 0:
        raise TrajectoryConfigError("speed must be > 0")
    length = math.dist(start, end)
    if length == 0.0:
        return Trajectory(states=(UavState(0.0, tuple(start), 0.0),),
                          time_step=time_step)
    n = math.ceil(length / (speed * time_step) - 1e-12)
    states = []
    for i in range(n + 1):
        t = i * time_step
        frac = min(speed * t / length, 1.0)
        pos = tuple(a + frac * (b - a) for a, b in zip(start, end))
        states.append(UavState(time=t, position=pos,
                               speed=speed if i < n else 0.0))
    return Trajectory(states=tuple(states), time_step=time_step)


@dataclass(frozen=True)
class TrajectoryValidation:
    """Per-index invariant violations; empty everywhere iff valid."""

    monotone_time_violations: tuple[int, ...] = ()
    uniform_step_violations: tuple[int, ...] = ()
    speed_violations: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not (self.monotone_time_violations
                    or self.uniform_step_violations
                    or self.speed_violations)


def validate_trajectory(traj: Trajectory, v_max: float) -> TrajectoryValidation:
    """Check monotone time, uniform step, and the speed transition bound.

    Violation indices refer to the later state of each offending pair.
    """
    bad_time, bad_step, bad_speed = [], [], []
    for i in range(1, len(traj.states)):
        a, b = traj.states[i - 1], traj.states[i]
        dt = b.time - a.time
        if dt <= 0:
            bad_time.append(i)
            continue
        if abs(dt - traj.time_step) > 1e-9:
            bad_step.append(i)
        displacement = math.dist(a.position, b.position)
        if displacement / dt > v_max + SPEED_TOLERANCE:
            bad_speed.append(i)
    return TrajectoryValidation(tuple(bad_time), tuple(bad_step), tuple(bad_speed))
