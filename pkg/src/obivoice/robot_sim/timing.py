"""Segment timing under a trapezoidal velocity profile.

Every joint accelerates at ``accel`` to at most ``speed``, cruises, and
decelerates symmetrically; joints move synchronously and finish together,
so a segment takes as long as its slowest joint.  Short moves that never
reach cruise speed follow the triangular special case.
"""

from __future__ import annotations

import math
from typing import Iterable


class ZeroSpeed(Exception):
    """Motion was requested with a speed or acceleration of zero."""


def _single_joint_time(distance: float, speed: float, accel: float) -> float:
    if distance == 0.0:
        return 0.0
    ramp = 0.5 * speed * speed / accel  # distance covered while reaching full speed
    if 2.0 * ramp <= distance:
        cruise = (distance - 2.0 * ramp) / speed
        return 2.0 * (speed / accel) + cruise
    return 2.0 * math.sqrt(distance / accel)


def segment_duration(displacements: Iterable[float], speed: float, accel: float) -> float:
    """Seconds to move every joint through its displacement (degrees).

    Raises ZeroSpeed when any joint must move but speed or accel is zero.
    """
    worst = 0.0
    for d in displacements:
        d = abs(d)
        if d == 0.0:
            continue
        if speed <= 0.0:
            raise ZeroSpeed("cannot move with speed 0")
        if accel <= 0.0:
            raise ZeroSpeed("cannot move with acceleration 0")
        worst = max(worst, _single_joint_time(d, speed, accel))
    return worst
