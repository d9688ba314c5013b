"""State variables presented to the learner.

Five values: a near-line indicator for the dribbler, the dribbler's body
angle, the adversary's bearing relative to the dribbler's body, the global
bearing from ball to adversary, and the ball-adversary distance.  The last
two locate the adversary in polar coordinates around the ball.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .env import FieldSpec, WorldState, global_angle

NEAR_LINE_MARGIN = 1.0  # meters


@dataclass(frozen=True, slots=True)
class StateFeatures:
    posy: int                       # +1 near top line, -1 near bottom line, else 0
    dribbler_angle: float           # [0, 360)
    dribbler_adversary_angle: float  # bearing to adversary minus body angle, [0, 360)
    ball_adversary_angle: float     # global bearing from ball to adversary, [0, 360)
    ball_adversary_dist: float      # [0, field diagonal]


def extract_features(world: WorldState, field: FieldSpec) -> StateFeatures:
    d = world.dribbler
    a = world.adversary
    b = world.ball
    # top line is y = -h/2 (y grows toward the bottom line)
    if d.y + field.half_height < NEAR_LINE_MARGIN:
        posy = 1
    elif field.half_height - d.y < NEAR_LINE_MARGIN:
        posy = -1
    else:
        posy = 0
    return StateFeatures(
        posy=posy,
        dribbler_angle=d.body_angle % 360.0,
        dribbler_adversary_angle=(global_angle(d.x, d.y, a.x, a.y) - d.body_angle) % 360.0,
        ball_adversary_angle=global_angle(b.x, b.y, a.x, a.y),
        ball_adversary_dist=math.hypot(a.x - b.x, a.y - b.y),
    )
