"""The fixed opponent: hold the ball when in possession, otherwise intercept."""
from __future__ import annotations

from . import env, skills
from .env import Command, PhysicsParams, PlaceBall, WorldState


def decide(world: WorldState, params: PhysicsParams) -> Command:
    """One command per simulator step; never idles."""
    if env.has_possession(world.adversary, world.ball, params):
        tx, ty = skills.hold_target(world.adversary, world.dribbler)
        return PlaceBall(tx, ty)
    return skills.move_to_intercept(world, "adversary", params)
