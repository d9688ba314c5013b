"""Macro-action layer: HoldBall and Dribble compiled to primitive commands,
plus the iterative ball-interception routine shared by both players."""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import env
from .env import (AgentBody, BallState, Command, Dash, Kick, PhysicsParams,
                  PlaceBall, Turn, WorldState, angle_diff, global_angle)

TURN_TOLERANCE_DEG = 10.0  # below this heading error we dash/kick instead of turning
HOLD_OFFSET_M = 0.7        # hold distance, kept well inside kickable range

HOLD_BALL = "hold_ball"
DRIBBLE = "dribble"


@dataclass(frozen=True, slots=True)
class MacroAction:
    kind: str
    theta: float = 0.0  # global degrees (dribble only)
    k: float = 0.0      # target roll distance, meters (dribble only)

    def label(self) -> str:
        if self.kind == HOLD_BALL:
            return "hold_ball"
        return f"dribble({self.theta:g},{self.k:g})"


# The learner-visible action set: hold, plus kicks diagonally down/up,
# forward weak, and forward strong.
ACTION_SET: tuple[MacroAction, ...] = (
    MacroAction(HOLD_BALL),
    MacroAction(DRIBBLE, theta=30.0, k=5.0),
    MacroAction(DRIBBLE, theta=330.0, k=5.0),
    MacroAction(DRIBBLE, theta=0.0, k=5.0),
    MacroAction(DRIBBLE, theta=0.0, k=10.0),
)


def hold_target(holder: AgentBody, opponent: AgentBody) -> tuple[float, float]:
    """Point HOLD_OFFSET_M from the holder, directly away from the opponent."""
    dx = holder.x - opponent.x
    dy = holder.y - opponent.y
    d = math.hypot(dx, dy)
    if d < 1e-12:
        rad = math.radians(holder.body_angle + 180.0)
        return holder.x + HOLD_OFFSET_M * math.cos(rad), holder.y + HOLD_OFFSET_M * math.sin(rad)
    scale = HOLD_OFFSET_M / d
    return holder.x + dx * scale, holder.y + dy * scale


def intercept_point(agent: AgentBody, ball: BallState,
                    params: PhysicsParams) -> tuple[tuple[float, float], int]:
    """Earliest step at which the agent can reach the rolling ball.

    Iterates t = 0, 1, ... and returns the first t whose predicted ball
    position is reachable at player_max_speed, allowing one step to turn
    when the required heading is off by more than TURN_TOLERANCE_DEG.
    Falls back to the ball's rest point if nothing qualifies in time.
    """
    rho = params.ball_decay
    vmax = params.player_max_speed
    bx, by = ball.x, ball.y
    vx, vy = ball.vx, ball.vy
    geom = 0.0       # (1 - rho^t) / (1 - rho)
    rho_pow = 1.0
    for t in range(params.max_episode_steps + 1):
        px = bx + vx * geom
        py = by + vy * geom
        d = math.hypot(px - agent.x, py - agent.y)
        if d < 1e-12:
            return (px, py), t
        heading = global_angle(agent.x, agent.y, px, py)
        turn_steps = 0 if abs(angle_diff(heading, agent.body_angle)) <= TURN_TOLERANCE_DEG else 1
        budget = t - turn_steps
        if budget > 0 and d <= vmax * budget:
            return (px, py), t
        geom += rho_pow
        rho_pow *= rho
    rest = (bx + vx / (1.0 - rho), by + vy / (1.0 - rho))
    return rest, params.max_episode_steps


def move_to_intercept(world: WorldState, actor: str, params: PhysicsParams) -> Command:
    """Turn toward the interception point, or dash at full available power."""
    agent = world.dribbler if actor == "dribbler" else world.adversary
    (px, py), _t = intercept_point(agent, world.ball, params)
    d = math.hypot(px - agent.x, py - agent.y)
    if d < 1e-9:
        return Dash(0.0)  # already at the interception point; wait for the ball
    heading = global_angle(agent.x, agent.y, px, py)
    err = angle_diff(heading, agent.body_angle)
    if abs(err) > TURN_TOLERANCE_DEG:
        return Turn(err)
    power = 100.0 if agent.stamina >= 100.0 else agent.stamina
    return Dash(power)


class MacroRunner:
    """Drives one macro-action, emitting one primitive command per step.

    HoldBall completes after a single step (given possession); Dribble
    completes exactly when the dribbler regains possession.  If possession is
    missing when the macro would complete, the runner keeps intercepting so
    that decision points only occur with the ball at the dribbler's feet.
    """

    __slots__ = ("action", "steps_elapsed", "released")

    def __init__(self, action: MacroAction):
        self.action = action
        self.steps_elapsed = 0
        self.released = False  # dribble: ball kicked (or kick opportunity spent)

    @property
    def phase(self) -> str:
        if self.action.kind == HOLD_BALL:
            return "holding" if self.steps_elapsed == 0 else "done"
        if not self.released:
            return "turning"
        return "intercepting"

    def command(self, world: WorldState, params: PhysicsParams) -> Command:
        self.steps_elapsed += 1
        dribbler = world.dribbler
        if self.action.kind == HOLD_BALL:
            if self.steps_elapsed == 1:
                if not env.has_possession(dribbler, world.ball, params):
                    return None  # NoPossession: macro is a no-op step
                tx, ty = hold_target(dribbler, world.adversary)
                return PlaceBall(tx, ty)
            return move_to_intercept(world, "dribbler", params)
        # dribble
        if not self.released:
            if not env.has_possession(dribbler, world.ball, params):
                self.released = True  # NoPossession: skip straight to interception
                return None
            err = angle_diff(self.action.theta, dribbler.body_angle)
            if abs(err) > TURN_TOLERANCE_DEG:
                return Turn(err)
            self.released = True
            v0 = self.action.k * (1.0 - params.ball_decay)  # total roll = k meters
            return Kick(v0 / params.kick_power_rate, self.action.theta)
        return move_to_intercept(world, "dribbler", params)

    def finished(self, world: WorldState, params: PhysicsParams) -> bool:
        if self.steps_elapsed == 0:
            return False
        if self.action.kind == HOLD_BALL:
            return env.has_possession(world.dribbler, world.ball, params)
        return self.released and env.has_possession(world.dribbler, world.ball, params)


def hold_ball(world: WorldState, rng, params: PhysicsParams) -> WorldState:
    """One-step HoldBall for the dribbler alone (no adversary action)."""
    if env.has_possession(world.dribbler, world.ball, params):
        tx, ty = hold_target(world.dribbler, world.adversary)
        cmd: Command = PlaceBall(tx, ty)
    else:
        cmd = None
    return env.advance(world, cmd, None, rng, params)


def start_dribble(world: WorldState, theta: float, k: float,
                  params: PhysicsParams) -> MacroRunner:
    return MacroRunner(MacroAction(DRIBBLE, theta=theta, k=k))
