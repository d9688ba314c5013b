"""Deterministic 2D soccer micro-simulator.

Field geometry, agent/ball kinematics, primitive actions (turn, dash, kick),
possession, and the coach rules that start and end episodes.

Coordinates: origin at field center, x grows toward the right line, y grows
toward the bottom line.  Global angles are in degrees, zero pointing at the
right line, increasing clockwise, normalized to [0, 360).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union


def normalize_angle(angle: float) -> float:
    """Map an angle in degrees to [0, 360)."""
    a = angle % 360.0
    # tiny negative inputs can round the modulo up to exactly 360.0
    return 0.0 if a == 360.0 else a


def angle_diff(a: float, b: float) -> float:
    """Signed angular difference a - b in (-180, 180]."""
    d = (a - b) % 360.0
    return d - 360.0 if d > 180.0 else d


def global_angle(from_x: float, from_y: float, to_x: float, to_y: float) -> float:
    """Bearing in degrees from one point to another."""
    return normalize_angle(math.degrees(math.atan2(to_y - from_y, to_x - from_x)))


@dataclass(slots=True)
class FieldSpec:
    width: float = 20.0
    height: float = 20.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("field dimensions must be positive")

    @property
    def half_width(self) -> float:
        return self.width / 2.0

    @property
    def half_height(self) -> float:
        return self.height / 2.0

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)


@dataclass(slots=True)
class PhysicsParams:
    ball_decay: float = 0.94
    player_decay: float = 0.4
    player_max_speed: float = 1.05
    ball_max_speed: float = 3.0
    kick_power_rate: float = 0.027
    dash_power_rate: float = 0.006
    kickable_distance: float = 1.085
    action_noise_level: float = 0.05
    stamina_max: float = 4000.0
    max_episode_steps: int = 1000
    player_radius: float = 0.3

    def __post_init__(self):
        if not (0.0 < self.ball_decay <= 1.0 and 0.0 < self.player_decay <= 1.0):
            raise ValueError("decay factors must be in (0, 1]")
        if self.kickable_distance <= 0:
            raise ValueError("kickable_distance must be positive")


@dataclass(slots=True)
class AgentBody:
    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0
    body_angle: float = 0.0
    stamina: float = 4000.0


@dataclass(slots=True)
class BallState:
    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0


@dataclass(slots=True)
class WorldState:
    dribbler: AgentBody
    adversary: AgentBody
    ball: BallState
    step_index: int = 0
    adversary_hold_streak: int = 0


class Winner(Enum):
    DRIBBLER = "dribbler"
    ADVERSARY = "adversary"


class Cause(Enum):
    RIGHT_LINE_DRIBBLER = "right_line_dribbler"
    RIGHT_LINE_ADVERSARY = "right_line_adversary"
    LEFT_TOP_BOTTOM_OUT = "left_top_bottom_out"
    ADVERSARY_HOLD = "adversary_hold"
    TIMEOUT = "timeout"


@dataclass(slots=True)
class EpisodeOutcome:
    winner: Winner
    cause: Cause
    steps: int


class SimulationError(Exception):
    pass


class KickWithoutPossession(SimulationError):
    """A kick was issued by an agent that is not within kickable distance."""


# ---------------------------------------------------------------------------
# Primitive commands

@dataclass(frozen=True, slots=True)
class Turn:
    angle: float  # relative, degrees, clamped to [-180, 180]


@dataclass(frozen=True, slots=True)
class Dash:
    power: float  # [0, 100]


@dataclass(frozen=True, slots=True)
class Kick:
    power: float
    direction: float  # global degrees


@dataclass(frozen=True, slots=True)
class PlaceBall:
    """Close-control ball placement used by HoldBall; possession-gated."""
    x: float
    y: float


Command = Union[Turn, Dash, Kick, PlaceBall, None]


# ---------------------------------------------------------------------------
# Primitive dynamics

def has_possession(agent: AgentBody, ball: BallState, params: PhysicsParams) -> bool:
    return math.hypot(agent.x - ball.x, agent.y - ball.y) < params.kickable_distance


def noise_factor(rng, nu: float) -> float:
    return 1.0 + rng.uniform(-nu, nu) if nu > 0.0 else 1.0


def apply_turn(agent: AgentBody, angle: float) -> AgentBody:
    a = -180.0 if angle < -180.0 else (180.0 if angle > 180.0 else angle)
    return replace(agent, body_angle=normalize_angle(agent.body_angle + a))


def apply_dash(agent: AgentBody, power: float, rng, params: PhysicsParams) -> AgentBody:
    power = 0.0 if power < 0.0 else (100.0 if power > 100.0 else power)
    effective = power if power <= agent.stamina else agent.stamina
    accel = effective * params.dash_power_rate * noise_factor(rng, params.action_noise_level)
    rad = math.radians(agent.body_angle)
    vx = agent.vx + accel * math.cos(rad)
    vy = agent.vy + accel * math.sin(rad)
    speed = math.hypot(vx, vy)
    if speed > params.player_max_speed:
        scale = params.player_max_speed / speed
        vx *= scale
        vy *= scale
    decay = params.player_decay
    return AgentBody(
        x=agent.x + vx,
        y=agent.y + vy,
        vx=vx * decay,
        vy=vy * decay,
        body_angle=agent.body_angle,
        stamina=agent.stamina - effective,
    )


def apply_kick(world: WorldState, kicker: str, power: float, direction: float,
               rng, params: PhysicsParams) -> WorldState:
    agent = world.dribbler if kicker == "dribbler" else world.adversary
    if not has_possession(agent, world.ball, params):
        raise KickWithoutPossession(kicker)
    speed = max(0.0, power) * params.kick_power_rate * noise_factor(rng, params.action_noise_level)
    nu = params.action_noise_level
    if nu > 0.0:
        direction = direction + rng.uniform(-nu * 30.0, nu * 30.0)
    if speed > params.ball_max_speed:
        speed = params.ball_max_speed
    rad = math.radians(direction)
    ball = replace(world.ball, vx=speed * math.cos(rad), vy=speed * math.sin(rad))
    return replace(world, ball=ball)


def step_ball(ball: BallState, params: PhysicsParams) -> BallState:
    decay = params.ball_decay
    return BallState(
        x=ball.x + ball.vx,
        y=ball.y + ball.vy,
        vx=ball.vx * decay,
        vy=ball.vy * decay,
    )


def _glide(agent: AgentBody, params: PhysicsParams) -> AgentBody:
    """Coast one step on current momentum (no acceleration)."""
    decay = params.player_decay
    return replace(agent, x=agent.x + agent.vx, y=agent.y + agent.vy,
                   vx=agent.vx * decay, vy=agent.vy * decay)


def apply_command(world: WorldState, actor: str, cmd: Command, rng,
                  params: PhysicsParams) -> WorldState:
    if cmd is None:
        return world
    if isinstance(cmd, Turn):
        agent = world.dribbler if actor == "dribbler" else world.adversary
        agent = apply_turn(agent, cmd.angle)
    elif isinstance(cmd, Dash):
        agent = world.dribbler if actor == "dribbler" else world.adversary
        agent = apply_dash(agent, cmd.power, rng, params)
    elif isinstance(cmd, Kick):
        try:
            world = apply_kick(world, actor, cmd.power, cmd.direction, rng, params)
        except KickWithoutPossession:
            pass  # skills-layer bug; the step proceeds as a no-op kick
        # the kicker keeps gliding on its momentum during the kick step
        agent = world.dribbler if actor == "dribbler" else world.adversary
        agent = _glide(agent, params)
    elif isinstance(cmd, PlaceBall):
        agent = world.dribbler if actor == "dribbler" else world.adversary
        if not has_possession(agent, world.ball, params):
            return world
        return replace(world, ball=BallState(cmd.x, cmd.y, 0.0, 0.0))
    else:
        raise TypeError(f"unknown command {cmd!r}")
    if actor == "dribbler":
        return replace(world, dribbler=agent)
    return replace(world, adversary=agent)


COLLISION_VELOCITY_DAMPING = -0.1  # server-like rebound on body contact


def resolve_player_collision(dribbler: AgentBody, adversary: AgentBody,
                             params: PhysicsParams) -> tuple[AgentBody, AgentBody]:
    """Push overlapping player bodies apart to exactly touching distance."""
    min_sep = 2.0 * params.player_radius
    dx = adversary.x - dribbler.x
    dy = adversary.y - dribbler.y
    d = math.hypot(dx, dy)
    if d >= min_sep:
        return dribbler, adversary
    if d < 1e-12:
        ux, uy = 1.0, 0.0
    else:
        ux, uy = dx / d, dy / d
    shift = (min_sep - d) / 2.0
    damp = COLLISION_VELOCITY_DAMPING
    dribbler = replace(dribbler, x=dribbler.x - ux * shift, y=dribbler.y - uy * shift,
                       vx=dribbler.vx * damp, vy=dribbler.vy * damp)
    adversary = replace(adversary, x=adversary.x + ux * shift, y=adversary.y + uy * shift,
                        vx=adversary.vx * damp, vy=adversary.vy * damp)
    return dribbler, adversary


def advance(world: WorldState, dribbler_cmd: Command, adversary_cmd: Command,
            rng, params: PhysicsParams) -> WorldState:
    """One simulator step: dribbler command, adversary command, collision
    resolution, ball motion."""
    world = apply_command(world, "dribbler", dribbler_cmd, rng, params)
    world = apply_command(world, "adversary", adversary_cmd, rng, params)
    dribbler, adversary = resolve_player_collision(world.dribbler, world.adversary, params)
    world = replace(world, dribbler=dribbler, adversary=adversary)
    ball = step_ball(world.ball, params)
    if has_possession(world.adversary, ball, params):
        streak = world.adversary_hold_streak + 1
        if streak > 2:
            streak = 2
    else:
        streak = 0
    return WorldState(
        dribbler=world.dribbler,
        adversary=world.adversary,
        ball=ball,
        step_index=world.step_index + 1,
        adversary_hold_streak=streak,
    )


# ---------------------------------------------------------------------------
# Coach / episode lifecycle

ADVERSARY_SPAWN_MARGIN = 0.5  # beyond kickable distance, avoids borderline spawns
BALL_START_OFFSET = 0.5       # ball placed this far to the dribbler's right


def reset_episode(rng, field: FieldSpec, params: PhysicsParams,
                  stamina: Optional[tuple[float, float]] = None) -> WorldState:
    """Place the dribbler (with the ball) and a randomly located adversary.

    Stamina is carried in from the previous episode; it is only restored by
    coach_maybe_restore_stamina.
    """
    if stamina is None:
        stamina = (params.stamina_max, params.stamina_max)
    dribbler = AgentBody(x=-field.width / 4.0, y=0.0, body_angle=0.0, stamina=stamina[0])
    ball = BallState(x=dribbler.x + BALL_START_OFFSET, y=dribbler.y)
    min_dist = params.kickable_distance + ADVERSARY_SPAWN_MARGIN
    hw, hh = field.half_width, field.half_height
    while True:
        ax = rng.uniform(-hw, hw)
        ay = rng.uniform(-hh, hh)
        if math.hypot(ax - ball.x, ay - ball.y) >= min_dist:
            break
    adversary = AgentBody(
        x=ax, y=ay,
        body_angle=global_angle(ax, ay, ball.x, ball.y),
        stamina=stamina[1],
    )
    return WorldState(dribbler=dribbler, adversary=adversary, ball=ball)


def check_termination(world: WorldState, field: FieldSpec,
                      params: PhysicsParams) -> Optional[EpisodeOutcome]:
    """Coach's per-step ruling; None while the episode continues.

    Precedence: adversary hold > left/top/bottom out > right-line > timeout.
    A ball past the right line with no possessor starts a run-out: the episode
    continues until the first player to reach the ball is declared winner.
    """
    steps = world.step_index
    if world.adversary_hold_streak >= 2:
        return EpisodeOutcome(Winner.ADVERSARY, Cause.ADVERSARY_HOLD, steps)
    ball = world.ball
    if ball.x < -field.half_width or abs(ball.y) > field.half_height:
        return EpisodeOutcome(Winner.ADVERSARY, Cause.LEFT_TOP_BOTTOM_OUT, steps)
    if ball.x > field.half_width:
        if has_possession(world.dribbler, ball, params):
            return EpisodeOutcome(Winner.DRIBBLER, Cause.RIGHT_LINE_DRIBBLER, steps)
        if has_possession(world.adversary, ball, params):
            return EpisodeOutcome(Winner.ADVERSARY, Cause.RIGHT_LINE_ADVERSARY, steps)
        # run-out: fall through (timeout still applies)
    if steps >= params.max_episode_steps:
        return EpisodeOutcome(Winner.ADVERSARY, Cause.TIMEOUT, steps)
    return None


STAMINA_RESTORE_PERIOD = 5  # episodes


def coach_maybe_restore_stamina(episode_index: int, dribbler: AgentBody,
                                adversary: AgentBody,
                                params: PhysicsParams) -> tuple[AgentBody, AgentBody]:
    """Restore both staminas after every fifth episode (1-based index)."""
    if episode_index % STAMINA_RESTORE_PERIOD == 0:
        return (replace(dribbler, stamina=params.stamina_max),
                replace(adversary, stamina=params.stamina_max))
    return dribbler, adversary


# ---------------------------------------------------------------------------
# Flat key=value configuration

def load_key_value_file(path) -> dict[str, str]:
    """Parse a flat key=value file; '#' starts a comment, blank lines ignored."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


_PHYSICS_FIELDS = {f: t for f, t in PhysicsParams.__annotations__.items()}


def physics_from_mapping(mapping: dict[str, str],
                         base: Optional[PhysicsParams] = None) -> PhysicsParams:
    params = base if base is not None else PhysicsParams()
    kwargs = {}
    for name in _PHYSICS_FIELDS:
        if name in mapping:
            conv = int if name == "max_episode_steps" else float
            kwargs[name] = conv(mapping[name])
    return replace(params, **kwargs) if kwargs else params


def field_from_mapping(mapping: dict[str, str],
                       base: Optional[FieldSpec] = None) -> FieldSpec:
    spec = base if base is not None else FieldSpec()
    kwargs = {}
    if "field_width" in mapping:
        kwargs["width"] = float(mapping["field_width"])
    if "field_height" in mapping:
        kwargs["height"] = float(mapping["field_height"])
    return replace(spec, **kwargs) if kwargs else spec
