"""Simulator primitives: angles, kinematics, possession, episode rules."""
import math
import random

import pytest

from dribblesim import env
from dribblesim.env import (
    AgentBody, BallState, Cause, FieldSpec, Kick, KickWithoutPossession,
    PhysicsParams, PlaceBall, Winner, WorldState, advance, angle_diff,
    apply_dash, apply_kick, apply_turn, check_termination,
    coach_maybe_restore_stamina, global_angle, has_possession, normalize_angle,
    reset_episode, step_ball,
)

QUIET = PhysicsParams(action_noise_level=0.0)


def make_world(dx=0.0, dy=0.0, ax=5.0, ay=5.0, bx=0.5, by=0.0, **kw):
    return WorldState(
        dribbler=AgentBody(x=dx, y=dy),
        adversary=AgentBody(x=ax, y=ay),
        ball=BallState(x=bx, y=by),
        **kw,
    )


# ---------------------------------------------------------------------------
# angles

def test_normalize_angle_wraps_into_range():
    assert normalize_angle(0.0) == 0.0
    assert normalize_angle(360.0) == 0.0
    assert normalize_angle(-90.0) == 270.0
    assert normalize_angle(725.0) == pytest.approx(5.0)


def test_angle_diff_is_signed_and_shortest():
    assert angle_diff(10.0, 350.0) == pytest.approx(20.0)
    assert angle_diff(350.0, 10.0) == pytest.approx(-20.0)
    assert angle_diff(180.0, 0.0) == pytest.approx(180.0)  # half turn maps to +180
    assert angle_diff(90.0, 90.0) == 0.0


def test_global_angle_follows_clockwise_convention():
    # y grows toward the bottom line, so "down" is +90
    assert global_angle(0, 0, 1, 0) == pytest.approx(0.0)
    assert global_angle(0, 0, 0, 1) == pytest.approx(90.0)
    assert global_angle(0, 0, -1, 0) == pytest.approx(180.0)
    assert global_angle(0, 0, 0, -1) == pytest.approx(270.0)


# ---------------------------------------------------------------------------
# field / params validation

def test_field_spec_geometry():
    field = FieldSpec()
    assert field.width == 20.0 and field.height == 20.0
    assert field.half_width == 10.0
    assert field.diagonal == pytest.approx(math.hypot(20.0, 20.0))


def test_field_spec_rejects_nonpositive_dimensions():
    with pytest.raises(ValueError):
        FieldSpec(width=0.0)
    with pytest.raises(ValueError):
        FieldSpec(height=-1.0)


def test_physics_defaults_match_contract():
    p = PhysicsParams()
    assert p.ball_decay == 0.94
    assert p.player_decay == 0.4
    assert p.player_max_speed == 1.05
    assert p.kick_power_rate == 0.027
    assert p.dash_power_rate == 0.006
    assert p.kickable_distance == 1.085
    assert p.action_noise_level == 0.05
    assert p.stamina_max == 4000.0
    assert p.max_episode_steps == 1000


def test_physics_rejects_bad_decay():
    with pytest.raises(ValueError):
        PhysicsParams(ball_decay=0.0)
    with pytest.raises(ValueError):
        PhysicsParams(player_decay=1.5)


# ---------------------------------------------------------------------------
# possession

def test_possession_boundary_is_strict():
    params = PhysicsParams()
    agent = AgentBody(x=0.0, y=0.0)
    assert has_possession(agent, BallState(x=1.084, y=0.0), params)
    assert not has_possession(agent, BallState(x=1.085, y=0.0), params)
    assert not has_possession(agent, BallState(x=1.086, y=0.0), params)


# ---------------------------------------------------------------------------
# turn / dash / kick

def test_turn_adds_relative_angle_and_clamps():
    agent = AgentBody(x=0, y=0, body_angle=10.0)
    assert apply_turn(agent, 30.0).body_angle == pytest.approx(40.0)
    assert apply_turn(agent, -30.0).body_angle == pytest.approx(340.0)
    # moments beyond half a turn are clamped, not wrapped
    assert apply_turn(agent, 500.0).body_angle == pytest.approx(190.0)
    assert apply_turn(agent, -500.0).body_angle == pytest.approx(190.0)


def test_turn_leaves_position_and_velocity():
    agent = AgentBody(x=1.0, y=2.0, vx=0.3, vy=-0.1)
    turned = apply_turn(agent, 90.0)
    assert (turned.x, turned.y, turned.vx, turned.vy) == (1.0, 2.0, 0.3, -0.1)


def test_dash_accelerates_along_body_and_decays():
    rng = random.Random(0)
    agent = AgentBody(x=0, y=0, body_angle=0.0)
    dashed = apply_dash(agent, 100.0, rng, QUIET)
    # velocity = 100 * 0.006 = 0.6; position moves by the new velocity
    assert dashed.x == pytest.approx(0.6)
    assert dashed.y == pytest.approx(0.0)
    assert dashed.vx == pytest.approx(0.6 * QUIET.player_decay)
    assert dashed.stamina == pytest.approx(4000.0 - 100.0)


def test_dash_speed_converges_to_sustained_value():
    # fixed point of v' = (v + 0.6) * 0.4 applied before the move is 1.0
    rng = random.Random(0)
    agent = AgentBody(x=0, y=0, body_angle=0.0)
    for _ in range(30):
        agent = apply_dash(agent, 100.0, rng, QUIET)
    step = agent.vx / QUIET.player_decay  # displacement of the last step
    assert step == pytest.approx(1.0, abs=1e-9)


def test_dash_clamps_power_and_respects_stamina():
    rng = random.Random(0)
    weak = AgentBody(x=0, y=0, stamina=40.0)
    dashed = apply_dash(weak, 100.0, rng, QUIET)
    assert dashed.x == pytest.approx(40.0 * 0.006)
    assert dashed.stamina == 0.0
    drained = apply_dash(dashed, 100.0, rng, QUIET)  # no stamina: pure coast
    assert drained.stamina == 0.0
    assert drained.x - dashed.x == pytest.approx(dashed.vx)


def test_dash_caps_player_speed():
    rng = random.Random(0)
    agent = AgentBody(x=0, y=0, vx=1.0, vy=0.0, body_angle=0.0)
    dashed = apply_dash(agent, 100.0, rng, QUIET)
    assert math.hypot(dashed.x, dashed.y) <= QUIET.player_max_speed + 1e-12


def test_dash_noise_scales_acceleration():
    # with nu = 0.05 the acceleration factor lies in [0.95, 1.05]
    params = PhysicsParams()
    for seed in range(20):
        dashed = apply_dash(AgentBody(x=0, y=0), 100.0, random.Random(seed), params)
        assert 0.6 * 0.95 - 1e-12 <= dashed.x <= 0.6 * 1.05 + 1e-12


def test_kick_sets_ball_velocity():
    world = make_world()
    rng = random.Random(0)
    kicked = apply_kick(world, "dribbler", 100.0, 0.0, rng, QUIET)
    assert kicked.ball.vx == pytest.approx(100.0 * 0.027)
    assert kicked.ball.vy == pytest.approx(0.0)
    # set-velocity semantics: a second kick replaces, not adds
    again = apply_kick(kicked, "dribbler", 50.0, 180.0, rng, QUIET)
    assert again.ball.vx == pytest.approx(-50.0 * 0.027)


def test_kick_without_possession_raises():
    world = make_world(bx=3.0)
    with pytest.raises(KickWithoutPossession):
        apply_kick(world, "dribbler", 100.0, 0.0, random.Random(0), QUIET)


def test_kick_clamps_ball_speed():
    params = PhysicsParams(action_noise_level=0.0, ball_max_speed=1.5)
    world = make_world()
    kicked = apply_kick(world, "dribbler", 1e6, 0.0, random.Random(0), params)
    assert math.hypot(kicked.ball.vx, kicked.ball.vy) == pytest.approx(1.5)


def test_ball_rolls_and_decays_geometrically():
    ball = BallState(x=0.0, y=0.0, vx=1.0, vy=0.0)
    total = 0.0
    for _ in range(200):
        ball = step_ball(ball, QUIET)
    # total travel converges to v0 / (1 - decay)
    assert ball.x == pytest.approx(1.0 / (1.0 - 0.94), rel=1e-4)
    assert ball.vx < 1e-5


# ---------------------------------------------------------------------------
# advance

def test_advance_applies_commands_in_order_and_steps_ball():
    world = make_world()
    rng = random.Random(0)
    nxt = advance(world, Kick(100.0, 0.0), None, rng, QUIET)
    # the kicked ball moves in the same step
    assert nxt.ball.x == pytest.approx(0.5 + 2.7)
    assert nxt.step_index == 1


def test_advance_kick_without_possession_is_noop_for_ball():
    world = make_world(bx=5.0)
    nxt = advance(world, Kick(100.0, 0.0), None, random.Random(0), QUIET)
    assert nxt.ball.x == pytest.approx(5.0)


def test_place_ball_requires_possession():
    world = make_world()
    held = advance(world, PlaceBall(0.0, -0.7), None, random.Random(0), QUIET)
    assert (held.ball.x, held.ball.y) == (0.0, -0.7)
    far = make_world(bx=5.0)
    unchanged = advance(far, PlaceBall(0.0, -0.7), None, random.Random(0), QUIET)
    assert unchanged.ball.x == pytest.approx(5.0)


def test_advance_none_commands_only_roll_the_ball():
    world = make_world()
    world.ball.vx = 1.0
    nxt = advance(world, None, None, random.Random(0), QUIET)
    assert nxt.ball.x == pytest.approx(1.5)
    assert nxt.dribbler.x == 0.0 and nxt.adversary.x == 5.0


def test_player_collision_pushes_bodies_apart():
    world = make_world(dx=0.0, ax=0.3, ay=0.0, bx=-0.5)
    nxt = advance(world, None, None, random.Random(0), QUIET)
    d = math.hypot(nxt.adversary.x - nxt.dribbler.x, nxt.adversary.y - nxt.dribbler.y)
    assert d == pytest.approx(2.0 * QUIET.player_radius)
    # symmetric push along the joining line
    assert nxt.dribbler.x == pytest.approx(-0.15)
    assert nxt.adversary.x == pytest.approx(0.45)


def test_player_collision_leaves_separated_bodies_alone():
    world = make_world(dx=0.0, ax=0.7, ay=0.0, bx=-0.5)
    nxt = advance(world, None, None, random.Random(0), QUIET)
    assert nxt.dribbler.x == 0.0 and nxt.adversary.x == 0.7


# ---------------------------------------------------------------------------
# hold streak & termination

def test_adversary_hold_needs_two_consecutive_steps():
    field = FieldSpec()
    world = make_world(ax=5.0, ay=0.0, bx=4.5)  # adversary possesses
    first = advance(world, None, None, random.Random(0), QUIET)
    assert first.adversary_hold_streak == 1
    assert check_termination(first, field, QUIET) is None
    second = advance(first, None, None, random.Random(0), QUIET)
    assert second.adversary_hold_streak == 2
    outcome = check_termination(second, field, QUIET)
    assert outcome is not None
    assert outcome.winner is Winner.ADVERSARY
    assert outcome.cause is Cause.ADVERSARY_HOLD


def test_hold_streak_resets_when_possession_breaks():
    world = make_world(ax=5.0, ay=0.0, bx=4.5, adversary_hold_streak=1)
    world.ball.vx = 3.0  # ball rolls out of the adversary's reach
    nxt = advance(world, None, None, random.Random(0), QUIET)
    assert nxt.adversary_hold_streak == 0


def test_left_top_bottom_out_loses():
    field = FieldSpec()
    for bx, by in ((-10.5, 0.0), (0.0, 10.5), (0.0, -10.5)):
        world = make_world(bx=bx, by=by, step_index=3)
        outcome = check_termination(world, field, QUIET)
        assert outcome.winner is Winner.ADVERSARY
        assert outcome.cause is Cause.LEFT_TOP_BOTTOM_OUT


def test_right_line_with_dribbler_possession_wins():
    field = FieldSpec()
    world = make_world(dx=10.0, dy=0.0, bx=10.5, step_index=7)
    outcome = check_termination(world, field, QUIET)
    assert outcome.winner is Winner.DRIBBLER
    assert outcome.cause is Cause.RIGHT_LINE_DRIBBLER
    assert outcome.steps == 7


def test_right_line_with_adversary_possession_loses():
    field = FieldSpec()
    world = make_world(dx=0.0, ax=10.0, ay=0.0, bx=10.5)
    outcome = check_termination(world, field, QUIET)
    assert outcome.winner is Winner.ADVERSARY
    assert outcome.cause is Cause.RIGHT_LINE_ADVERSARY


def test_right_line_without_possession_is_a_runout():
    field = FieldSpec()
    world = make_world(dx=0.0, ax=0.0, ay=5.0, bx=10.5)
    assert check_termination(world, field, QUIET) is None


def test_timeout_goes_to_the_adversary():
    field = FieldSpec()
    world = make_world(step_index=QUIET.max_episode_steps)
    outcome = check_termination(world, field, QUIET)
    assert outcome.winner is Winner.ADVERSARY
    assert outcome.cause is Cause.TIMEOUT


def test_hold_takes_precedence_over_out_of_bounds():
    field = FieldSpec()
    world = make_world(ax=-10.2, ay=0.0, bx=-10.5, adversary_hold_streak=2)
    outcome = check_termination(world, field, QUIET)
    assert outcome.cause is Cause.ADVERSARY_HOLD


# ---------------------------------------------------------------------------
# coach

def test_reset_episode_layout():
    field = FieldSpec()
    world = reset_episode(random.Random(7), field, QUIET)
    assert world.dribbler.x == pytest.approx(-5.0)
    assert world.dribbler.y == 0.0
    assert world.ball.x == pytest.approx(-4.5)
    assert world.ball.y == 0.0
    assert world.step_index == 0
    d = math.hypot(world.adversary.x - world.ball.x, world.adversary.y - world.ball.y)
    assert d >= QUIET.kickable_distance + env.ADVERSARY_SPAWN_MARGIN
    # the adversary starts facing the ball
    facing = global_angle(world.adversary.x, world.adversary.y,
                          world.ball.x, world.ball.y)
    assert world.adversary.body_angle == pytest.approx(facing)


def test_reset_episode_spawn_respects_margin_over_many_draws():
    field = FieldSpec()
    min_dist = QUIET.kickable_distance + env.ADVERSARY_SPAWN_MARGIN
    for seed in range(200):
        world = reset_episode(random.Random(seed), field, QUIET)
        d = math.hypot(world.adversary.x - world.ball.x,
                       world.adversary.y - world.ball.y)
        assert d >= min_dist
        assert abs(world.adversary.x) <= field.half_width
        assert abs(world.adversary.y) <= field.half_height


def test_reset_episode_carries_stamina():
    world = reset_episode(random.Random(0), FieldSpec(), QUIET, stamina=(123.0, 45.0))
    assert world.dribbler.stamina == 123.0
    assert world.adversary.stamina == 45.0


def test_coach_restores_stamina_every_fifth_episode():
    params = PhysicsParams()
    tired_d = AgentBody(x=0, y=0, stamina=10.0)
    tired_a = AgentBody(x=1, y=1, stamina=20.0)
    for episode in (1, 2, 3, 4, 6, 9):
        d, a = coach_maybe_restore_stamina(episode, tired_d, tired_a, params)
        assert d.stamina == 10.0 and a.stamina == 20.0
    for episode in (5, 10, 100):
        d, a = coach_maybe_restore_stamina(episode, tired_d, tired_a, params)
        assert d.stamina == params.stamina_max
        assert a.stamina == params.stamina_max


# ---------------------------------------------------------------------------
# config parsing

def test_load_key_value_file(tmp_path):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("# comment\nball_decay = 0.9\n\nfield_width=30 # inline\n")
    mapping = env.load_key_value_file(str(cfg))
    assert mapping == {"ball_decay": "0.9", "field_width": "30"}


def test_load_key_value_file_rejects_garbage(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("just words\n")
    with pytest.raises(ValueError, match="key=value"):
        env.load_key_value_file(str(cfg))


def test_physics_and_field_from_mapping():
    physics = env.physics_from_mapping({"ball_decay": "0.9",
                                        "max_episode_steps": "50"})
    assert physics.ball_decay == 0.9
    assert physics.max_episode_steps == 50
    assert physics.player_decay == 0.4  # untouched default
    field = env.field_from_mapping({"field_width": "30"})
    assert field.width == 30.0 and field.height == 20.0
