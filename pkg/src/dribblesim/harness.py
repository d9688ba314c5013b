"""Experiment driver: training runs, frozen-weight evaluation, seeding,
CSV logs, win histograms, and weight snapshots."""
from __future__ import annotations

import csv
import hashlib
import os
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import adversary, env
from .cmac import CmacNetwork, TilingSpec, load_weights, save_weights
from .env import (EpisodeOutcome, FieldSpec, PhysicsParams, Winner, WorldState,
                  check_termination, coach_maybe_restore_stamina, reset_episode)
from .features import extract_features
from .learner import SarsaLearner, SarsaParams
from .skills import ACTION_SET, MacroRunner

TRAIN = "train"
EVAL = "eval"

LOG_HEADER = ("run", "episode", "winner", "cause", "smdp_steps", "sim_steps")


class ModeMismatch(Exception):
    """Snapshot CMAC layout does not match the configured one."""


@dataclass(slots=True)
class EpisodeRecord:
    run: int
    episode: int
    winner: str
    cause: str
    smdp_steps: int
    sim_steps: int


@dataclass
class ExperimentConfig:
    mode: str = TRAIN
    episodes: int = 1000
    runs: int = 1
    seed: int = 0
    cmac_mode: str = "multidim"
    field: FieldSpec = dc_field(default_factory=FieldSpec)
    physics: PhysicsParams = dc_field(default_factory=PhysicsParams)
    sarsa: SarsaParams = dc_field(default_factory=SarsaParams)
    histogram_bin: int = 500
    snapshot_path: str | None = None
    log_path: str | None = None
    histogram_path: str | None = None
    workers: int = 1
    random_policy: bool = False  # eval only: ignore weights, act uniformly

    def __post_init__(self):
        if self.mode == TRAIN and self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.episodes < 0:
            raise ValueError("episodes must be >= 0")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.histogram_bin < 1:
            raise ValueError("histogram_bin must be >= 1")

    def tiling(self) -> TilingSpec:
        return TilingSpec(mode=self.cmac_mode)


@dataclass(slots=True)
class EvalReport:
    episodes: int
    wins: int
    losses_by_cause: dict
    success_rate: float | None  # None when no episodes were played
    config_digest: str          # sha256 over the initial configurations

    def to_text(self) -> str:
        lines = [
            f"episodes {self.episodes}",
            f"wins {self.wins}",
        ]
        for cause, count in sorted(self.losses_by_cause.items()):
            lines.append(f"losses[{cause}] {count}")
        if self.success_rate is None:
            lines.append("success_rate undefined (no episodes)")
        else:
            lines.append(f"success_rate {self.success_rate:.4f}")
        lines.append(f"config_digest {self.config_digest}")
        return "\n".join(lines) + "\n"


def derive_rng(*key: int) -> random.Random:
    """Stable per-(seed, run, episode, stream) generator."""
    state = np.random.SeedSequence(list(key)).generate_state(2, np.uint64)
    return random.Random(int(state[0]) << 64 | int(state[1]))


def run_episode(world: WorldState, learner: SarsaLearner, rng,
                field: FieldSpec, physics: PhysicsParams
                ) -> tuple[WorldState, EpisodeOutcome, int]:
    """Play one episode to termination; returns final world, outcome, SMDP steps."""
    s = extract_features(world, field)
    action = learner.start_episode(s)
    runner = MacroRunner(ACTION_SET[action])
    smdp_steps = 1
    while True:
        dcmd = runner.command(world, physics)
        acmd = adversary.decide(world, physics)
        world = env.advance(world, dcmd, acmd, rng, physics)
        outcome = check_termination(world, field, physics)
        if outcome is not None:
            learner.end_episode(outcome.winner is Winner.DRIBBLER)
            return world, outcome, smdp_steps
        if runner.finished(world, physics):
            s = extract_features(world, field)
            action = learner.step(s, 0.0)
            runner = MacroRunner(ACTION_SET[action])
            smdp_steps += 1


def train_single_run(config: ExperimentConfig, run: int
                     ) -> tuple[list[EpisodeRecord], CmacNetwork]:
    physics = config.physics
    net = CmacNetwork(config.tiling(), num_actions=len(ACTION_SET))
    learner = SarsaLearner(net, config.sarsa, rng=None)
    stamina = (physics.stamina_max, physics.stamina_max)
    records: list[EpisodeRecord] = []
    for episode in range(1, config.episodes + 1):
        reset_rng = derive_rng(config.seed, run, episode, 0)
        learner.rng = sim_rng = derive_rng(config.seed, run, episode, 1)
        world = reset_episode(reset_rng, config.field, physics, stamina=stamina)
        world, outcome, smdp_steps = run_episode(world, learner, sim_rng,
                                                 config.field, physics)
        dribbler, adv = coach_maybe_restore_stamina(
            episode, world.dribbler, world.adversary, physics)
        stamina = (dribbler.stamina, adv.stamina)
        records.append(EpisodeRecord(run, episode, outcome.winner.value,
                                     outcome.cause.value, smdp_steps, outcome.steps))
    return records, net


def snapshot_path_for_run(path: str, run: int) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}.run{run}{ext}"


def _check_writable(path: str | None) -> None:
    if path is None:
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {path!r}")


@dataclass(slots=True)
class TrainResult:
    records: list[EpisodeRecord]
    histogram: list[tuple[int, float]]
    snapshot_paths: list[str]
    wins_per_run: list[int]


def train(config: ExperimentConfig) -> TrainResult:
    """Run all training runs, then write the episode log, per-run snapshots,
    and the run-averaged win histogram."""
    # fail fast before any simulation
    _check_writable(config.log_path)
    _check_writable(config.histogram_path)
    if config.snapshot_path is not None:
        _check_writable(snapshot_path_for_run(config.snapshot_path, 0))

    run_ids = list(range(config.runs))
    if config.workers > 1 and config.runs > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_train_run_star, [(config, r) for r in run_ids]))
    else:
        results = [train_single_run(config, r) for r in run_ids]

    records: list[EpisodeRecord] = []
    snapshot_paths: list[str] = []
    wins_per_run: list[int] = []
    for run, (run_records, net) in zip(run_ids, results):
        records.extend(run_records)
        wins_per_run.append(sum(1 for rec in run_records
                                if rec.winner == Winner.DRIBBLER.value))
        if config.snapshot_path is not None:
            path = snapshot_path_for_run(config.snapshot_path, run)
            save_weights(net, path)
            snapshot_paths.append(path)

    histogram = emit_histogram(records, config.histogram_bin)
    if config.log_path is not None:
        write_episode_log(records, config.log_path)
    if config.histogram_path is not None:
        write_histogram(histogram, config.histogram_path)
    return TrainResult(records, histogram, snapshot_paths, wins_per_run)


def _train_run_star(args):
    return train_single_run(*args)


def emit_histogram(records: list[EpisodeRecord], bin_size: int
                   ) -> list[tuple[int, float]]:
    """Dribbler wins per consecutive episode bin, averaged across runs."""
    if bin_size < 1:
        raise ValueError("bin size must be >= 1")
    if not records:
        return []
    runs = sorted({rec.run for rec in records})
    max_episode = max(rec.episode for rec in records)
    num_bins = (max_episode + bin_size - 1) // bin_size
    wins = {run: [0] * num_bins for run in runs}
    for rec in records:
        if rec.winner == Winner.DRIBBLER.value:
            wins[rec.run][(rec.episode - 1) // bin_size] += 1
    table = []
    for b in range(num_bins):
        avg = sum(wins[run][b] for run in runs) / len(runs)
        table.append((b * bin_size + 1, avg))
    return table


def write_episode_log(records: list[EpisodeRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOG_HEADER)
        for rec in records:
            writer.writerow((rec.run, rec.episode, rec.winner, rec.cause,
                             rec.smdp_steps, rec.sim_steps))


def write_histogram(table: list[tuple[int, float]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("bin_start", "avg_wins"))
        for bin_start, avg_wins in table:
            writer.writerow((bin_start, repr(avg_wins)))


def _world_digest_update(digest, world: WorldState) -> None:
    parts = (world.dribbler.x, world.dribbler.y, world.dribbler.body_angle,
             world.adversary.x, world.adversary.y, world.adversary.body_angle,
             world.ball.x, world.ball.y)
    digest.update(";".join(f"{p:.17g}" for p in parts).encode("ascii"))


def evaluate(config: ExperimentConfig, snapshot: str | None = None) -> EvalReport:
    """Replay random initial configurations with frozen weights (alpha = 0).

    The configuration stream depends only on the eval seed, so two
    evaluations with the same seed see identical initial configurations
    regardless of the CMAC layout under test (paired comparison).  With
    random_policy=True the weights are ignored and actions drawn uniformly.
    """
    if config.random_policy:
        net = CmacNetwork(config.tiling(), num_actions=len(ACTION_SET))
        frozen = SarsaParams(epsilon=1.0, alpha=0.0, discount=config.sarsa.discount)
    else:
        if snapshot is None:
            raise ValueError("evaluate requires a snapshot unless random_policy is set")
        net = load_weights(snapshot)
        if net.spec.mode != config.cmac_mode:
            raise ModeMismatch(
                f"snapshot is {net.spec.mode!r}, configured {config.cmac_mode!r}")
        frozen = SarsaParams(epsilon=0.0, alpha=0.0, discount=config.sarsa.discount)

    physics = config.physics
    learner = SarsaLearner(net, frozen, rng=None)
    digest = hashlib.sha256()
    wins = 0
    losses: Counter = Counter()
    stamina = (physics.stamina_max, physics.stamina_max)
    for episode in range(1, config.episodes + 1):
        reset_rng = derive_rng(config.seed, episode, 0)
        learner.rng = sim_rng = derive_rng(config.seed, episode, 1)
        world = reset_episode(reset_rng, config.field, physics, stamina=stamina)
        _world_digest_update(digest, world)
        world, outcome, _ = run_episode(world, learner, sim_rng,
                                        config.field, physics)
        if outcome.winner is Winner.DRIBBLER:
            wins += 1
        else:
            losses[outcome.cause.value] += 1
        dribbler, adv = coach_maybe_restore_stamina(
            episode, world.dribbler, world.adversary, physics)
        stamina = (dribbler.stamina, adv.stamina)
    rate = wins / config.episodes if config.episodes > 0 else None
    return EvalReport(config.episodes, wins, dict(losses), rate, digest.hexdigest())
