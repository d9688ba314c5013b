"""Command-line entry point: `dribblesim train` and `dribblesim eval`."""
from __future__ import annotations

import argparse
import sys

from . import env, harness
from .learner import SarsaParams

_EXPERIMENT_KEYS = {"episodes": int, "runs": int, "seed": int,
                    "histogram_bin": int, "workers": int, "cmac_mode": str}
_SARSA_KEYS = {"epsilon": float, "alpha": float, "discount": float}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="flat key=value config file; flags override it")
    parser.add_argument("--episodes", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--cmac-mode", choices=("multidim", "onedim"), dest="cmac_mode")
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--discount", type=float)
    parser.add_argument("--field-width", type=float, dest="field_width")
    parser.add_argument("--field-height", type=float, dest="field_height")
    parser.add_argument("--noise", type=float, dest="action_noise_level",
                        help="action noise level (default 0.05)")
    parser.add_argument("--max-episode-steps", type=int, dest="max_episode_steps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dribblesim",
        description="Soccer-dribbling workbench: Sarsa + CMAC on a 2D micro-simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run training and write logs/snapshots")
    _add_common(train)
    train.add_argument("--runs", type=int)
    train.add_argument("--histogram-bin", type=int, dest="histogram_bin")
    train.add_argument("--workers", type=int)
    train.add_argument("--snapshot", metavar="PATH",
                       help="weight snapshot path (per-run suffix added)")
    train.add_argument("--log", metavar="PATH", help="episode CSV path")
    train.add_argument("--histogram", metavar="PATH", help="histogram CSV path")

    evl = sub.add_parser("eval", help="evaluate a snapshot on random configurations")
    _add_common(evl)
    evl.add_argument("--snapshot", metavar="PATH", help="weight snapshot to load")
    evl.add_argument("--random-policy", action="store_true",
                     help="ignore weights and act uniformly at random")
    evl.add_argument("--report", metavar="PATH", help="write the report here too")
    return parser


def _build_config(args: argparse.Namespace) -> harness.ExperimentConfig:
    file_map: dict[str, str] = {}
    if args.config:
        file_map = env.load_key_value_file(args.config)

    physics = env.physics_from_mapping(file_map)
    field = env.field_from_mapping(file_map)
    sarsa_kwargs = {k: conv(file_map[k]) for k, conv in _SARSA_KEYS.items()
                    if k in file_map}
    exp_kwargs = {k: conv(file_map[k]) for k, conv in _EXPERIMENT_KEYS.items()
                  if k in file_map}

    # command-line flags override the config file
    overrides = vars(args)
    for name in env._PHYSICS_FIELDS:
        if overrides.get(name) is not None:
            physics = env.physics_from_mapping({name: str(overrides[name])}, physics)
    if overrides.get("field_width") is not None:
        field = env.field_from_mapping({"field_width": str(args.field_width)}, field)
    if overrides.get("field_height") is not None:
        field = env.field_from_mapping({"field_height": str(args.field_height)}, field)
    for k in _SARSA_KEYS:
        if overrides.get(k) is not None:
            sarsa_kwargs[k] = overrides[k]
    for k in _EXPERIMENT_KEYS:
        if overrides.get(k) is not None:
            exp_kwargs[k] = overrides[k]

    return harness.ExperimentConfig(
        mode=args.command,
        field=field,
        physics=physics,
        sarsa=SarsaParams(**sarsa_kwargs),
        snapshot_path=overrides.get("snapshot"),
        log_path=overrides.get("log"),
        histogram_path=overrides.get("histogram"),
        random_policy=bool(overrides.get("random_policy")),
        **exp_kwargs,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _build_config(args)
        if args.command == "train":
            result = harness.train(config)
            total = sum(result.wins_per_run)
            episodes = config.episodes * config.runs
            print(f"trained {config.runs} run(s) x {config.episodes} episodes; "
                  f"dribbler won {total}/{episodes} "
                  f"({total / max(1, episodes):.1%})")
            for run, path in enumerate(result.snapshot_paths):
                print(f"run {run}: wins {result.wins_per_run[run]}, snapshot {path}")
        else:
            report = harness.evaluate(config, snapshot=args.snapshot)
            text = report.to_text()
            sys.stdout.write(text)
            if args.report:
                with open(args.report, "w", encoding="utf-8") as fh:
                    fh.write(text)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"dribblesim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
