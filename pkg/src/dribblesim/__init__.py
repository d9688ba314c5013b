"""dribblesim: a 2D soccer-dribbling workbench.

A seedable micro-simulator of the dribbling duel (learning dribbler vs a
fixed interceptor), linear gradient-descent Sarsa with CMAC tile coding,
and an experiment harness for training, evaluation, and the multi- vs
one-dimensional tiling comparison.
"""

from .cmac import CmacNetwork, TilingSpec, load_weights, save_weights
from .env import FieldSpec, PhysicsParams, WorldState
from .features import StateFeatures, extract_features
from .harness import ExperimentConfig, evaluate, train
from .learner import SarsaLearner, SarsaParams
from .skills import ACTION_SET, MacroAction

__all__ = [
    "ACTION_SET",
    "CmacNetwork",
    "ExperimentConfig",
    "FieldSpec",
    "MacroAction",
    "PhysicsParams",
    "SarsaLearner",
    "SarsaParams",
    "StateFeatures",
    "TilingSpec",
    "WorldState",
    "evaluate",
    "extract_features",
    "load_weights",
    "save_weights",
    "train",
]

__version__ = "0.1.0"
