"""Episodic SMDP Sarsa over a CMAC value function with epsilon-greedy selection."""
from __future__ import annotations

from dataclasses import dataclass

from .cmac import CmacNetwork
from .features import StateFeatures


@dataclass(slots=True)
class SarsaParams:
    epsilon: float = 0.01
    alpha: float = 0.125
    discount: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")
        if self.alpha < 0.0:
            raise ValueError("alpha must be >= 0")
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError("discount must be in [0, 1]")


class SarsaLearner:
    """Start / step / end routines for one training or evaluation run.

    Weights are updated by the plain delta rule: every receptive field excited
    at the previous decision point moves by alpha * td_error.  With alpha = 0
    the network is never touched, so a loaded snapshot stays frozen.
    """

    def __init__(self, net: CmacNetwork, params: SarsaParams, rng):
        self.net = net
        self.params = params
        self.rng = rng
        self.last_action: int | None = None
        self.last_excited = None
        self.q_last = 0.0
        self.last_delta = 0.0
        self.active = False

    def _select(self, q_values: list[float]) -> int:
        eps = self.params.epsilon
        if eps > 0.0 and self.rng.random() < eps:
            return self.rng.randrange(self.net.num_actions)
        best = 0
        best_q = q_values[0]
        for i in range(1, len(q_values)):
            if q_values[i] > best_q:  # ties break toward the lowest index
                best = i
                best_q = q_values[i]
        return best

    def start_episode(self, s: StateFeatures) -> int:
        excited = self.net.excite_all(s)
        q_values = [self.net.q_for(ex) for ex in excited]
        action = self._select(q_values)
        self.last_action = action
        self.last_excited = excited[action]
        self.q_last = q_values[action]
        self.active = True
        return action

    def step(self, s: StateFeatures, reward: float = 0.0) -> int:
        """One SMDP decision: TD error for the previous step, new action."""
        assert self.active, "step before start_episode"
        delta = reward - self.q_last
        excited = self.net.excite_all(s)
        q_values = [self.net.q_for(ex) for ex in excited]
        action = self._select(q_values)
        delta += self.params.discount * q_values[action]
        alpha = self.params.alpha
        if alpha != 0.0:
            self.net.apply_delta(self.last_excited, alpha, delta)
        # the update may have shifted the new state's value; use the fresh sum
        self.q_last = self.net.q_for(excited[action])
        self.last_action = action
        self.last_excited = excited[action]
        self.last_delta = delta
        return action

    def end_episode(self, dribbler_won: bool) -> None:
        assert self.active, "end_episode before start_episode"
        reward = 1.0 if dribbler_won else -1.0
        delta = reward - self.q_last  # terminal value is defined to be 0
        alpha = self.params.alpha
        if alpha != 0.0:
            self.net.apply_delta(self.last_excited, alpha, delta)
        self.last_delta = delta
        self.last_action = None
        self.last_excited = None
        self.q_last = 0.0
        self.active = False
