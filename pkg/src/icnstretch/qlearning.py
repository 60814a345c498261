"""Tabular Q-learning over the forwarding MDP."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from icnstretch.errors import ConfigError, InvalidAction, NoValidAction
from icnstretch.mdp import Action, State, StretchEnv, Transition
from icnstretch.topology import PathTrace

INF_STRETCH = math.inf
DEFAULT_WINDOW = 25


@dataclass(frozen=True)
class Hyperparams:
    alpha: float = 0.5
    gamma: float = 0.5
    epsilon: float = 0.5

    def __post_init__(self):
        # alpha = 0 is accepted so a frozen table can be exercised; training configs require alpha > 0
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError(f"gamma must lie in [0, 1), got {self.gamma}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must lie in [0, 1], got {self.epsilon}")


class QTable:
    """State x action values with a validity mask.

    Rows are router ids 1..n, columns are actions 1..K. Invalid cells hold
    no value and are skipped by every max/argmax.
    """

    def __init__(self, validity: Sequence[Sequence[bool]]):
        self.n_states = len(validity)
        self.num_actions = len(validity[0]) if validity else 0
        self._valid = [[k for k, ok in enumerate(row) if ok] for row in validity]
        self._q = [[0.0] * self.num_actions for _ in range(self.n_states)]

    @classmethod
    def for_env(cls, env: StretchEnv) -> "QTable":
        return cls([env.valid_actions(s) for s in env.topology.routers])

    def _row(self, s: State) -> list[float]:
        if not isinstance(s, int) or not 1 <= s <= self.n_states:
            raise InvalidAction(f"state {s} outside 1..{self.n_states}")
        return self._q[s - 1]

    def is_valid(self, s: State, a: Action) -> bool:
        return 1 <= s <= self.n_states and (a - 1) in self._valid[s - 1]

    def valid_actions(self, s: State) -> list[Action]:
        return [k + 1 for k in self._valid[s - 1]]

    def get(self, s: State, a: Action) -> float:
        if not self.is_valid(s, a):
            raise InvalidAction(f"action {a} is not valid in state {s}")
        return self._q[s - 1][a - 1]

    def set(self, s: State, a: Action, value: float) -> None:
        if not self.is_valid(s, a):
            raise InvalidAction(f"action {a} is not valid in state {s}")
        self._q[s - 1][a - 1] = float(value)

    def max_value(self, s: State) -> float:
        row = self._row(s)
        return max(row[k] for k in self._valid[s - 1])

    def argmax(self, s: State) -> Action:
        """Best valid action, lowest index on ties."""
        row = self._row(s)
        valid = self._valid[s - 1]
        if not valid:
            raise NoValidAction(f"state {s} has no valid action")
        best = valid[0]
        for k in valid[1:]:
            if row[k] > row[best]:
                best = k
        return best + 1

    @property
    def values(self) -> np.ndarray:
        out = np.array(self._q, dtype=float)
        out[~self.validity] = np.nan
        return out

    @property
    def validity(self) -> np.ndarray:
        mask = np.zeros((self.n_states, self.num_actions), dtype=bool)
        for s, valid in enumerate(self._valid):
            mask[s, valid] = True
        return mask

    def to_json_dict(self) -> dict[str, list]:
        out = {}
        for s in range(self.n_states):
            valid = set(self._valid[s])
            out[str(s + 1)] = [self._q[s][k] if k in valid else None for k in range(self.num_actions)]
        return out

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")


@dataclass(frozen=True)
class PolicySnapshot:
    actions: tuple[Action, ...]  # actions[s - 1] is the choice at router s

    def __getitem__(self, s: State) -> Action:
        return self.actions[s - 1]


@dataclass(frozen=True)
class LoopFailure:
    """Greedy rollout that ran out of steps without reaching the content."""

    trace: PathTrace

    @property
    def stretch(self) -> float:
        return INF_STRETCH


def select_action(q: QTable, s: State, hp: Hyperparams, rng: random.Random) -> Action:
    """Epsilon-greedy choice among the valid actions of ``s``."""
    valid = q._valid[s - 1]
    if not valid:
        raise NoValidAction(f"state {s} has no valid action")
    if rng.random() < hp.epsilon:
        return valid[rng.randrange(len(valid))] + 1
    return q.argmax(s)


def update(q: QTable, t: Transition, hp: Hyperparams) -> QTable:
    """One Q-learning backup on the (state, action) cell of ``t``.

    Q <- (1 - alpha) Q + alpha (reward + gamma * best next value), with the
    bootstrap term taken as 0 on terminal transitions. Written in the
    incremental form so alpha = 0 and exact fixed points leave Q untouched.
    """
    if not q.is_valid(t.state, t.action):
        raise InvalidAction(f"action {t.action} is not valid in state {t.state}")
    best_next = 0.0 if t.terminal else q.max_value(t.next_state)
    target = t.reward + hp.gamma * best_next
    row = q._q[t.state - 1]
    k = t.action - 1
    row[k] += hp.alpha * (target - row[k])
    return q


def greedy_policy(q: QTable) -> PolicySnapshot:
    return PolicySnapshot(tuple(q.argmax(s) for s in range(1, q.n_states + 1)))


def greedy_path(policy: Union[PolicySnapshot, QTable], env: StretchEnv) -> Union[PathTrace, LoopFailure]:
    """Follow the greedy policy from the consumer without touching network state.

    Gives up with a LoopFailure after n hops without a content store hit.
    """
    if isinstance(policy, QTable):
        policy = greedy_policy(policy)
    r = env.consumer
    trace = [r]
    for _ in range(env.topology.n):
        if env.is_goal(r):
            return PathTrace(tuple(trace))
        r = env.next_router(r, policy[r])
        trace.append(r)
    if env.is_goal(r):
        return PathTrace(tuple(trace))
    return LoopFailure(PathTrace(tuple(trace)))


def has_converged(history: Sequence[float], window: int, oracle_stretch: float) -> bool:
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if len(history) < window:
        return False
    return all(h == oracle_stretch for h in history[-window:])
