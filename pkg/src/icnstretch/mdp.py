"""Interest forwarding as a Markov decision process.

The state is the router currently holding the interest. Action k (1-based)
forwards to the k-th neighbor in ascending id order. Reaching a router whose
content store holds the requested name ends the episode with ``r_goal``;
running out of hop budget ends it with ``r_fail``; every other hop costs
``r_step``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from icnstretch.errors import ConfigError, EpisodeFinished, InvalidAction, NonPositiveArgument
from icnstretch.icn import DEFAULT_CATALOG, ContentName, InterestPacket, Network
from icnstretch.topology import RouterId, Topology, hops_to_nearest

DEFAULT_NUM_ACTIONS = 5

State = RouterId
Action = int


@dataclass(frozen=True)
class RewardConfig:
    r_step: float = -1.0
    r_goal: float = 100.0
    r_fail: float = -100.0

    def __post_init__(self):
        if not self.r_goal > 0 > self.r_step >= self.r_fail:
            raise ConfigError(
                f"rewards must satisfy r_goal > 0 > r_step >= r_fail, got "
                f"r_goal={self.r_goal}, r_step={self.r_step}, r_fail={self.r_fail}"
            )

    def scaled(self, factor: float) -> "RewardConfig":
        return RewardConfig(self.r_step * factor, self.r_goal * factor, self.r_fail * factor)


@dataclass(frozen=True)
class Transition:
    state: State
    action: Action
    reward: float
    next_state: State
    terminal: bool


def stretch_from_reward(reward: float) -> float:
    if not reward > 0:
        raise NonPositiveArgument(f"reward must be positive, got {reward}")
    return 1.0 / reward


def reward_from_stretch(stretch: float) -> float:
    if not stretch > 0:
        raise NonPositiveArgument(f"stretch must be positive, got {stretch}")
    return 1.0 / stretch


class StretchEnv:
    """One consumer requesting one content name over a router mesh."""

    def __init__(
        self,
        topology: Topology,
        consumer: RouterId = 9,
        producer: RouterId = 1,
        requested: ContentName = "c1",
        catalog: Iterable[ContentName] = DEFAULT_CATALOG,
        rewards: RewardConfig = RewardConfig(),
        hop_budget: Optional[int] = None,
        on_path_caching: bool = False,
        num_actions: Optional[int] = None,
    ):
        for role, r in (("consumer", consumer), ("producer", producer)):
            if not isinstance(r, int) or not 1 <= r <= topology.n:
                raise ConfigError(f"{role} router {r} outside 1..{topology.n}")
        if consumer == producer:
            raise ConfigError(f"consumer and producer are both router {consumer}")
        if num_actions is None:
            num_actions = max(DEFAULT_NUM_ACTIONS, topology.max_degree)
        elif num_actions < topology.max_degree:
            raise ConfigError(
                f"action space of {num_actions} cannot address all {topology.max_degree} "
                f"neighbors of the busiest router"
            )
        if hop_budget is None:
            hop_budget = 2 * topology.n
        if hop_budget < 1:
            raise ConfigError(f"hop budget must be >= 1, got {hop_budget}")

        self.topology = topology
        self.consumer = consumer
        self.producer = producer
        self.requested = requested
        self.rewards = rewards
        self.hop_budget = hop_budget
        self.num_actions = num_actions
        try:
            self.network = Network(topology, catalog, on_path_caching=on_path_caching)
            self.network.place_content(requested, producer)
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

        self.packet: Optional[InterestPacket] = None
        self._done = True
        self.last_data = None

    @property
    def n_states(self) -> int:
        return self.topology.n

    @property
    def state(self) -> State:
        if self.packet is None:
            raise EpisodeFinished("environment has not been reset")
        return self.packet.current

    def reset(self) -> State:
        self.network.clear_pit()
        self.packet = self.network.new_interest(self.requested, self.consumer, self.hop_budget)
        self.last_data = None
        # only possible once on-path caching has copied the content to the consumer's router
        self._done = self.network.cs_hit(self.consumer, self.requested)
        if self._done:
            self.last_data, _ = self.network.satisfy_and_return(self.packet)
        return self.consumer

    def valid_actions(self, s: State) -> list[bool]:
        degree = len(self.topology.neighbors(s))
        return [k < degree for k in range(self.num_actions)]

    def next_router(self, s: State, a: Action) -> RouterId:
        nbrs = self.topology.neighbors(s)
        if not isinstance(a, int) or not 1 <= a <= len(nbrs):
            raise InvalidAction(f"action {a} is not valid at router {s} (degree {len(nbrs)})")
        return nbrs[a - 1]

    def is_goal(self, r: RouterId) -> bool:
        return self.network.cs_hit(r, self.requested)

    def step(self, a: Action) -> Transition:
        if self._done:
            raise EpisodeFinished("episode is over; call reset()")
        s = self.packet.current
        nxt = self.next_router(s, a)
        self.network.forward_interest(self.packet, nxt)
        if self.is_goal(nxt):
            self.last_data, _ = self.network.satisfy_and_return(self.packet)
            reward, terminal = self.rewards.r_goal, True
        elif self.packet.hops >= self.hop_budget:
            reward, terminal = self.rewards.r_fail, True
        else:
            reward, terminal = self.rewards.r_step, False
        self._done = terminal
        return Transition(s, a, reward, nxt, terminal)

    def is_terminal(self) -> bool:
        return self._done

    @property
    def hops(self) -> int:
        return 0 if self.packet is None else self.packet.hops

    def oracle_stretch(self) -> int:
        """Exact minimum hop count from the consumer to any router caching the content."""
        return hops_to_nearest(self.topology, self.consumer, self.network.holders(self.requested))
