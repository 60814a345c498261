"""Content store, pending interest table and forwarding base for each router.

One consumer and one producer, so a PIT entry holds a single downstream
router rather than a face set. Content stores are unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from icnstretch.errors import (
    BrokenPitChain,
    HopBudgetExhausted,
    NoCsHit,
    NotAdjacent,
    UnknownContent,
    ValidationError,
)
from icnstretch.topology import PathTrace, RouterId, Topology

ContentName = str

DEFAULT_CATALOG = ("c1", "c2", "c3")

# downstream marker stored at the consumer-attached router
CONSUMER_FACE = None


@dataclass
class RouterNode:
    id: RouterId
    cs: set[ContentName] = field(default_factory=set)
    pit: dict[ContentName, Optional[RouterId]] = field(default_factory=dict)
    fib: dict[ContentName, RouterId] = field(default_factory=dict)


@dataclass
class InterestPacket:
    name: ContentName
    trace: list[RouterId]
    hop_budget: int

    @property
    def current(self) -> RouterId:
        return self.trace[-1]

    @property
    def hops(self) -> int:
        return len(self.trace) - 1

    def path(self) -> PathTrace:
        return PathTrace(tuple(self.trace))


@dataclass(frozen=True)
class DataPacket:
    name: ContentName
    reverse_path: PathTrace


class Network:
    """The set of ICN routers sitting on a topology."""

    def __init__(
        self,
        topology: Topology,
        catalog: Iterable[ContentName] = DEFAULT_CATALOG,
        on_path_caching: bool = False,
    ):
        self.topology = topology
        self.catalog = tuple(catalog)
        if any(not name for name in self.catalog):
            raise ValidationError("content names must be non-empty")
        if len(set(self.catalog)) != len(self.catalog):
            raise ValidationError(f"duplicate content names in catalog {self.catalog}")
        self.on_path_caching = on_path_caching
        self.routers = {r: RouterNode(r) for r in topology.routers}

    def router(self, r: RouterId) -> RouterNode:
        self.topology.check(r)
        return self.routers[r]

    def _check_name(self, name: ContentName) -> None:
        if name not in self.catalog:
            raise UnknownContent(f"content {name!r} not in catalog {list(self.catalog)}")

    def place_content(self, name: ContentName, r: RouterId) -> "Network":
        node = self.router(r)
        self._check_name(name)
        node.cs.add(name)
        return self

    def cs_hit(self, r: RouterId, name: ContentName) -> bool:
        return name in self.router(r).cs

    def holders(self, name: ContentName) -> list[RouterId]:
        return [r for r, node in self.routers.items() if name in node.cs]

    def clear_pit(self) -> None:
        for node in self.routers.values():
            node.pit.clear()

    def new_interest(self, name: ContentName, origin: RouterId, hop_budget: int) -> InterestPacket:
        self._check_name(name)
        node = self.router(origin)
        node.pit.setdefault(name, CONSUMER_FACE)
        return InterestPacket(name, [origin], hop_budget)

    def forward_interest(self, packet: InterestPacket, next_router: RouterId) -> tuple["Network", InterestPacket]:
        prev = packet.current
        node = self.router(next_router)
        if not self.topology.is_adjacent(prev, next_router):
            raise NotAdjacent(f"router {next_router} is not adjacent to router {prev}")
        if packet.hops >= packet.hop_budget:
            raise HopBudgetExhausted(f"interest for {packet.name!r} used all {packet.hop_budget} hops")
        packet.trace.append(next_router)
        # first arrival wins, so the PIT chain stays loop-free when the interest revisits a router
        node.pit.setdefault(packet.name, prev)
        return self, packet

    def pit_chain(self, r: RouterId, name: ContentName) -> list[RouterId]:
        """Follow PIT downstream pointers from ``r`` back to the consumer face."""
        chain = [r]
        seen = {r}
        while True:
            node = self.routers[chain[-1]]
            if name not in node.pit:
                raise BrokenPitChain(f"router {chain[-1]} has no PIT entry for {name!r}")
            down = node.pit[name]
            if down is CONSUMER_FACE:
                return chain
            if down in seen or not self.topology.is_adjacent(chain[-1], down):
                raise BrokenPitChain(f"PIT for {name!r} at router {chain[-1]} points at {down}")
            seen.add(down)
            chain.append(down)

    def satisfy_and_return(self, packet: InterestPacket) -> tuple[DataPacket, "Network"]:
        r, name = packet.current, packet.name
        if not self.cs_hit(r, name):
            raise NoCsHit(f"router {r} does not hold {name!r}")
        chain = self.pit_chain(r, name)
        if chain[-1] != packet.trace[0]:
            raise BrokenPitChain(f"PIT chain for {name!r} ends at {chain[-1]}, interest began at {packet.trace[0]}")
        reverse = packet.path().reversed()
        for hop in reverse.routers:
            self.routers[hop].pit.pop(name, None)
            if self.on_path_caching:
                self.routers[hop].cs.add(name)
        return DataPacket(name, reverse), self
