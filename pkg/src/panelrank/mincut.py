"""Exact max-flow / min-cut on small graphs with rational capacities.

Dinic's algorithm over ``fractions.Fraction`` capacities: no tolerances, no
floating point. Graphs here are tiny (one node per object plus the two
terminals), so clarity wins over asymptotics.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Hashable, Iterable


class FlowNetwork:
    """Directed flow network; nodes are arbitrary hashables added in a fixed order."""

    def __init__(self):
        self._adjacency: dict = {}
        self._to: list = []
        self._capacity: list[Fraction] = []

    def add_node(self, node: Hashable) -> None:
        self._adjacency.setdefault(node, [])

    def add_edge(self, tail: Hashable, head: Hashable, capacity: Fraction) -> None:
        if capacity < 0:
            raise ValueError("edge capacity must be nonnegative")
        self.add_node(tail)
        self.add_node(head)
        self._adjacency[tail].append(len(self._to))
        self._to.append(head)
        self._capacity.append(Fraction(capacity))
        self._adjacency[head].append(len(self._to))
        self._to.append(tail)
        self._capacity.append(Fraction(0))

    def max_flow(self, source: Hashable, sink: Hashable) -> Fraction:
        self.add_node(source)
        self.add_node(sink)
        total = Fraction(0)
        while True:
            level = self._levels(source)
            if level.get(sink) is None:
                return total
            cursor = {node: 0 for node in self._adjacency}
            while True:
                pushed = self._push(source, sink, None, level, cursor)
                if pushed == 0:
                    break
                total += pushed

    def _levels(self, source: Hashable) -> dict:
        level = {source: 0}
        queue = deque([source])
        while queue:
            node = queue.popleft()
            for edge in self._adjacency[node]:
                head = self._to[edge]
                if self._capacity[edge] > 0 and head not in level:
                    level[head] = level[node] + 1
                    queue.append(head)
        return level

    def _push(self, node, sink, limit, level, cursor) -> Fraction:
        if node == sink:
            return limit
        edges = self._adjacency[node]
        while cursor[node] < len(edges):
            edge = edges[cursor[node]]
            head = self._to[edge]
            residual = self._capacity[edge]
            if residual > 0 and level.get(head) == level[node] + 1:
                allowance = residual if limit is None else min(limit, residual)
                pushed = self._push(head, sink, allowance, level, cursor)
                if pushed > 0:
                    self._capacity[edge] -= pushed
                    self._capacity[edge ^ 1] += pushed
                    return pushed
            cursor[node] += 1
        return Fraction(0)

    def source_side(self, source: Hashable) -> frozenset:
        """Nodes reachable from the source in the residual graph.

        After ``max_flow`` this is the minimal min-cut source side, which
        makes downstream results deterministic.
        """
        reached = {source}
        queue = deque([source])
        while queue:
            node = queue.popleft()
            for edge in self._adjacency[node]:
                head = self._to[edge]
                if self._capacity[edge] > 0 and head not in reached:
                    reached.add(head)
                    queue.append(head)
        return frozenset(reached)


_SOURCE = object()
_SINK = object()


def minimize_boolean_energy(
    nodes: Iterable[Hashable], unary: dict, pair_costs: dict
) -> tuple[Fraction, frozenset]:
    """Exactly minimize a submodular binary energy by one min cut.

    The energy is ``sum(unary[v] * d_v) + sum(pair_costs[(a, b)] * d_a * (1 - d_b))``
    over assignments d in {0, 1}; pair costs must be nonnegative (that is
    submodularity here). Returns the minimum value and the minimal optimal
    set of nodes assigned 1. The empty set always scores 0, so the minimum
    is never positive.
    """
    net = FlowNetwork()
    net.add_node(_SOURCE)
    net.add_node(_SINK)
    base = Fraction(0)
    for node in nodes:
        net.add_node(node)
        cost = unary.get(node, Fraction(0))
        if cost > 0:
            net.add_edge(node, _SINK, cost)
        elif cost < 0:
            net.add_edge(_SOURCE, node, -cost)
            base += cost
    for (tail, head), cost in pair_costs.items():
        if cost < 0:
            raise ValueError("pair costs must be nonnegative")
        if cost > 0:
            net.add_edge(tail, head, cost)
    flow = net.max_flow(_SOURCE, _SINK)
    chosen = net.source_side(_SOURCE) - {_SOURCE}
    return base + flow, frozenset(chosen)
