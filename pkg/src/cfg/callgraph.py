"""Call graph over recognized functions, backed by networkx."""

import logging
from functools import cached_property
from typing import FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from disasm.index import InstrIndex
from disasm.instr import Kind

from .constprop import const_value_at
from .functions import FunctionSet

logger = logging.getLogger(__name__)


class CallGraph:
    """
    Nodes are function entries. Edges carry the call-site addresses and
    how the call was made (``bl``, ``tail`` or ``blx``).
    """

    def __init__(self, graph: nx.DiGraph, functions: FunctionSet, roots: FrozenSet[int]):
        self.graph = graph
        self.functions = functions
        self.roots = roots

    @property
    def nodes(self) -> List[int]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return sorted(self.graph.edges)

    def has_edge(self, caller: int, callee: int) -> bool:
        return self.graph.has_edge(caller, callee)

    def callers(self, entry: int) -> List[int]:
        return sorted(self.graph.predecessors(entry)) if entry in self.graph else []

    def callees(self, entry: int) -> List[int]:
        return sorted(self.graph.successors(entry)) if entry in self.graph else []

    def call_sites(self, caller: int, callee: int) -> List[int]:
        if not self.graph.has_edge(caller, callee):
            return []
        return sorted(self.graph.edges[caller, callee]["sites"])

    @cached_property
    def reachable(self) -> FrozenSet[int]:
        seen = set()
        for root in self.roots:
            if root in self.graph:
                seen.add(root)
                seen.update(nx.descendants(self.graph, root))
        return frozenset(seen)

    def in_call_tree(self, addr: int) -> bool:
        """
        True if the function holding ``addr`` is reachable from a root
        or has at least one caller.
        """
        function = self.functions.containing(addr)
        if function is None:
            return False
        entry = function.entry
        return entry in self.reachable or self.graph.in_degree(entry) > 0


def build_call_graph(functions: FunctionSet, index: InstrIndex,
                     roots: Optional[Iterable[int]] = None) -> CallGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(functions.entries)
    entries = functions.entries

    for function in functions:
        for addr in sorted(function.body):
            instr = index.get(addr)
            callee, how = None, None
            if instr.kind is Kind.BL and instr.target in entries:
                callee, how = instr.target, "bl"
            elif instr.kind in (Kind.B, Kind.BCOND) and instr.target in entries and instr.target != function.entry:
                callee, how = instr.target, "tail"
            elif instr.kind is Kind.BLX:
                value = const_value_at(index, addr, instr.rm)
                if value is not None and value & ~1 in entries:
                    callee, how = value & ~1, "blx"
            if callee is None:
                continue
            if graph.has_edge(function.entry, callee):
                graph.edges[function.entry, callee]["sites"].add(addr)
            else:
                graph.add_edge(function.entry, callee, sites={addr}, kind=how)

    root_set = frozenset(index.entry_points if roots is None else (r & ~1 for r in roots))
    logger.debug(f"call graph: {graph.number_of_nodes()} node(s), {graph.number_of_edges()} edge(s)")
    return CallGraph(graph, functions, root_set & entries)
