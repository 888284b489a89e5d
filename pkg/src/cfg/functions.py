"""Rule-based function recognition over a recursive-descent instruction index."""

import bisect
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from disasm.index import InstrIndex
from disasm.instr import LR, Instr, Kind

logger = logging.getLogger(__name__)

_LOCAL_BRANCHES = (Kind.B, Kind.BCOND, Kind.CBZ)


@dataclass(frozen=True)
class Function:
    entry: int
    body: FrozenSet[int]  # decoded instruction addresses

    def __contains__(self, addr: int) -> bool:
        return addr in self.body

    @property
    def last(self) -> int:
        return max(self.body)


@dataclass(frozen=True)
class FunctionSet:
    functions: Tuple[Function, ...]

    def __iter__(self) -> Iterator[Function]:
        return iter(self.functions)

    def __len__(self) -> int:
        return len(self.functions)

    @cached_property
    def entries(self) -> FrozenSet[int]:
        return frozenset(f.entry for f in self.functions)

    @cached_property
    def _owner(self) -> Dict[int, Function]:
        return {addr: f for f in self.functions for addr in f.body}

    def get(self, entry: int) -> Optional[Function]:
        for function in self.functions:
            if function.entry == entry:
                return function
        return None

    def containing(self, addr: int) -> Optional[Function]:
        """The function whose body holds the instruction at ``addr``."""
        return self._owner.get(addr)


def is_prologue(instr: Instr, previous: Optional[Instr]) -> bool:
    if instr.kind is Kind.PUSH and LR in instr.reglist:
        return True
    # a bare stack adjustment only starts a function after a path ended
    if instr.kind is Kind.SUB_SP:
        return previous is None or previous.is_terminator
    return False


def identify_functions(index: InstrIndex) -> FunctionSet:
    entries = {addr for addr in index.entry_points if addr in index}
    for instr in index:
        if instr.kind is Kind.BL and instr.target in index:
            entries.add(instr.target)
        elif is_prologue(instr, index.previous(instr.addr)):
            entries.add(instr.addr)

    ordered = sorted(entries)
    functions = []
    for pos, entry in enumerate(ordered):
        limit = ordered[pos + 1] if pos + 1 < len(ordered) else 1 << 32
        body = _span(index, entry, limit)
        if body:
            functions.append(Function(entry=entry, body=frozenset(body)))

    logger.debug(f"identified {len(functions)} function(s)")
    return FunctionSet(functions=tuple(functions))


def _span(index: InstrIndex, entry: int, limit: int) -> List[int]:
    """Forward span from ``entry``; crosses a terminator only when a local branch jumps past it."""
    addresses = index.addresses
    body = []
    furthest = entry
    cursor = entry
    while cursor < limit:
        instr = index.get(cursor)
        if instr is None:
            if cursor > furthest:
                break
            # skip an inline literal pool up to the next decoded instruction
            pos = bisect.bisect_left(addresses, cursor)
            if pos >= len(addresses) or addresses[pos] > furthest or addresses[pos] >= limit:
                break
            cursor = addresses[pos]
            continue
        body.append(cursor)
        if instr.kind in _LOCAL_BRANCHES and cursor < instr.target < limit:
            furthest = max(furthest, instr.target)
        cursor = instr.next_addr
        if instr.is_terminator and cursor > furthest:
            break
    return body
