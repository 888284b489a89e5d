"""Recursive-descent disassembly from vector-table entry points."""

import logging
from collections import deque
from typing import AbstractSet, Dict, Iterable, Set, Tuple

from ingest.model import FirmwareImage

from .decoder import decode_one
from .errors import OutOfBounds
from .index import InstrIndex
from .instr import Instr, Kind

logger = logging.getLogger(__name__)


def disassemble(image: FirmwareImage, entry_points: Iterable[int]) -> InstrIndex:
    """
    Follow control flow from ``entry_points`` and decode everything reachable.

    Literal-pool words are recorded as data and never decoded; pool words
    that hold odd in-image pointers become extra entry points. A fallthrough
    path can reach a pool before the load that owns it is seen, so descent
    repeats with the known pool words reserved until no instruction
    overlaps one.
    """
    if image.base is None:
        raise ValueError("disassemble needs an image with a base address")

    roots = sorted({addr & ~1 for addr in entry_points})
    reserved: AbstractSet[int] = frozenset()
    passes = 0
    while True:
        passes += 1
        instrs, data, entries = _descend(image, roots, reserved)
        clashes = [a for a, i in instrs.items() if any(h in data for h in range(a, a + i.width, 2))]
        if not clashes:
            break
        logger.debug(f"{len(clashes)} instruction(s) overlap literal pools, redoing descent")
        reserved = frozenset(data)

    logger.debug(f"disassembled {len(instrs)} instruction(s) from {len(entries)} entry point(s) "
                 f"in {passes} pass(es)")
    return InstrIndex(
        instrs=instrs,
        entry_points=frozenset(entries),
        data_addresses=frozenset(data),
        exhausted=True,
        image=image,
    )


def _descend(image: FirmwareImage, roots: Iterable[int],
             reserved: AbstractSet[int]) -> Tuple[Dict[int, Instr], Set[int], Set[int]]:
    instrs: Dict[int, Instr] = {}
    covered: Set[int] = set()  # every halfword address that belongs to an instruction
    data: Set[int] = set(reserved)
    entries: Set[int] = set()
    worklist = deque()

    def push_entry(addr: int) -> None:
        if addr not in entries and image.contains(addr, 2) and addr & 1 == 0:
            entries.add(addr)
            worklist.append(addr)

    for addr in roots:
        push_entry(addr)

    while worklist:
        addr = worklist.popleft()
        while True:
            if addr in instrs or addr in covered or addr in data or not image.contains(addr, 2):
                break
            try:
                instr = decode_one(image, addr)
            except OutOfBounds:
                break
            if instr.width == 4 and (addr + 2 in covered or addr + 2 in data):
                break
            instrs[addr] = instr
            covered.update(range(addr, addr + instr.width, 2))

            if instr.kind is Kind.LDR_LITERAL:
                _record_literal(image, instr, data, push_entry)

            successors = instr.successors()
            if not successors:
                break
            fallthrough = instr.next_addr
            worklist.extend(t for t in successors if t != fallthrough)
            if fallthrough not in successors:
                break
            addr = fallthrough
    return instrs, data, entries


def _record_literal(image: FirmwareImage, instr: Instr, data: Set[int], push_entry) -> None:
    target = instr.target
    if not image.contains(target, 4):
        return
    data.update((target, target + 2))
    value = image.read_u32(target)
    if value & 1 and image.contains(value & ~1, 2):
        push_entry(value & ~1)
