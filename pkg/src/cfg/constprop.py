"""
Backward constant propagation inside a basic block.

Only the immediate-building idioms compilers emit for register and
MMIO values are followed: MOV/MOVW, MOVT over a known low half, ORR
with an immediate, and PC-relative literal loads. Anything else that
writes the register makes the value unknown.
"""

from typing import Optional, Tuple

from disasm.index import InstrIndex
from disasm.instr import BRANCH_KINDS, Instr, Kind

DEFAULT_WINDOW = 16

_BLOCK_ENDERS = BRANCH_KINDS | {Kind.BLX, Kind.BLXNS, Kind.BX, Kind.BXNS, Kind.SVC}


def const_value_at(index: InstrIndex, instr_addr: int, register: int,
                   window: int = DEFAULT_WINDOW) -> Optional[int]:
    """Value ``register`` holds when the instruction at ``instr_addr`` executes, if constant."""
    return _resolve(index, instr_addr, register, window)


def defined_value(index: InstrIndex, instr: Instr, window: int = DEFAULT_WINDOW) -> Optional[int]:
    """Value written by a MOV/MOVT/ORR/literal-load instruction, if constant."""
    if instr.kind is Kind.LDR_LITERAL:
        return _value_of(index, instr, instr.rt, window)
    if instr.rd is None:
        return None
    return _value_of(index, instr, instr.rd, window)


def store_target(index: InstrIndex, instr: Instr, window: int = DEFAULT_WINDOW) -> Optional[Tuple[int, Optional[int]]]:
    """(address, value) of a STR immediate; value may be unknown, address must resolve."""
    if instr.kind not in (Kind.STR_IMM, Kind.STRT):
        return None
    base = _resolve(index, instr.addr, instr.rn, window)
    if base is None:
        return None
    address = (base + (instr.offset or 0)) & 0xFFFFFFFF
    return address, _resolve(index, instr.addr, instr.rt, window)


def defining_instr(index: InstrIndex, instr_addr: int, register: int,
                   window: int = DEFAULT_WINDOW) -> Optional[Instr]:
    """The last instruction in the block before ``instr_addr`` that writes ``register``."""
    found, _ = _find_def(index, instr_addr, register, window)
    return found


def _find_def(index: InstrIndex, addr: int, register: int, remaining: int) -> Tuple[Optional[Instr], int]:
    cursor = addr
    while remaining > 0:
        if cursor in index.branch_targets:
            return None, remaining
        prev = index.previous(cursor)
        if prev is None or prev.kind in _BLOCK_ENDERS or prev.is_terminator:
            return None, remaining
        remaining -= 1
        if prev.writes(register):
            return prev, remaining
        cursor = prev.addr
    return None, remaining


def _resolve(index: InstrIndex, addr: int, register: int, remaining: int) -> Optional[int]:
    found, remaining = _find_def(index, addr, register, remaining)
    if found is None:
        return None
    return _value_of(index, found, register, remaining)


def _value_of(index: InstrIndex, instr: Instr, register: int, remaining: int) -> Optional[int]:
    if instr.kind is Kind.MOV_IMM and instr.rd == register:
        return instr.imm
    if instr.kind is Kind.LDR_LITERAL and instr.rt == register:
        return index.read_word(instr.target)
    if instr.kind is Kind.MOVT and instr.rd == register:
        low = _resolve(index, instr.addr, register, remaining)
        if low is None:
            return None
        return ((instr.imm << 16) | (low & 0xFFFF)) & 0xFFFFFFFF
    if instr.kind is Kind.ORR_IMM and instr.rd == register:
        source = _resolve(index, instr.addr, instr.rn, remaining)
        if source is None:
            return None
        return (source | instr.imm) & 0xFFFFFFFF
    return None
