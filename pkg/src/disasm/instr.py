"""
Decoded instruction model.

Only the classes consumed by the detectors and the security model get a
dedicated kind. Any other valid Thumb encoding is ``OTHER`` and keeps
the control flow going; ``UNKNOWN`` is undefined or unsupported and ends
a disassembly path.
"""

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, List, Optional

PC = 15
LR = 14
SP = 13
CALLER_SAVED = frozenset({0, 1, 2, 3, 12, LR})

# SYSm selectors
SYSM_MSP = 0x08
SYSM_PSP = 0x09
SYSM_MSPLIM = 0x0A
SYSM_PSPLIM = 0x0B
SYSM_CONTROL = 0x14
SYSM_MSP_NS = 0x88
SYSM_PSP_NS = 0x89
SYSM_MSPLIM_NS = 0x8A
SYSM_PSPLIM_NS = 0x8B
SYSM_CONTROL_NS = 0x94

CONTROL_SYSM = frozenset({SYSM_CONTROL, SYSM_CONTROL_NS})
PSP_SYSM = frozenset({SYSM_PSP, SYSM_PSP_NS})
STACK_LIMIT_SYSM = frozenset({SYSM_MSPLIM, SYSM_PSPLIM, SYSM_MSPLIM_NS, SYSM_PSPLIM_NS})

SYSM_NAMES = {
    0x00: "APSR", 0x01: "IAPSR", 0x02: "EAPSR", 0x03: "XPSR",
    0x05: "IPSR", 0x06: "EPSR", 0x07: "IEPSR",
    SYSM_MSP: "MSP", SYSM_PSP: "PSP", SYSM_MSPLIM: "MSPLIM", SYSM_PSPLIM: "PSPLIM",
    0x10: "PRIMASK", 0x11: "BASEPRI", 0x12: "BASEPRI_MAX", 0x13: "FAULTMASK",
    SYSM_CONTROL: "CONTROL",
    SYSM_MSP_NS: "MSP_NS", SYSM_PSP_NS: "PSP_NS", SYSM_MSPLIM_NS: "MSPLIM_NS",
    SYSM_PSPLIM_NS: "PSPLIM_NS", 0x90: "PRIMASK_NS", 0x91: "BASEPRI_NS",
    0x93: "FAULTMASK_NS", SYSM_CONTROL_NS: "CONTROL_NS", 0x98: "SP_NS",
}


class Kind(str, Enum):
    MSR = "msr"
    MRS = "mrs"
    SVC = "svc"
    ISB = "isb"
    DSB = "dsb"
    DMB = "dmb"
    CPS = "cps"
    BL = "bl"
    BLX = "blx"
    B = "b"
    BCOND = "bcond"
    CBZ = "cbz"
    BX = "bx"
    PUSH = "push"
    POP = "pop"
    LDR_LITERAL = "ldr_literal"
    MOV_IMM = "mov_imm"
    MOVT = "movt"
    ORR_IMM = "orr_imm"
    STR_IMM = "str_imm"
    LDR_IMM = "ldr_imm"
    STRT = "strt"
    LDRT = "ldrt"
    SG = "sg"
    BXNS = "bxns"
    BLXNS = "blxns"
    TT = "tt"
    SUB_SP = "sub_sp"
    CMP_REG = "cmp_reg"
    OTHER = "other"
    UNKNOWN = "unknown"


_ALWAYS_TERMINATE = frozenset({Kind.B, Kind.BX, Kind.BLX, Kind.BXNS, Kind.BLXNS, Kind.UNKNOWN})
_TWO_WAY = frozenset({Kind.BCOND, Kind.CBZ, Kind.BL})
BRANCH_KINDS = frozenset({Kind.B, Kind.BCOND, Kind.CBZ, Kind.BL})


@dataclass(frozen=True)
class Instr:
    addr: int
    width: int
    kind: Kind
    raw: bytes
    rd: Optional[int] = None
    rt: Optional[int] = None
    rn: Optional[int] = None
    rm: Optional[int] = None
    imm: Optional[int] = None
    offset: Optional[int] = None
    target: Optional[int] = None
    sysm: Optional[int] = None
    reglist: FrozenSet[int] = frozenset()
    variant: Optional[str] = None
    defs: FrozenSet[int] = frozenset()

    @property
    def next_addr(self) -> int:
        return self.addr + self.width

    @property
    def is_terminator(self) -> bool:
        if self.kind in _ALWAYS_TERMINATE:
            return True
        return PC in self.defs

    def successors(self) -> List[int]:
        """Addresses control may reach next, in a stable order."""
        if self.kind is Kind.B:
            return [self.target]
        if self.is_terminator:
            return []
        if self.kind in _TWO_WAY:
            return [self.next_addr, self.target]
        return [self.next_addr]

    def writes(self, register: int) -> bool:
        return register in self.defs

    @property
    def sysm_name(self) -> Optional[str]:
        if self.sysm is None:
            return None
        return SYSM_NAMES.get(self.sysm, f"SYSm_{self.sysm:#04x}")

    def __str__(self) -> str:
        parts = [f"0x{self.addr:08x}: {self.kind.value}"]
        if self.sysm is not None:
            parts.append(self.sysm_name)
        if self.target is not None:
            parts.append(f"-> 0x{self.target:08x}")
        if self.imm is not None:
            parts.append(f"#{self.imm:#x}")
        return " ".join(parts)
