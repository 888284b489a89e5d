"""
Thumb/Thumb-2 subset decoder and recursive-descent disassembler.
"""

from .decoder import decodable_mask, decode_bytes, decode_halfwords, decode_one, instr_width, thumb_expand_imm
from .errors import OutOfBounds
from .index import InstrIndex
from .instr import (
    CONTROL_SYSM,
    PSP_SYSM,
    STACK_LIMIT_SYSM,
    SYSM_CONTROL,
    SYSM_CONTROL_NS,
    SYSM_MSP,
    SYSM_MSP_NS,
    SYSM_MSPLIM,
    SYSM_MSPLIM_NS,
    SYSM_PSP,
    SYSM_PSP_NS,
    SYSM_PSPLIM,
    SYSM_PSPLIM_NS,
    Instr,
    Kind,
)
from .recursive import disassemble

__all__ = [
    "CONTROL_SYSM",
    "PSP_SYSM",
    "STACK_LIMIT_SYSM",
    "SYSM_CONTROL",
    "SYSM_CONTROL_NS",
    "SYSM_MSP",
    "SYSM_MSP_NS",
    "SYSM_MSPLIM",
    "SYSM_MSPLIM_NS",
    "SYSM_PSP",
    "SYSM_PSP_NS",
    "SYSM_PSPLIM",
    "SYSM_PSPLIM_NS",
    "Instr",
    "InstrIndex",
    "Kind",
    "OutOfBounds",
    "decodable_mask",
    "decode_bytes",
    "decode_halfwords",
    "decode_one",
    "disassemble",
    "instr_width",
    "thumb_expand_imm",
]
