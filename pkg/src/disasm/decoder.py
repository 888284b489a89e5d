"""
Thumb / Thumb-2 decoder for the security-relevant instruction subset.

Dispatch follows the top bits of the first halfword the way the
Armv7-M/Armv8-M encoding tables are organized. Every halfword pattern
decodes to something; nothing here raises except on out-of-image reads.
"""

import struct
from typing import FrozenSet, Iterable, Optional

import numpy as np

from ingest.model import FirmwareImage

from .errors import OutOfBounds
from .instr import CALLER_SAVED, PC, SP, Instr, Kind

WIDE_PREFIXES = (0b11101, 0b11110, 0b11111)
_ALL_GPRS = frozenset(range(15))
_TT_VARIANTS = {(0, 0): "tt", (0, 1): "ttt", (1, 0): "tta", (1, 1): "ttat"}


def instr_width(halfword: int) -> int:
    return 4 if (halfword >> 11) in WIDE_PREFIXES else 2


def is_unknown_encoding(hw1, hw2):
    """
    True for encodings decoded as UNKNOWN.

    Works element-wise on numpy uint arrays as well as on plain ints:
    erased flash (0xFFFF), UDF, IT and BLX-immediate.
    """
    wide = (hw1 >> 11) >= 0b11101
    narrow_unknown = ((hw1 & 0xFF00) == 0xDE00) | (((hw1 & 0xFF00) == 0xBF00) & ((hw1 & 0x000F) != 0))
    wide_unknown = (
        (hw1 == 0xFFFF)
        | (((hw1 & 0xFFF0) == 0xF7F0) & ((hw2 & 0xF000) == 0xA000))
        | (((hw1 & 0xF800) == 0xF000) & ((hw2 & 0xD000) == 0xC000))
    )
    return ((wide ^ True) & narrow_unknown) | (wide & wide_unknown)


def decodable_mask(data: bytes) -> np.ndarray:
    """Per-halfword flag: a decode starting there yields a known, in-bounds instruction."""
    count = len(data) // 2
    if count == 0:
        return np.zeros(0, dtype=bool)
    hw1 = np.frombuffer(data[:count * 2], dtype="<u2").astype(np.uint32)
    hw2 = np.zeros_like(hw1)
    hw2[:-1] = hw1[1:]
    unknown = is_unknown_encoding(hw1, hw2)
    wide = (hw1 >> 11) >= 0b11101
    unknown[-1] |= bool(wide[-1])
    return ~unknown


def prologue_mask(data: bytes) -> np.ndarray:
    """Per-halfword flag: PUSH including LR starts there."""
    count = len(data) // 2
    if count == 0:
        return np.zeros(0, dtype=bool)
    hw1 = np.frombuffer(data[:count * 2], dtype="<u2").astype(np.uint32)
    hw2 = np.zeros_like(hw1)
    hw2[:-1] = hw1[1:]
    return ((hw1 & 0xFF00) == 0xB500) | ((hw1 == 0xE92D) & ((hw2 & 0x4000) != 0))


def sign_extend(value: int, bits: int) -> int:
    sign = 1 << (bits - 1)
    return (value & (sign - 1)) - (value & sign)


def thumb_expand_imm(imm12: int) -> int:
    imm8 = imm12 & 0xFF
    if imm12 >> 10 == 0:
        mode = (imm12 >> 8) & 0x3
        if mode == 0:
            return imm8
        if mode == 1:
            return (imm8 << 16) | imm8
        if mode == 2:
            return (imm8 << 24) | (imm8 << 8)
        return imm8 * 0x01010101
    unrotated = 0x80 | (imm12 & 0x7F)
    rotation = (imm12 >> 7) & 0x1F
    return ((unrotated >> rotation) | (unrotated << (32 - rotation))) & 0xFFFFFFFF


def _regs(mask: int) -> FrozenSet[int]:
    return frozenset(i for i in range(16) if mask & (1 << i))


def _wrap(addr: int) -> int:
    return addr & 0xFFFFFFFF


def decode_one(image: FirmwareImage, addr: int) -> Instr:
    if addr & 1:
        raise OutOfBounds(addr, "address is not halfword-aligned")
    if not image.contains(addr, 2):
        raise OutOfBounds(addr)
    hw1 = image.read_u16(addr)
    if instr_width(hw1) == 2:
        return decode_halfwords(addr, hw1)
    if not image.contains(addr, 4):
        raise OutOfBounds(addr, "32-bit instruction runs past the image end")
    return decode_halfwords(addr, hw1, image.read_u16(addr + 2))


def decode_bytes(data: bytes, addr: int = 0) -> Optional[Instr]:
    """Decode from a raw buffer whose first byte sits at ``addr``; None if truncated."""
    if len(data) < 2:
        return None
    hw1 = struct.unpack_from("<H", data)[0]
    if instr_width(hw1) == 2:
        return decode_halfwords(addr, hw1)
    if len(data) < 4:
        return None
    return decode_halfwords(addr, hw1, struct.unpack_from("<H", data, 2)[0])


def decode_halfwords(addr: int, hw1: int, hw2: Optional[int] = None) -> Instr:
    wide = instr_width(hw1) == 4
    if wide and hw2 is None:
        raise ValueError("32-bit encoding needs its second halfword")
    raw = struct.pack("<HH", hw1, hw2) if wide else struct.pack("<H", hw1)
    if is_unknown_encoding(hw1, hw2 or 0):
        return Instr(addr, len(raw), Kind.UNKNOWN, raw)
    if wide:
        return _decode32(addr, hw1, hw2, raw)
    return _decode16(addr, hw1, raw)


def _i(addr, raw, kind, **fields) -> Instr:
    return Instr(addr=addr, width=len(raw), kind=kind, raw=raw, **fields)


def _other(addr, raw, defs: Iterable[int] = ()) -> Instr:
    return _i(addr, raw, Kind.OTHER, defs=frozenset(defs))


def _decode16(addr: int, hw: int, raw: bytes) -> Instr:
    op5 = hw >> 11

    if op5 == 0b00100:
        rd = (hw >> 8) & 7
        return _i(addr, raw, Kind.MOV_IMM, rd=rd, imm=hw & 0xFF, defs=frozenset({rd}))
    if op5 == 0b01001:
        rt = (hw >> 8) & 7
        target = ((addr + 4) & ~3) + (hw & 0xFF) * 4
        return _i(addr, raw, Kind.LDR_LITERAL, rt=rt, target=_wrap(target), defs=frozenset({rt}))
    if op5 in (0b01100, 0b01101):
        rt, rn, off = hw & 7, (hw >> 3) & 7, ((hw >> 6) & 0x1F) * 4
        if op5 == 0b01100:
            return _i(addr, raw, Kind.STR_IMM, rt=rt, rn=rn, offset=off)
        return _i(addr, raw, Kind.LDR_IMM, rt=rt, rn=rn, offset=off, defs=frozenset({rt}))
    if op5 in (0b10010, 0b10011):
        rt, off = (hw >> 8) & 7, (hw & 0xFF) * 4
        if op5 == 0b10010:
            return _i(addr, raw, Kind.STR_IMM, rt=rt, rn=SP, offset=off)
        return _i(addr, raw, Kind.LDR_IMM, rt=rt, rn=SP, offset=off, defs=frozenset({rt}))
    if op5 == 0b11100:
        target = addr + 4 + sign_extend((hw & 0x7FF) << 1, 12)
        return _i(addr, raw, Kind.B, target=_wrap(target))
    if hw >> 12 == 0b1101:
        cond = (hw >> 8) & 0xF
        if cond == 0xF:
            return _i(addr, raw, Kind.SVC, imm=hw & 0xFF)
        target = addr + 4 + sign_extend((hw & 0xFF) << 1, 9)
        return _i(addr, raw, Kind.BCOND, target=_wrap(target), imm=cond)

    if hw >> 10 == 0b010000:
        op, rm, rdn = (hw >> 6) & 0xF, (hw >> 3) & 7, hw & 7
        if op == 10:
            return _i(addr, raw, Kind.CMP_REG, rn=rdn, rm=rm, variant="cmp")
        if op == 1:
            return _i(addr, raw, Kind.CMP_REG, rn=rdn, rm=rm, variant="eor", defs=frozenset({rdn}))
        if op in (8, 11):  # TST, CMN
            return _other(addr, raw)
        return _other(addr, raw, {rdn})
    if hw >> 10 == 0b010001:
        op, rm = (hw >> 8) & 3, (hw >> 3) & 0xF
        rdn = (((hw >> 7) & 1) << 3) | (hw & 7)
        if op == 1:
            return _i(addr, raw, Kind.CMP_REG, rn=rdn, rm=rm, variant="cmp")
        if op in (0, 2):  # ADD / MOV high registers
            return _other(addr, raw, {rdn})
        link, low = (hw >> 7) & 1, hw & 7
        if low == 0b100:
            return _i(addr, raw, Kind.BLXNS if link else Kind.BXNS, rm=rm, defs=CALLER_SAVED if link else frozenset())
        if low == 0:
            return _i(addr, raw, Kind.BLX if link else Kind.BX, rm=rm, defs=CALLER_SAVED if link else frozenset())
        return _other(addr, raw)

    if hw >> 12 == 0b1011:
        return _decode_misc16(addr, hw, raw)

    if hw >> 13 == 0b000:  # shifts, ADD/SUB register and imm3
        return _other(addr, raw, {hw & 7})
    if hw >> 13 == 0b001:  # CMP/ADD/SUB imm8
        return _other(addr, raw, () if (hw >> 11) & 3 == 1 else {(hw >> 8) & 7})
    if hw >> 12 == 0b0101:  # register-offset load/store
        return _other(addr, raw, () if (hw >> 9) & 7 < 3 else {hw & 7})
    if op5 in (0b01111, 0b10001):  # LDRB / LDRH immediate
        return _other(addr, raw, {hw & 7})
    if op5 in (0b01110, 0b10000):  # STRB / STRH immediate
        return _other(addr, raw)
    if op5 in (0b10100, 0b10101):  # ADR, ADD Rd, SP
        return _other(addr, raw, {(hw >> 8) & 7})
    if op5 == 0b11000:  # STM
        return _other(addr, raw, {(hw >> 8) & 7})
    if op5 == 0b11001:  # LDM
        return _other(addr, raw, _regs(hw & 0xFF) | {(hw >> 8) & 7})
    return _other(addr, raw)


def _decode_misc16(addr: int, hw: int, raw: bytes) -> Instr:
    if hw & 0xFF80 == 0xB080:
        return _i(addr, raw, Kind.SUB_SP, imm=(hw & 0x7F) * 4, defs=frozenset({SP}))
    if hw & 0xFF80 == 0xB000:
        return _other(addr, raw, {SP})
    if hw & 0xF500 == 0xB100:
        offset = (((hw >> 9) & 1) << 6) | (((hw >> 3) & 0x1F) << 1)
        return _i(addr, raw, Kind.CBZ, rn=hw & 7, target=_wrap(addr + 4 + offset),
                  variant="cbnz" if hw & 0x0800 else "cbz")
    if hw & 0xFE00 == 0xB400:
        regs = _regs(hw & 0xFF) | ({14} if hw & 0x100 else set())
        return _i(addr, raw, Kind.PUSH, reglist=frozenset(regs), defs=frozenset({SP}))
    if hw & 0xFE00 == 0xBC00:
        regs = _regs(hw & 0xFF) | ({PC} if hw & 0x100 else set())
        return _i(addr, raw, Kind.POP, reglist=frozenset(regs), defs=frozenset(regs | {SP}))
    if hw & 0xFFE8 == 0xB660:
        return _i(addr, raw, Kind.CPS, imm=hw & 0x7, variant="id" if hw & 0x10 else "ie")
    if hw & 0xFF00 in (0xB200, 0xBA00):  # extend, reverse
        return _other(addr, raw, {hw & 7})
    return _other(addr, raw)


def _decode32(addr: int, hw1: int, hw2: int, raw: bytes) -> Instr:
    if hw1 == 0xE97F and hw2 == 0xE97F:
        return _i(addr, raw, Kind.SG)
    if hw1 & 0xFFF0 == 0xE840 and hw2 & 0xF03F == 0xF000:
        rd = (hw2 >> 8) & 0xF
        variant = _TT_VARIANTS[((hw2 >> 7) & 1, (hw2 >> 6) & 1)]
        return _i(addr, raw, Kind.TT, rd=rd, rn=hw1 & 0xF, variant=variant, defs=frozenset({rd}))
    if hw1 == 0xE92D:
        return _i(addr, raw, Kind.PUSH, reglist=_regs(hw2 & 0x5FFF), defs=frozenset({SP}))
    if hw1 == 0xE8BD:
        regs = _regs(hw2 & 0xDFFF)
        return _i(addr, raw, Kind.POP, reglist=regs, defs=regs | {SP})

    if hw1 & 0xF800 == 0xF000 and hw2 & 0x8000:
        return _decode_branch_misc(addr, hw1, hw2, raw)
    if hw1 & 0xF800 == 0xF000:
        return _decode_data_imm(addr, hw1, hw2, raw)
    if hw1 & 0xFE00 == 0xF800:
        return _decode_load_store(addr, hw1, hw2, raw)

    rd = (hw2 >> 8) & 0xF
    if hw1 & 0xFFF0 == 0xEBB0 and rd == 0xF:
        return _i(addr, raw, Kind.CMP_REG, rn=hw1 & 0xF, rm=hw2 & 0xF, variant="cmp")
    if hw1 & 0xFFF0 == 0xEA90:
        return _i(addr, raw, Kind.CMP_REG, rn=hw1 & 0xF, rm=hw2 & 0xF, variant="eor",
                  defs=frozenset() if rd == 0xF else frozenset({rd}))
    if hw1 & 0xFE00 == 0xEA00 or hw1 & 0xFF00 == 0xFA00:
        return _other(addr, raw, () if rd == PC else {rd})
    if hw1 & 0xFF00 == 0xFB00:  # multiply, long multiply, divide
        return _other(addr, raw, {rd, (hw2 >> 12) & 0xF} - {PC})
    if hw1 & 0xFE00 == 0xE800:
        rn = hw1 & 0xF
        if hw1 & 0xFFF0 == 0xE8D0 and hw2 & 0xFFE0 == 0xF000:  # TBB/TBH
            return _other(addr, raw, {PC})
        op = (hw1 >> 7) & 0x3
        if op in (1, 2) and not hw1 & 0x0040:
            if hw1 & 0x0010:
                return _other(addr, raw, _regs(hw2) | {rn})
            return _other(addr, raw, {rn})
        return _other(addr, raw, _ALL_GPRS)
    return _other(addr, raw, _ALL_GPRS)


def _decode_branch_misc(addr: int, hw1: int, hw2: int, raw: bytes) -> Instr:
    s = (hw1 >> 10) & 1
    j1, j2 = (hw2 >> 13) & 1, (hw2 >> 11) & 1
    form = hw2 & 0xD000
    if form in (0xD000, 0x9000):
        i1, i2 = 1 - (j1 ^ s), 1 - (j2 ^ s)
        offset = (s << 24) | (i1 << 23) | (i2 << 22) | ((hw1 & 0x3FF) << 12) | ((hw2 & 0x7FF) << 1)
        target = _wrap(addr + 4 + sign_extend(offset, 25))
        if form == 0xD000:
            return _i(addr, raw, Kind.BL, target=target, defs=CALLER_SAVED)
        return _i(addr, raw, Kind.B, target=target)

    cond = (hw1 >> 6) & 0xF
    if cond < 0xE:
        offset = (s << 20) | (j2 << 19) | (j1 << 18) | ((hw1 & 0x3F) << 12) | ((hw2 & 0x7FF) << 1)
        return _i(addr, raw, Kind.BCOND, target=_wrap(addr + 4 + sign_extend(offset, 21)), imm=cond)

    if hw1 & 0xFFF0 == 0xF380 and hw2 & 0xF300 == 0x8000:
        return _i(addr, raw, Kind.MSR, rn=hw1 & 0xF, sysm=hw2 & 0xFF)
    if hw1 == 0xF3EF and hw2 & 0xF000 == 0x8000:
        rd = (hw2 >> 8) & 0xF
        return _i(addr, raw, Kind.MRS, rd=rd, sysm=hw2 & 0xFF, defs=frozenset({rd}))
    if hw1 == 0xF3BF:
        barrier = hw2 & 0xFFF0
        if barrier == 0x8F40:
            return _i(addr, raw, Kind.DSB, imm=hw2 & 0xF)
        if barrier == 0x8F50:
            return _i(addr, raw, Kind.DMB, imm=hw2 & 0xF)
        if barrier == 0x8F60:
            return _i(addr, raw, Kind.ISB, imm=hw2 & 0xF)
    return _other(addr, raw)


def _decode_data_imm(addr: int, hw1: int, hw2: int, raw: bytes) -> Instr:
    rd = (hw2 >> 8) & 0xF
    rn = hw1 & 0xF
    imm12 = (((hw1 >> 10) & 1) << 11) | (((hw2 >> 12) & 7) << 8) | (hw2 & 0xFF)

    if hw1 & 0xFBF0 in (0xF240, 0xF2C0):
        imm16 = (rn << 12) | imm12
        kind = Kind.MOV_IMM if hw1 & 0xFBF0 == 0xF240 else Kind.MOVT
        return _i(addr, raw, kind, rd=rd, imm=imm16, defs=frozenset({rd}))
    if hw1 & 0xFBEF == 0xF04F:
        return _i(addr, raw, Kind.MOV_IMM, rd=rd, imm=thumb_expand_imm(imm12), defs=frozenset({rd}))
    if hw1 & 0xFBE0 == 0xF040:
        return _i(addr, raw, Kind.ORR_IMM, rd=rd, rn=rn, imm=thumb_expand_imm(imm12), defs=frozenset({rd}))
    if hw1 & 0xFBEF == 0xF1AD and rd == SP:
        return _i(addr, raw, Kind.SUB_SP, imm=thumb_expand_imm(imm12), defs=frozenset({SP}))
    if hw1 & 0xFBFF == 0xF2AD and rd == SP:
        return _i(addr, raw, Kind.SUB_SP, imm=imm12, defs=frozenset({SP}))
    return _other(addr, raw, () if rd == PC else {rd})


def _decode_load_store(addr: int, hw1: int, hw2: int, raw: bytes) -> Instr:
    rn = hw1 & 0xF
    rt = (hw2 >> 12) & 0xF
    is_load = bool(hw1 & 0x0010)
    size = (hw1 >> 5) & 0x3

    if hw1 & 0xFF7F == 0xF85F:
        base = (addr + 4) & ~3
        delta = hw2 & 0xFFF
        target = base + delta if hw1 & 0x0080 else base - delta
        return _i(addr, raw, Kind.LDR_LITERAL, rt=rt, target=_wrap(target), defs=frozenset({rt}))
    if rn != PC:
        if hw1 & 0xFFF0 == 0xF8C0:
            return _i(addr, raw, Kind.STR_IMM, rt=rt, rn=rn, offset=hw2 & 0xFFF)
        if hw1 & 0xFFF0 == 0xF8D0:
            return _i(addr, raw, Kind.LDR_IMM, rt=rt, rn=rn, offset=hw2 & 0xFFF, defs=frozenset({rt}))
        if hw1 & 0xFFF0 in (0xF840, 0xF850) and hw2 & 0x0800:
            puw = hw2 & 0x0F00
            load = hw1 & 0xFFF0 == 0xF850
            if puw == 0x0E00:
                if load:
                    return _i(addr, raw, Kind.LDRT, rt=rt, rn=rn, offset=hw2 & 0xFF, defs=frozenset({rt}))
                return _i(addr, raw, Kind.STRT, rt=rt, rn=rn, offset=hw2 & 0xFF)
            if puw == 0x0C00:
                if load:
                    return _i(addr, raw, Kind.LDR_IMM, rt=rt, rn=rn, offset=-(hw2 & 0xFF), defs=frozenset({rt}))
                return _i(addr, raw, Kind.STR_IMM, rt=rt, rn=rn, offset=-(hw2 & 0xFF))
    if is_load:
        defs = {rn} - {PC}
        # PLD/PLI are byte loads to PC; only word loads can branch
        if rt != PC or size == 2:
            defs.add(rt)
        return _other(addr, raw, defs)
    return _other(addr, raw, {rn} - {PC})
