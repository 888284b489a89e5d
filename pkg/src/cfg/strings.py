"""
Printable-ASCII string extraction with code cross-references.

A string is referenced when a literal-pool load or a MOVW/MOVT pair
produces its address. Raw aligned data words holding the address are
kept apart as pointer references (tables of string pointers).
"""

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple

import numpy as np

from disasm.index import InstrIndex
from disasm.instr import Kind
from ingest.model import FirmwareImage

from .constprop import defined_value

MIN_STRING_LENGTH = 4


@dataclass(frozen=True)
class StringRef:
    addr: int
    text: str
    xrefs: FrozenSet[int] = frozenset()
    pointer_refs: FrozenSet[int] = frozenset()

    def __contains__(self, needle: str) -> bool:
        return needle.lower() in self.text.lower()


@dataclass(frozen=True)
class StringTable:
    strings: Tuple[StringRef, ...] = field(default_factory=tuple)

    def __iter__(self) -> Iterator[StringRef]:
        return iter(self.strings)

    def __len__(self) -> int:
        return len(self.strings)

    @cached_property
    def _by_addr(self) -> Dict[int, StringRef]:
        return {s.addr: s for s in self.strings}

    def at(self, addr: int) -> Optional[StringRef]:
        return self._by_addr.get(addr)

    def matching(self, needle: str) -> List[StringRef]:
        """Strings containing ``needle``, case-insensitive."""
        return [s for s in self.strings if needle in s]


def find_strings(image: FirmwareImage, index: Optional[InstrIndex] = None,
                 min_length: int = MIN_STRING_LENGTH) -> StringTable:
    pattern = re.compile(rb"[\x20-\x7e\t\r\n]{%d,}" % min_length)
    base = image.base or 0
    found = [(base + m.start(), m.group().decode("ascii")) for m in pattern.finditer(image.data)]
    if not found:
        return StringTable()

    addresses = {addr for addr, _ in found}
    # without a base, also accept references written against an offset-0 load
    aliases = {addr - base: addr for addr in addresses} if base else {}
    xrefs = _code_refs(index, addresses, aliases) if index is not None else {}
    pointers = _pointer_refs(image, addresses)

    return StringTable(tuple(
        StringRef(
            addr=addr,
            text=text,
            xrefs=frozenset(xrefs.get(addr, ())),
            pointer_refs=frozenset(pointers.get(addr, ())),
        )
        for addr, text in found
    ))


def _code_refs(index: InstrIndex, addresses: Set[int], aliases: Dict[int, int]) -> Dict[int, Set[int]]:
    refs: Dict[int, Set[int]] = {}

    def note(value: Optional[int], site: int) -> None:
        if value is None:
            return
        target = value if value in addresses else aliases.get(value)
        if target is not None:
            refs.setdefault(target, set()).add(site)

    for instr in index.of_kind(Kind.LDR_LITERAL, Kind.MOVT):
        note(defined_value(index, instr), instr.addr)
    return refs


def _pointer_refs(image: FirmwareImage, addresses: Set[int]) -> Dict[int, Set[int]]:
    size = len(image.data) // 4 * 4
    if size == 0:
        return {}
    words = np.frombuffer(image.data[:size], dtype="<u4")
    wanted = np.fromiter(sorted(addresses), dtype=np.uint64, count=len(addresses))
    hits = np.nonzero(np.isin(words.astype(np.uint64), wanted))[0]
    base = image.base or 0
    refs: Dict[int, Set[int]] = {}
    for pos in hits:
        refs.setdefault(int(words[pos]), set()).add(base + int(pos) * 4)
    return refs
