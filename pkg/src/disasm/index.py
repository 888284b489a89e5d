import bisect
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from ingest.model import FirmwareImage

from .instr import BRANCH_KINDS, Instr, Kind


@dataclass(frozen=True)
class InstrIndex:
    """Decoded instructions keyed by address, plus the entry points that seeded them."""
    instrs: Dict[int, Instr]
    entry_points: FrozenSet[int]
    data_addresses: FrozenSet[int] = frozenset()
    exhausted: bool = True
    image: Optional[FirmwareImage] = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.instrs)

    def __contains__(self, addr: int) -> bool:
        return addr in self.instrs

    def __iter__(self) -> Iterator[Instr]:
        for addr in self.addresses:
            yield self.instrs[addr]

    def get(self, addr: int) -> Optional[Instr]:
        return self.instrs.get(addr)

    @cached_property
    def addresses(self) -> Tuple[int, ...]:
        return tuple(sorted(self.instrs))

    @cached_property
    def branch_targets(self) -> FrozenSet[int]:
        """Addresses entered by a direct branch or call, plus entry points."""
        targets = set(self.entry_points)
        for instr in self.instrs.values():
            if instr.kind in BRANCH_KINDS and instr.target is not None:
                targets.add(instr.target)
        return frozenset(targets)

    def of_kind(self, *kinds: Kind) -> List[Instr]:
        wanted = set(kinds)
        return [i for i in self if i.kind in wanted]

    def position(self, addr: int) -> int:
        """Index of ``addr`` in address order; addr must be decoded."""
        pos = bisect.bisect_left(self.addresses, addr)
        if pos >= len(self.addresses) or self.addresses[pos] != addr:
            raise KeyError(addr)
        return pos

    def following(self, addr: int, count: int) -> List[Instr]:
        """Up to ``count`` decoded instructions after ``addr`` in address order."""
        pos = self.position(addr) + 1
        return [self.instrs[a] for a in self.addresses[pos:pos + count]]

    def previous(self, addr: int) -> Optional[Instr]:
        """The instruction ending exactly at ``addr``, if decoded."""
        pos = bisect.bisect_left(self.addresses, addr) - 1
        if pos < 0:
            return None
        prev = self.instrs[self.addresses[pos]]
        return prev if prev.next_addr == addr else None

    def read_word(self, addr: int) -> Optional[int]:
        if self.image is None:
            return None
        return self.image.read_u32(addr)
