"""
Load-base inference for raw images.

Hard constraints come from the vector table that every Cortex-M image
starts with; the soft score counts how many odd words in the image
point at plausible code once the image is placed at a candidate base.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

import numpy as np

from disasm.decoder import decodable_mask, prologue_mask
from ingest.model import FirmwareImage

from .errors import NoViableBase
from .memory_map import MemoryMap
from .vector_table import is_valid_sp

logger = logging.getLogger(__name__)

DEFAULT_ALIGNMENT = 0x1000
DEFAULT_SEARCH_LIMIT = 0x10000000
VECTOR_CHECK_ENTRIES = 16
MIN_IMAGE_SIZE = 64


@dataclass(frozen=True)
class BaseCandidate:
    base: int
    score: Fraction
    evidence: Dict[str, int] = field(default_factory=dict)


def default_candidates(
    alignment: int = DEFAULT_ALIGNMENT,
    limit: int = DEFAULT_SEARCH_LIMIT,
    declared: Optional[int] = None,
) -> List[int]:
    candidates = list(range(0, limit + 1, alignment))
    if declared is not None and declared not in candidates:
        candidates.append(declared)
    return sorted(candidates)


def infer_base_address(
    image: FirmwareImage,
    candidates: Optional[Iterable[int]] = None,
    alignment: int = DEFAULT_ALIGNMENT,
    limit: int = DEFAULT_SEARCH_LIMIT,
    declared: Optional[int] = None,
    vector_entries: int = VECTOR_CHECK_ENTRIES,
    memory_map: Optional[MemoryMap] = None,
) -> BaseCandidate:
    data = image.data
    size = len(data)
    if size < MIN_IMAGE_SIZE:
        raise NoViableBase(f"image of {size} bytes is too small for a vector table")

    words = np.frombuffer(data[:size // 4 * 4], dtype="<u4").astype(np.int64)
    if not is_valid_sp(int(words[0]), memory_map):
        raise NoViableBase(f"first word 0x{int(words[0]):08x} is not a valid initial SP")

    vectors = words[1:1 + vector_entries]
    if vectors[0] == 0 or np.any((vectors != 0) & ((vectors & 1) == 0)):
        raise NoViableBase("vector table entries are not Thumb pointers")
    targets = vectors[vectors != 0] & ~1
    # every vector must land in [b, b + size)
    low = int(targets.max()) - size + 1
    high = int(targets.min())

    viable = _viable_bases(candidates, alignment, limit, declared, low, high)
    if not viable:
        raise NoViableBase(f"no candidate base in [0x{max(low, 0):08x}, 0x{high:08x}]")

    pointers = words[(words & 1) == 1] & ~1
    decodable = decodable_mask(data)
    prologue = prologue_mask(data)
    total = len(words)

    best: Optional[BaseCandidate] = None
    for base in viable:
        offsets = pointers - base
        in_range = (offsets >= 0) & (offsets < size - 1) & ((offsets & 1) == 0)
        halfwords = (offsets[in_range] >> 1).astype(np.int64)
        hits = int(decodable[halfwords].sum())
        entries = int((decodable[halfwords] & prologue[halfwords]).sum())
        candidate = BaseCandidate(
            base=base,
            score=Fraction(hits + entries, 2 * total),
            evidence={
                "vectors_checked": int(len(vectors)),
                "pointer_words": int(len(pointers)),
                "decodable_hits": hits,
                "prologue_hits": entries,
                "words": total,
            },
        )
        if best is None or candidate.score > best.score:
            best = candidate

    logger.debug(f"inferred base 0x{best.base:08x} (score {float(best.score):.4f}) "
                 f"from {len(viable)} viable candidate(s)")
    return best


def _viable_bases(candidates, alignment, limit, declared, low, high) -> List[int]:
    if candidates is not None:
        pool = set(candidates)
        if declared is not None:
            pool.add(declared)
        return sorted(b for b in pool if low <= b <= high and b >= 0)
    first = max(0, -(-low // alignment) * alignment)
    pool = set(range(first, min(high, limit) + 1, alignment))
    if declared is not None and low <= declared <= high:
        pool.add(declared)
    return sorted(pool)
