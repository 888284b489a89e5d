"""Weakness audit of an MPU configuration against the memory map."""

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Tuple

from image.memory_map import MemoryMap, default_memory_map

from .mpu import Access, Decision, MpuConfig, Privilege, eval_mpu_access

ADDRESS_LIMIT = 1 << 32


class IssueKind(str, Enum):
    MPU_DISABLED = "mpu_disabled"
    EXECUTABLE_SRAM = "executable_sram"
    WRITABLE_AND_EXECUTABLE = "writable_and_executable"
    NO_UNPRIVILEGED_RESTRICTION = "no_unprivileged_restriction"


@dataclass(frozen=True)
class Issue:
    kind: IssueKind
    address: Optional[int] = None
    note: str = ""


def elementary_ranges(cfg: MpuConfig, memory_map: MemoryMap) -> Iterator[Tuple[int, int]]:
    """
    Split the address space into ranges over which every access decision
    is constant; yields (start, end) with end exclusive.
    """
    bounds = {0, ADDRESS_LIMIT}
    for region in memory_map.regions:
        bounds.update((region.start, region.end + 1))
    for region in cfg.regions:
        if region.enabled:
            bounds.update((region.base, region.limit + 1))
            bounds.update(region.subregion_bounds())
    ordered = sorted(b for b in bounds if 0 <= b <= ADDRESS_LIMIT)
    return zip(ordered, ordered[1:])


def audit_mpu_config(cfg: MpuConfig, memory_map: Optional[MemoryMap] = None) -> List[Issue]:
    memory_map = memory_map or default_memory_map()
    issues = []
    if not cfg.enable:
        issues.append(Issue(IssueKind.MPU_DISABLED, note="MPU_CTRL.ENABLE is clear"))

    executable_sram = writable_executable = None
    restricted = False
    for start, _ in elementary_ranges(cfg, memory_map):
        decisions = {
            (priv, access): eval_mpu_access(cfg, memory_map, start, priv, access) is Decision.ALLOW
            for priv in Privilege for access in Access
        }
        executable = any(decisions[(p, Access.EXECUTE)] for p in Privilege)
        if executable and executable_sram is None and memory_map.classify(start).is_ram:
            executable_sram = start
        if writable_executable is None and any(
            decisions[(p, Access.WRITE)] and decisions[(p, Access.EXECUTE)] for p in Privilege
        ):
            writable_executable = start
        if any(decisions[(Privilege.PRIVILEGED, a)] != decisions[(Privilege.UNPRIVILEGED, a)] for a in Access):
            restricted = True

    if executable_sram is not None:
        issues.append(Issue(IssueKind.EXECUTABLE_SRAM, executable_sram, "RAM is executable"))
    if writable_executable is not None:
        issues.append(Issue(IssueKind.WRITABLE_AND_EXECUTABLE, writable_executable, "memory is both writable and executable"))
    if not restricted:
        issues.append(Issue(IssueKind.NO_UNPRIVILEGED_RESTRICTION,
                            note="unprivileged code has the same rights as privileged code everywhere"))
    return issues
