"""Architectural feature ledger for the Cortex-M cores."""

from dataclasses import asdict, dataclass
from typing import Dict, Optional


@dataclass(frozen=True)
class CoreFeatures:
    name: str
    arch: str  # v6m, v7m, v8m
    max_mpu_regions: int
    trustzone: bool
    max_sau_regions: int
    pxn: bool
    stack_limit: bool
    unprivileged_ldst: bool

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


CORES: Dict[str, CoreFeatures] = {
    core.name: core for core in (
        CoreFeatures("cortex-m0", "v6m", 0, False, 0, False, False, False),
        CoreFeatures("cortex-m1", "v6m", 0, False, 0, False, False, False),
        CoreFeatures("cortex-m0+", "v6m", 8, False, 0, False, False, False),
        CoreFeatures("cortex-m3", "v7m", 8, False, 0, False, False, True),
        CoreFeatures("cortex-m4", "v7m", 8, False, 0, False, False, True),
        CoreFeatures("cortex-m7", "v7m", 16, False, 0, False, False, True),
        CoreFeatures("cortex-m23", "v8m", 16, True, 8, False, True, True),
        CoreFeatures("cortex-m33", "v8m", 16, True, 8, False, True, True),
        CoreFeatures("cortex-m35p", "v8m", 16, True, 8, False, True, True),
        CoreFeatures("cortex-m55", "v8m", 16, True, 8, True, True, True),
        CoreFeatures("cortex-m85", "v8m", 16, True, 8, True, True, True),
    )
}


def core_features(name: Optional[str]) -> Optional[CoreFeatures]:
    if not name:
        return None
    return CORES.get(name.lower())


def mpu_arch(name: Optional[str]) -> str:
    """MPU programming model for a core; v7m when unknown."""
    core = core_features(name)
    return "v8m" if core is not None and core.arch == "v8m" else "v7m"
