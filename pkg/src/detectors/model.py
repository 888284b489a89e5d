"""Findings and the per-image feature matrix."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, Optional, Tuple


class Feature(str, Enum):
    PRIVILEGE_SEPARATION = "privilege_separation"
    STACK_SEPARATION = "stack_separation"
    STACK_LIMIT = "stack_limit_registers"
    SVC_LIBRARY_CALL = "svc_library_call"
    MPU = "mpu"
    SMPU = "smpu"
    STACK_CANARY = "stack_canary"
    BARRIER = "barrier_compliance"
    RTOS = "rtos"
    TASK_STACK_GUARD = "task_stack_guard"
    READBACK_PROTECTION = "readback_protection"

    @property
    def label(self) -> str:
        return FEATURE_LABELS[self]


FEATURE_LABELS = {
    Feature.PRIVILEGE_SEPARATION: "Privilege Separation",
    Feature.STACK_SEPARATION: "Stack Separation",
    Feature.STACK_LIMIT: "Stack Limit Register Usage",
    Feature.SVC_LIBRARY_CALL: "SVC for Library Call",
    Feature.MPU: "Memory Access Control (MPU)",
    Feature.SMPU: "Memory Access Control (sMPU)",
    Feature.STACK_CANARY: "Stack Canary",
    Feature.BARRIER: "Barrier after CONTROL Update*",
    Feature.RTOS: "RTOS",
    Feature.TASK_STACK_GUARD: "Task Stack Ovf. Guard*",
    Feature.READBACK_PROTECTION: "Readback Protection",
}

# rows whose percentage is over the images where the row applies
FOOTNOTED_FEATURES = frozenset({Feature.BARRIER, Feature.TASK_STACK_GUARD})


class Verdict(str, Enum):
    PRESENT = "present"
    ABSENT = "absent"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Evidence:
    address: Optional[int]
    note: str

    def __str__(self) -> str:
        where = f"0x{self.address:08x}" if self.address is not None else "-"
        return f"{where}: {self.note}"


@dataclass(frozen=True)
class Finding:
    feature: Feature
    verdict: Verdict
    evidence: Tuple[Evidence, ...] = ()
    detail: Dict[str, Any] = field(default_factory=dict)
    applicable: bool = True

    def __post_init__(self):
        if self.verdict is Verdict.PRESENT and not self.evidence:
            raise ValueError(f"{self.feature.value}: a present finding needs evidence")

    @property
    def present(self) -> bool:
        return self.verdict is Verdict.PRESENT


def indeterminate(feature: Feature, note: str, applicable: bool = True, **detail: Any) -> Finding:
    return Finding(feature, Verdict.INDETERMINATE, (Evidence(None, note),), dict(detail), applicable)


@dataclass(frozen=True)
class FeatureMatrix:
    image_id: str
    profile_id: str
    findings: Tuple[Finding, ...]
    device_id: Optional[str] = None
    base: Optional[int] = None
    errors: Tuple[str, ...] = ()
    observations: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        features = [f.feature for f in self.findings]
        if sorted(features) != sorted(Feature):
            raise ValueError("a feature matrix needs exactly one finding per feature")
        ordered = tuple(sorted(self.findings, key=lambda f: list(Feature).index(f.feature)))
        object.__setattr__(self, "findings", ordered)

    def __getitem__(self, feature: Feature) -> Finding:
        for finding in self.findings:
            if finding.feature is Feature(feature):
                return finding
        raise KeyError(feature)

    def __iter__(self) -> Iterator[Finding]:
        return iter(self.findings)

    def verdict(self, feature: Feature) -> Verdict:
        return self[feature].verdict

    @property
    def verdicts(self) -> Dict[str, str]:
        return {f.feature.value: f.verdict.value for f in self.findings}
