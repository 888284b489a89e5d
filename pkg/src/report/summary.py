"""
Corpus-level aggregation of feature matrices.

A summary is a bag of counters, so merging is plain addition: it is
associative and commutative, and batch workers can aggregate any
partition of the corpus and fold the partial results in any order.
"""

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Dict, FrozenSet, Iterable, Optional

from detectors.model import FOOTNOTED_FEATURES, Feature, FeatureMatrix, Finding, Verdict

from .errors import EmptyCorpus

NOT_APPLICABLE = "-"
_CENT = Decimal("0.01")


@dataclass(frozen=True)
class RowCounts:
    present: int = 0
    absent: int = 0
    indeterminate: int = 0
    # subset of the indeterminate findings that do not apply to the image
    not_applicable: int = 0

    @property
    def images(self) -> int:
        return self.present + self.absent + self.indeterminate

    def applicable(self, feature: Feature) -> int:
        """Denominator of the percentage column."""
        if feature in FOOTNOTED_FEATURES:
            return self.present + self.absent
        return self.images - self.not_applicable

    def percentage(self, feature: Feature) -> Optional[Decimal]:
        return percentage(self.present, self.applicable(feature))

    def __add__(self, other: "RowCounts") -> "RowCounts":
        return RowCounts(
            self.present + other.present,
            self.absent + other.absent,
            self.indeterminate + other.indeterminate,
            self.not_applicable + other.not_applicable,
        )

    @classmethod
    def of(cls, finding: Finding) -> "RowCounts":
        excluded = int(finding.verdict is Verdict.INDETERMINATE and not finding.applicable)
        return cls(
            present=int(finding.verdict is Verdict.PRESENT),
            absent=int(finding.verdict is Verdict.ABSENT),
            indeterminate=int(finding.verdict is Verdict.INDETERMINATE),
            not_applicable=excluded,
        )


def _empty_rows() -> Dict[Feature, RowCounts]:
    return {feature: RowCounts() for feature in Feature}


@dataclass(frozen=True)
class GroupSummary:
    images: int = 0
    errored: int = 0
    devices: FrozenSet[str] = frozenset()
    rows: Dict[Feature, RowCounts] = field(default_factory=_empty_rows)

    def __add__(self, other: "GroupSummary") -> "GroupSummary":
        return GroupSummary(
            images=self.images + other.images,
            errored=self.errored + other.errored,
            devices=self.devices | other.devices,
            rows={f: self.rows[f] + other.rows[f] for f in Feature},
        )


@dataclass(frozen=True)
class CorpusSummary:
    """Per-profile groups; the Total column is derived from them."""
    groups: Dict[str, GroupSummary]

    @property
    def group_ids(self):
        return sorted(self.groups)

    @property
    def total(self) -> GroupSummary:
        result = GroupSummary()
        for group_id in self.group_ids:
            result = result + self.groups[group_id]
        return result

    @property
    def images(self) -> int:
        return self.total.images

    def row(self, feature: Feature, group_id: Optional[str] = None) -> RowCounts:
        group = self.total if group_id is None else self.groups[group_id]
        return group.rows[Feature(feature)]


def device_key(matrix: FeatureMatrix) -> str:
    """Images without a device id each count as their own device."""
    return f"device:{matrix.device_id}" if matrix.device_id is not None else f"image:{matrix.image_id}"


def summarize_matrix(matrix: FeatureMatrix) -> CorpusSummary:
    group = GroupSummary(
        images=1,
        errored=int(bool(matrix.errors)),
        devices=frozenset({device_key(matrix)}),
        rows={finding.feature: RowCounts.of(finding) for finding in matrix.findings},
    )
    return CorpusSummary({matrix.profile_id: group})


def merge(a: CorpusSummary, b: CorpusSummary) -> CorpusSummary:
    groups = dict(a.groups)
    for group_id, group in b.groups.items():
        groups[group_id] = groups[group_id] + group if group_id in groups else group
    return CorpusSummary(groups)


def aggregate(matrices: Iterable[FeatureMatrix]) -> CorpusSummary:
    summary = None
    for matrix in matrices:
        single = summarize_matrix(matrix)
        summary = single if summary is None else merge(summary, single)
    if summary is None:
        raise EmptyCorpus()
    return summary


def percentage(present: int, applicable: int) -> Optional[Decimal]:
    if applicable == 0:
        return None
    return (Decimal(present) * 100 / Decimal(applicable)).quantize(_CENT, rounding=ROUND_HALF_UP)


def format_percentage(value: Optional[Decimal]) -> str:
    """Two decimals, half-up; a missing denominator prints as a dash."""
    if value is None:
        return NOT_APPLICABLE
    return f"{Decimal(value).quantize(_CENT, rounding=ROUND_HALF_UP)}%"


def format_ratio(ratio: Decimal) -> str:
    return format_percentage(Decimal(ratio) * 100)


def _group_to_dict(group: GroupSummary) -> Dict[str, Any]:
    features = {}
    for feature in Feature:
        row = group.rows[feature]
        features[feature.value] = {
            "present": row.present,
            "absent": row.absent,
            "indeterminate": row.indeterminate,
            "not_applicable": row.not_applicable,
            "applicable": row.applicable(feature),
            "percentage": format_percentage(row.percentage(feature)),
        }
    return {
        "images": group.images,
        "errored": group.errored,
        "devices": len(group.devices),
        "features": features,
    }


def summary_to_dict(summary: CorpusSummary) -> Dict[str, Any]:
    return {
        "groups": {group_id: _group_to_dict(summary.groups[group_id]) for group_id in summary.group_ids},
        "total": _group_to_dict(summary.total),
    }
