"""
JSON serialization of feature matrices.

Document layout (schema version 1)::

    {
      "schema_version": 1,
      "image": "...", "profile": "generic", "device": null, "base": "0x08000000",
      "verdicts": {"privilege_separation": "present", ...},
      "features": {
        "privilege_separation": {
          "verdict": "present", "applicable": true,
          "evidence": [{"address": "0x08000120", "note": "..."}],
          "detail": {...}
        }, ...
      },
      "errors": [], "observations": {...}
    }

Keys are sorted so that equal matrices serialize to identical bytes.
"""

import json
from typing import Any, Dict, Optional

from detectors.model import Evidence, Feature, FeatureMatrix, Finding, Verdict

from .errors import SchemaError

SCHEMA_VERSION = 1


def _hex(value: Optional[int]) -> Optional[str]:
    return None if value is None else f"0x{value:08x}"


def _int(value: Optional[str]) -> Optional[int]:
    if value is None:
        return None
    try:
        return int(value, 16)
    except (TypeError, ValueError):
        raise SchemaError(f"expected a hex address, got {value!r}")


def finding_to_dict(finding: Finding) -> Dict[str, Any]:
    return {
        "verdict": finding.verdict.value,
        "applicable": finding.applicable,
        "evidence": [{"address": _hex(e.address), "note": e.note} for e in finding.evidence],
        "detail": finding.detail,
    }


def matrix_to_dict(matrix: FeatureMatrix) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "image": matrix.image_id,
        "profile": matrix.profile_id,
        "device": matrix.device_id,
        "base": _hex(matrix.base),
        "verdicts": matrix.verdicts,
        "features": {f.feature.value: finding_to_dict(f) for f in matrix.findings},
        "errors": list(matrix.errors),
        "observations": matrix.observations,
    }


def to_json(matrix: FeatureMatrix, indent: Optional[int] = 2) -> str:
    return json.dumps(matrix_to_dict(matrix), indent=indent, sort_keys=True)


def finding_from_dict(name: str, document: Dict[str, Any]) -> Finding:
    try:
        feature = Feature(name)
        verdict = Verdict(document["verdict"])
        evidence = tuple(Evidence(_int(e["address"]), e["note"]) for e in document["evidence"])
        return Finding(feature, verdict, evidence, dict(document.get("detail") or {}),
                       bool(document.get("applicable", True)))
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"bad finding {name!r}: {e}") from e


def matrix_from_dict(document: Dict[str, Any]) -> FeatureMatrix:
    if not isinstance(document, dict):
        raise SchemaError("report must be a JSON object")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version: {version!r}")
    try:
        findings = tuple(finding_from_dict(name, body) for name, body in document["features"].items())
        return FeatureMatrix(
            image_id=document["image"],
            profile_id=document["profile"],
            findings=findings,
            device_id=document.get("device"),
            base=_int(document.get("base")),
            errors=tuple(document.get("errors") or ()),
            observations=dict(document.get("observations") or {}),
        )
    except (KeyError, AttributeError) as e:
        raise SchemaError(f"missing field: {e}") from e
    except ValueError as e:
        raise SchemaError(str(e)) from e


def from_json(text: str) -> FeatureMatrix:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not JSON: {e}") from e
    return matrix_from_dict(document)
