"""Loader for the stack-protector pattern families."""

import os
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import yaml

from disasm.instr import Kind

from .errors import PatternError

BUILTIN_PATTERNS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "canary_patterns.yaml")

STEP_FIELDS = frozenset({"rd", "rt", "rn", "rm", "offset", "imm"})
REGISTER_NAMES = {f"r{i}": i for i in range(13)}
REGISTER_NAMES.update({"sp": 13, "lr": 14, "pc": 15})


@dataclass(frozen=True)
class PatternStep:
    kinds: Tuple[Kind, ...]
    fields: Tuple[Tuple[str, Any], ...] = ()
    operands: Tuple[str, ...] = ()
    base_value: Optional[str] = None
    base_from: Tuple[Kind, ...] = ()


@dataclass(frozen=True)
class PatternFamily:
    name: str
    prologue: Tuple[PatternStep, ...]
    epilogue: Tuple[PatternStep, ...]
    description: str = ""


@dataclass(frozen=True)
class PatternSet:
    families: Tuple[PatternFamily, ...]
    max_gap: int = 6


def is_variable(name: Any) -> bool:
    return isinstance(name, str) and name.isupper()


def _kinds(value: Any, where: str) -> Tuple[Kind, ...]:
    values = value if isinstance(value, list) else [value]
    try:
        return tuple(Kind(v) for v in values)
    except ValueError as e:
        raise PatternError(f"{where}: {e}")


def _field_value(value: Any, where: str) -> Any:
    if is_variable(value) or isinstance(value, int):
        return value
    if isinstance(value, str) and value.lower() in REGISTER_NAMES:
        return REGISTER_NAMES[value.lower()]
    raise PatternError(f"{where}: unknown register or variable {value!r}")


def _step(document: Dict[str, Any], where: str) -> PatternStep:
    if "kind" not in document:
        raise PatternError(f"{where}: step needs a kind")
    fields = document.get("fields") or {}
    unknown = set(fields) - STEP_FIELDS
    if unknown:
        raise PatternError(f"{where}: unknown field(s) {sorted(unknown)}")
    operands = tuple(document.get("operands") or ())
    if operands and (len(operands) != 2 or not all(is_variable(o) for o in operands)):
        raise PatternError(f"{where}: operands must be two variables")
    base_value = document.get("base_value")
    if base_value is not None and not is_variable(base_value):
        raise PatternError(f"{where}: base_value must be a variable")
    return PatternStep(
        kinds=_kinds(document["kind"], where),
        fields=tuple((k, _field_value(v, where)) for k, v in sorted(fields.items())),
        operands=operands,
        base_value=base_value,
        base_from=_kinds(document["base_from"], where) if document.get("base_from") else (),
    )


def patterns_from_dict(document: Dict[str, Any]) -> PatternSet:
    families = []
    for name, body in sorted((document.get("families") or {}).items()):
        steps = {}
        for part in ("prologue", "epilogue"):
            if not body.get(part):
                raise PatternError(f"{name}: missing {part}")
            steps[part] = tuple(_step(s, f"{name}.{part}[{i}]") for i, s in enumerate(body[part]))
        families.append(PatternFamily(name=name, description=body.get("description", ""), **steps))
    if not families:
        raise PatternError("no pattern families defined")
    return PatternSet(families=tuple(families), max_gap=int(document.get("max_gap", 6)))


def load_patterns(path: Optional[str] = None) -> PatternSet:
    path = path or BUILTIN_PATTERNS
    with open(path, "r") as f:
        try:
            return patterns_from_dict(yaml.safe_load(f) or {})
        except yaml.YAMLError as e:
            raise PatternError(f"{path}: {e}")
