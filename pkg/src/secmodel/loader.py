"""
Model configurations from YAML documents.

MPU configuration::

    arch: v7m              # or v8m
    enable: true
    privileged_default: true
    regions:
      - {number: 0, base: 0x00000000, size: 0x40000, ap: ro/ro}     # v7m: size
      - {number: 1, base: 0x20000000, size: 0x10000, ap: rw/rw, xn: true}
      - {number: 0, base: 0x20000000, limit: 0x2000ffff, ap: rw-any} # v8m: limit

Attribution configuration::

    sau_enabled: true
    all_ns: false
    idau: [{start: 0x10000000, end: 0x1fffffff, attr: secure}]
    sau:  [{start: 0x00000000, end: 0x0003ffff, attr: nonsecure}]

Transition script::

    start: {privileged: true, state: secure, spsel: msp}
    events:
      - svc
      - exception_return: {mode: thread, spsel: psp}
      - write_control_npriv: true
      - bxns
"""

from typing import Any, Dict, List, Tuple

import yaml

from .attribution import AttributionConfig, AttributionRegion, SecurityAttr
from .context import (
    BlxnsCall,
    BxnsExit,
    Event,
    ExceptionEntry,
    ExceptionReturn,
    Mode,
    SecurityContext,
    SecurityState,
    SgEntry,
    StackPointer,
    Svc,
    WriteControlNPriv,
    WriteControlSpsel,
)
from .errors import InvalidConfig
from .mpu import MpuArch, MpuConfig, MpuRegion, Privilege, parse_ap


def read_document(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r") as handle:
            document = yaml.safe_load(handle)
    except yaml.YAMLError as e:
        raise InvalidConfig(f"{path}: {e}") from e
    if not isinstance(document, dict):
        raise InvalidConfig(f"{path}: expected a mapping at the top level")
    return document


def parse_int(value: Any, what: str) -> int:
    if isinstance(value, bool):
        raise InvalidConfig(f"{what} must be an integer")
    if isinstance(value, int):
        return value
    try:
        return int(str(value), 0)
    except ValueError:
        raise InvalidConfig(f"{what} must be an integer, got {value!r}")


def _enum(enum_type, value: Any, what: str):
    try:
        return enum_type(str(value).lower())
    except ValueError:
        choices = ", ".join(m.value for m in enum_type)
        raise InvalidConfig(f"{what} must be one of {choices}, got {value!r}")


def mpu_region_from_dict(raw: Dict[str, Any], arch: MpuArch) -> MpuRegion:
    if not isinstance(raw, dict):
        raise InvalidConfig(f"MPU region must be a mapping, got {raw!r}")
    try:
        number = parse_int(raw["number"], "region number")
        base = parse_int(raw["base"], f"region {number} base")
        ap = parse_ap(arch, raw["ap"])
    except KeyError as e:
        raise InvalidConfig(f"MPU region is missing {e}") from e
    xn = bool(raw.get("xn", False))
    enabled = bool(raw.get("enabled", True))

    if arch is MpuArch.V7M:
        if "size" not in raw:
            raise InvalidConfig(f"v7m region {number} needs a size")
        return MpuRegion.v7m(number, base, parse_int(raw["size"], f"region {number} size"), ap, xn,
                             parse_int(raw.get("subregion_disable", 0), "subregion_disable"), enabled)
    if "limit" not in raw:
        raise InvalidConfig(f"v8m region {number} needs an inclusive limit")
    return MpuRegion.v8m(number, base, parse_int(raw["limit"], f"region {number} limit"), ap, xn,
                         bool(raw.get("pxn", False)), enabled)


def mpu_config_from_dict(document: Dict[str, Any]) -> MpuConfig:
    arch = _enum(MpuArch, document.get("arch", "v7m"), "arch")
    regions = tuple(mpu_region_from_dict(r, arch) for r in document.get("regions") or [])
    return MpuConfig(
        regions=regions,
        enable=bool(document.get("enable", True)),
        privileged_default=bool(document.get("privileged_default", False)),
        max_regions=parse_int(document.get("max_regions", 8), "max_regions"),
        pxn_supported=bool(document.get("pxn_supported", False)),
        arch=arch,
        hfnmi_enable=bool(document.get("hfnmi_enable", False)),
    )


def _attribution_regions(raw: Any, unit: str) -> Tuple[AttributionRegion, ...]:
    regions = []
    for entry in raw or []:
        try:
            regions.append(AttributionRegion(
                parse_int(entry["start"], f"{unit} start"),
                parse_int(entry["end"], f"{unit} end"),
                SecurityAttr.parse(entry["attr"]),
            ))
        except (KeyError, TypeError) as e:
            raise InvalidConfig(f"{unit} region needs start, end and attr: {entry!r}") from e
    return tuple(regions)


def attribution_from_dict(document: Dict[str, Any]) -> AttributionConfig:
    return AttributionConfig(
        idau_regions=_attribution_regions(document.get("idau"), "IDAU"),
        sau_regions=_attribution_regions(document.get("sau"), "SAU"),
        sau_enabled=bool(document.get("sau_enabled", True)),
        all_ns=bool(document.get("all_ns", False)),
    )


def context_from_dict(raw: Dict[str, Any]) -> SecurityContext:
    raw = raw or {}
    mode = _enum(Mode, raw.get("mode", "thread"), "mode")
    state = _enum(SecurityState, raw.get("state", "secure"), "state")
    spsel = _enum(StackPointer, raw.get("spsel", "msp"), "spsel")
    privileged = bool(raw.get("privileged", True))
    if mode is Mode.HANDLER:
        return _handler_context(privileged, state, spsel, bool(raw.get("npriv", False)))
    return SecurityContext.thread(privileged, state, spsel)


def _handler_context(privileged: bool, state: SecurityState, spsel: StackPointer, npriv: bool) -> SecurityContext:
    priv = Privilege.PRIVILEGED if privileged else Privilege.UNPRIVILEGED
    return SecurityContext(Mode.HANDLER, priv, state, spsel, npriv)


_SIMPLE_EVENTS = {
    "svc": Svc,
    "sg": SgEntry,
    "sg_entry": SgEntry,
    "bxns": BxnsExit,
    "bxns_exit": BxnsExit,
    "blxns": BlxnsCall,
    "blxns_call": BlxnsCall,
    "exception_entry": ExceptionEntry,
    "exception_return": ExceptionReturn,
}


def event_from_value(raw: Any) -> Event:
    if isinstance(raw, str):
        key = raw.strip().lower()
        if key not in _SIMPLE_EVENTS:
            raise InvalidConfig(f"unknown event: {raw!r}")
        return _SIMPLE_EVENTS[key]()
    if not isinstance(raw, dict) or len(raw) != 1:
        raise InvalidConfig(f"event must be a name or a single-key mapping: {raw!r}")

    (name, args), = raw.items()
    name = str(name).lower()
    if name == "write_control_npriv":
        return WriteControlNPriv(bool(args))
    if name == "write_control_spsel":
        return WriteControlSpsel(bool(args))
    args = args or {}
    if name == "exception_entry":
        state = args.get("state")
        return ExceptionEntry(None if state is None else _enum(SecurityState, state, "state"))
    if name == "exception_return":
        state = args.get("state")
        return ExceptionReturn(
            _enum(Mode, args.get("mode", "thread"), "mode"),
            _enum(StackPointer, args.get("spsel", "msp"), "spsel"),
            None if state is None else _enum(SecurityState, state, "state"),
        )
    if name in _SIMPLE_EVENTS:
        return _SIMPLE_EVENTS[name]()
    raise InvalidConfig(f"unknown event: {name!r}")


def transition_script_from_dict(document: Dict[str, Any]) -> Tuple[SecurityContext, List[Event]]:
    start = context_from_dict(document.get("start"))
    events = [event_from_value(e) for e in document.get("events") or []]
    return start, events
