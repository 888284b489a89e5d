"""
Vendor profiles.

A profile bundles the vendor-specific knowledge the detectors need:
sMPU register addresses, the readback-protection word and its
predicate, RTOS signature strings and stack-guard markers. Profiles are
YAML files; a profile may ``extends`` another and override its keys.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import yaml

from .errors import ProfileError
from .settings import _deep_merge

logger = logging.getLogger(__name__)

BUILTIN_PROFILES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "profiles")
DEFAULT_PROFILE_ID = "generic"


@dataclass(frozen=True)
class ReadbackConfig:
    segment: int
    offset: int
    mask: int = 0xFFFFFFFF
    enabled_values: Tuple[int, ...] = ()
    disabled_values: Tuple[int, ...] = ()

    @property
    def address(self) -> int:
        return self.segment + self.offset

    def is_enabled(self, word: int) -> bool:
        value = word & self.mask
        if self.enabled_values:
            return value in self.enabled_values
        return value not in self.disabled_values


@dataclass(frozen=True)
class RtosSignature:
    name: str
    substrings: Tuple[str, ...]


@dataclass(frozen=True)
class StackGuardMarker:
    rtos: str
    markers: Tuple[str, ...]


@dataclass(frozen=True)
class VendorProfile:
    id: str
    vendor: str = "generic"
    core: Optional[str] = None
    fill: Optional[int] = None          # None: the ingest setting applies
    aux_windows: Tuple[Tuple[int, int], ...] = ()
    smpu_mmio_addresses: FrozenSet[int] = frozenset()
    readback: Optional[ReadbackConfig] = None
    rtos_signatures: Tuple[RtosSignature, ...] = ()
    stack_guard_strings: Tuple[StackGuardMarker, ...] = ()
    description: str = ""

    @property
    def has_smpu(self) -> bool:
        return bool(self.smpu_mmio_addresses)

    def ingest_options(self, fill: int, aux_windows: Sequence[Tuple[int, int]]) -> Dict[str, Any]:
        """Loader fill and aux windows: the profile fill wins, windows from both apply."""
        windows = list(aux_windows)
        windows += [w for w in self.aux_windows if w not in windows]
        return {"fill": fill if self.fill is None else self.fill, "aux_windows": windows}

    def guard_markers(self, rtos: str) -> Tuple[str, ...]:
        for entry in self.stack_guard_strings:
            if entry.rtos.lower() == rtos.lower():
                return entry.markers
        return ()


def _int(value: Any, what: str) -> int:
    try:
        return value if isinstance(value, int) else int(str(value), 0)
    except ValueError:
        raise ProfileError(f"{what}: not an integer: {value!r}")


def profile_from_dict(document: Dict[str, Any]) -> VendorProfile:
    if not isinstance(document, dict) or not document.get("id"):
        raise ProfileError("profile document needs an 'id'")
    pid = str(document["id"])

    readback = None
    if document.get("readback"):
        rb = document["readback"]
        readback = ReadbackConfig(
            segment=_int(rb.get("segment"), f"{pid}.readback.segment"),
            offset=_int(rb.get("offset", 0), f"{pid}.readback.offset"),
            mask=_int(rb.get("mask", 0xFFFFFFFF), f"{pid}.readback.mask"),
            enabled_values=tuple(_int(v, f"{pid}.readback") for v in rb.get("enabled_values") or ()),
            disabled_values=tuple(_int(v, f"{pid}.readback") for v in rb.get("disabled_values") or ()),
        )
        if not readback.enabled_values and not readback.disabled_values:
            raise ProfileError(f"{pid}: readback needs enabled_values or disabled_values")

    try:
        signatures = tuple(
            RtosSignature(name=str(s["name"]), substrings=tuple(str(x) for x in s["substrings"]))
            for s in document.get("rtos_signatures") or ()
        )
        guards = tuple(
            StackGuardMarker(rtos=str(g["rtos"]), markers=tuple(str(x) for x in g["markers"]))
            for g in document.get("stack_guard_strings") or ()
        )
        windows = tuple(
            (_int(w["start"], f"{pid}.aux_windows"), _int(w["end"], f"{pid}.aux_windows"))
            for w in document.get("aux_windows") or ()
        )
    except (KeyError, TypeError) as e:
        raise ProfileError(f"{pid}: malformed profile entry: {e}")

    return VendorProfile(
        id=pid,
        vendor=str(document.get("vendor", "generic")),
        core=document.get("core"),
        fill=None if document.get("fill") is None else _int(document["fill"], f"{pid}.fill"),
        aux_windows=windows,
        smpu_mmio_addresses=frozenset(_int(a, f"{pid}.smpu") for a in document.get("smpu_mmio_addresses") or ()),
        readback=readback,
        rtos_signatures=signatures,
        stack_guard_strings=guards,
        description=str(document.get("description", "")),
    )


class ProfileRegistry:
    """Profiles by id; built-ins first, then an optional extra directory."""

    def __init__(self, extra_dir: Optional[str] = None):
        self._documents: Dict[str, Dict[str, Any]] = {}
        self._profiles: Dict[str, VendorProfile] = {}
        self._load_dir(BUILTIN_PROFILES_DIR, builtin=True)
        if extra_dir:
            if not os.path.isdir(extra_dir):
                raise ProfileError(f"profiles directory not found: {extra_dir}")
            self._load_dir(extra_dir, builtin=False)

    def _load_dir(self, directory: str, builtin: bool) -> None:
        seen_here = set()
        for name in sorted(os.listdir(directory)):
            if not name.endswith((".yaml", ".yml")):
                continue
            path = os.path.join(directory, name)
            with open(path, "r") as f:
                try:
                    document = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    raise ProfileError(f"{path}: {e}")
            pid = document.get("id")
            if not pid:
                raise ProfileError(f"{path}: profile has no id")
            if pid in seen_here or (builtin and pid in self._documents):
                raise ProfileError(f"duplicate profile id: {pid}")
            if pid in self._documents:
                logger.info(f"profile '{pid}' from {path} overrides the built-in")
            seen_here.add(pid)
            self._documents[pid] = document
        self._profiles.clear()

    def __contains__(self, pid: str) -> bool:
        return pid in self._documents

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._documents))

    def ids(self) -> List[str]:
        return sorted(self._documents)

    def get(self, pid: Optional[str] = None) -> VendorProfile:
        pid = pid or DEFAULT_PROFILE_ID
        if pid not in self._profiles:
            self._profiles[pid] = profile_from_dict(self._resolve(pid, ()))
        return self._profiles[pid]

    def _resolve(self, pid: str, chain: Tuple[str, ...]) -> Dict[str, Any]:
        if pid not in self._documents:
            raise ProfileError(f"unknown profile: {pid}")
        if pid in chain:
            raise ProfileError(f"profile inheritance cycle: {' -> '.join(chain + (pid,))}")
        document = dict(self._documents[pid])
        parent = document.pop("extends", None)
        if parent is None:
            return document
        return _deep_merge(self._resolve(parent, chain + (pid,)), document)


def load_profiles(extra_dir: Optional[str] = None) -> ProfileRegistry:
    return ProfileRegistry(extra_dir)
