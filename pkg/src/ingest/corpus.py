"""
Corpus manifests and batch enumeration.

A manifest is a YAML document::

    entries:
      - path: nrf/app.hex
        profile: nordic
        device: dk-52
        base: 0x0
      - path: stm/fw.bin
        format: raw
"""

import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import yaml

from .errors import IngestError, ManifestError
from .loader import load_file
from .merge import DEFAULT_FILL, DEFAULT_MAX_GAP
from .model import CorpusManifest, FirmwareImage, ManifestEntry, SourceFormat

logger = logging.getLogger(__name__)

_FORMAT_ALIASES = {
    "raw": SourceFormat.RAW, "bin": SourceFormat.RAW,
    "intel_hex": SourceFormat.INTEL_HEX, "ihex": SourceFormat.INTEL_HEX, "hex": SourceFormat.INTEL_HEX,
    "srecord": SourceFormat.SRECORD, "srec": SourceFormat.SRECORD, "s19": SourceFormat.SRECORD,
}


@dataclass(frozen=True)
class CorpusError:
    """A manifest entry that failed to load."""
    entry: ManifestEntry
    error: Exception

    def __str__(self) -> str:
        return f"{self.entry.path}: {type(self.error).__name__}: {self.error}"


def parse_format(value: Optional[str]) -> Optional[SourceFormat]:
    if value is None:
        return None
    try:
        return _FORMAT_ALIASES[str(value).lower()]
    except KeyError:
        raise ManifestError(f"unknown format hint: {value!r}")


def parse_address(value: Any) -> Optional[int]:
    if value is None:
        return None
    if isinstance(value, int):
        return value
    try:
        return int(str(value), 0)
    except ValueError:
        raise ManifestError(f"invalid address: {value!r}")


def parse_manifest(document: Dict[str, Any], root: str = ".") -> CorpusManifest:
    if not isinstance(document, dict) or not isinstance(document.get("entries"), list):
        raise ManifestError("manifest must contain an 'entries' list")
    entries = []
    for index, raw in enumerate(document["entries"]):
        if not isinstance(raw, dict) or "path" not in raw:
            raise ManifestError(f"entry {index} has no path")
        path = str(raw["path"])
        if not os.path.isabs(path):
            path = os.path.normpath(os.path.join(root, path))
        entries.append(ManifestEntry(
            path=path,
            format=parse_format(raw.get("format")),
            profile=raw.get("profile"),
            device=None if raw.get("device") is None else str(raw["device"]),
            base=parse_address(raw.get("base")),
        ))
    try:
        return CorpusManifest(entries=tuple(entries))
    except ValueError as e:
        raise ManifestError(str(e)) from e


def load_manifest(path: str) -> CorpusManifest:
    try:
        with open(path, "r") as handle:
            document = yaml.safe_load(handle)
    except (OSError, yaml.YAMLError) as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from e
    return parse_manifest(document, root=os.path.dirname(os.path.abspath(path)))


def load_entry(
    entry: ManifestEntry,
    fill: int = DEFAULT_FILL,
    max_gap: int = DEFAULT_MAX_GAP,
    aux_windows: Sequence[Tuple[int, int]] = (),
) -> FirmwareImage:
    """
    Load one manifest entry and attach its metadata.

    A declared base places HEX and S-record images directly. Raw images
    stay unplaced and carry it as ``declared_base`` for base inference.
    """
    image = load_file(
        entry.path,
        format_hint=entry.format,
        fill=fill,
        max_gap=max_gap,
        aux_windows=aux_windows,
    )
    if entry.base is not None and image.base is not None:
        image = image.with_base(entry.base)
    return image.with_metadata(
        profile=entry.profile,
        device=entry.device,
        declared_base=None if entry.base is None else f"0x{entry.base:08x}",
    )


def walk_corpus(
    manifest: CorpusManifest,
    errors: Optional[List[CorpusError]] = None,
    **load_kwargs,
) -> Iterator[FirmwareImage]:
    """
    Yield one image per manifest entry, in manifest order.

    Entries that fail to decode are appended to ``errors`` and skipped.
    """
    for entry in manifest:
        try:
            yield load_entry(entry, **load_kwargs)
        except (IngestError, OSError) as e:
            logger.warning(f"skipping {entry.path}: {e}")
            if errors is not None:
                errors.append(CorpusError(entry, e))
