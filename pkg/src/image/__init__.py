"""
Cortex-M image model: physical memory map, load-base inference and
vector-table parsing.
"""

from .base_address import BaseCandidate, default_candidates, infer_base_address
from .cores import CORES, CoreFeatures, core_features, mpu_arch
from .errors import ImageError, InvalidInitialSp, InvalidResetVector, NoViableBase, TableTruncated
from .memory_map import MemoryMap, MemoryRegion, RegionClass, classify_address, default_memory_map
from .vector_table import VectorTable, parse_vector_table

__all__ = [
    "BaseCandidate",
    "CORES",
    "CoreFeatures",
    "ImageError",
    "InvalidInitialSp",
    "InvalidResetVector",
    "MemoryMap",
    "MemoryRegion",
    "NoViableBase",
    "RegionClass",
    "TableTruncated",
    "VectorTable",
    "classify_address",
    "core_features",
    "default_candidates",
    "default_memory_map",
    "infer_base_address",
    "mpu_arch",
    "parse_vector_table",
]
