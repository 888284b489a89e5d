"""
Configuration management module.

Handles loading application settings from YAML files and environment
variables, vendor profiles, and stack-protector pattern families.
"""

from .errors import ConfigError, PatternError, ProfileError
from .patterns import PatternFamily, PatternSet, PatternStep, load_patterns, patterns_from_dict
from .profiles import (
    DEFAULT_PROFILE_ID,
    ProfileRegistry,
    ReadbackConfig,
    RtosSignature,
    StackGuardMarker,
    VendorProfile,
    load_profiles,
    profile_from_dict,
)
from .settings import Settings

__all__ = [
    "ConfigError",
    "DEFAULT_PROFILE_ID",
    "PatternError",
    "PatternFamily",
    "PatternSet",
    "PatternStep",
    "ProfileError",
    "ProfileRegistry",
    "ReadbackConfig",
    "RtosSignature",
    "Settings",
    "StackGuardMarker",
    "VendorProfile",
    "load_patterns",
    "load_profiles",
    "patterns_from_dict",
    "profile_from_dict",
]
