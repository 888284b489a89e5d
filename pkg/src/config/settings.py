import copy
import os
from typing import Any, Dict, List, Optional

import yaml


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class Settings:
    def __init__(self, config_path: str = "config.yaml"):
        self.config_path = config_path
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file"""
        try:
            with open(self.config_path, 'r') as file:
                loaded = yaml.safe_load(file) or {}
        except FileNotFoundError:
            return self._default_config()
        return _deep_merge(self._default_config(), loaded)

    def _default_config(self) -> Dict[str, Any]:
        """Default configuration if file doesn't exist"""
        return {
            'ingest': {
                'fill': 0xFF,
                'max_gap': 16 * 1024 * 1024,
                # Nordic UICR is shipped as a separate high-address segment
                'aux_windows': [
                    {'start': 0x10001000, 'end': 0x10001FFF},
                ],
            },
            'analysis': {
                'base_alignment': 0x1000,
                'base_search_limit': 0x10000000,
                'vector_check_entries': 16,
                'max_vector_entries': 512,
                'const_window': 16,
                'barrier_window': 10,
                'min_string_length': 4,
            },
            'profiles': {
                'default': 'generic',
                'dir': os.getenv('CM_SCOPE_PROFILES'),
            },
            'batch': {
                'jobs': int(os.getenv('CM_SCOPE_JOBS', 1)),
            },
            'logging': {
                'level': os.getenv('CM_SCOPE_LOG_LEVEL', 'INFO'),
                'file': None,
                'dir': 'logs',
                'console': True,
            },
        }

    @property
    def ingest(self) -> Dict[str, Any]:
        return self.config['ingest']

    @property
    def analysis(self) -> Dict[str, Any]:
        return self.config['analysis']

    @property
    def aux_windows(self) -> List[tuple]:
        """Auxiliary (start, end) windows split off before merging, end inclusive."""
        return [(int(w['start']), int(w['end'])) for w in self.ingest.get('aux_windows') or []]

    def profiles_dir(self, override: Optional[str] = None) -> Optional[str]:
        """Flag beats environment beats config file."""
        if override:
            return override
        env_dir = os.getenv('CM_SCOPE_PROFILES')
        if env_dir:
            return env_dir
        return self.config['profiles'].get('dir')
