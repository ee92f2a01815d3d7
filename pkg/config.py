"""
Configuration management for the bipolar community detection toolkit
"""

import os
import copy
import yaml
from typing import Any, Dict, Optional
from pathlib import Path
import logging

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: Dict[str, Any] = {
    'shapley': {
        'exact_cap': 24,
        'samples': 20000,
        'tolerance': 1e-10
    },
    'louvain': {
        'min_gain': 1e-12,
        'check_caches': False
    },
    'reproduce': {
        'iterations': 100,
        'gammas': [0.0],
        'seed': 0,
        'n_jobs': 1
    },
    'logging': {
        'level': 'INFO',
        'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    }
}

# environment variable -> (dot key, converter)
ENV_OVERRIDES = {
    'BDL_LOG_LEVEL': ('logging.level', str),
    'BDL_N_JOBS': ('reproduce.n_jobs', int),
    'BDL_SEED': ('reproduce.seed', int),
    'BDL_ITERATIONS': ('reproduce.iterations', int),
    'BDL_EXACT_CAP': ('shapley.exact_cap', int),
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge override into a copy of base"""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class Config:
    """Configuration manager"""

    def __init__(self, config_file: Optional[str] = None):
        self.config_file = config_file or os.getenv('BDL_CONFIG_FILE', 'config.yaml')
        self.config: Dict[str, Any] = {}
        self.load_config()

    def load_config(self):
        """Load configuration from file"""
        if Path(self.config_file).exists():
            with open(self.config_file, 'r') as f:
                loaded = yaml.safe_load(f) or {}
            self.config = _merge(DEFAULT_CONFIG, loaded)
            logger.info(f"Loaded configuration from {self.config_file}")
        else:
            logger.warning(f"Config file {self.config_file} not found, using defaults")
            self.config = copy.deepcopy(DEFAULT_CONFIG)

        self._apply_env_overrides()

    def _apply_env_overrides(self):
        """Apply environment variable overrides"""
        for env_name, (key, convert) in ENV_OVERRIDES.items():
            raw = os.getenv(env_name)
            if raw:
                self.set(key, convert(raw))

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by dot notation key"""
        value = self.config
        for k in key.split('.'):
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            else:
                return default
        return value

    def set(self, key: str, value: Any):
        """Set configuration value by dot notation key"""
        keys = key.split('.')
        config = self.config
        for k in keys[:-1]:
            config = config.setdefault(k, {})
        config[keys[-1]] = value

