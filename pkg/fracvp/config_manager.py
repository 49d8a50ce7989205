"""Configuration management"""
import copy
import logging
import os

from dotenv import find_dotenv, load_dotenv

from fracvp.quad import QuadConfig

logger = logging.getLogger(__name__)

# Environment variable -> (config keys, parser)
ENV_OVERRIDES = {
    'FRACVP_LOG_LEVEL': (('logging', 'level'), str),
    'FRACVP_LOG_FILE': (('logging', 'file'), str),
    'FRACVP_WORKERS': (('sweep', 'workers'), int),
}


class ConfigManager:
    """Manages library and CLI configuration"""

    def __init__(self, overrides=None, load_env_file=True):
        if load_env_file:
            load_dotenv(find_dotenv(usecwd=True), override=False)
        self.config = self._get_default_config()
        self._apply_env_overrides()
        for keys, value in (overrides or {}).items():
            self.set(*keys, value=value)

    def _get_default_config(self):
        """Return default configuration"""
        return copy.deepcopy({
            'quad': {
                'abs_tol': 1e-10,
                'rel_tol': 1e-10,
                'max_depth': 50,
                'limit': 2000,
                'strict': True,
                'fd_step_rel': 1e-5,
                'fd_step_min': 1e-7,
            },
            'ml': {
                'abs_tol': 1e-12,
            },
            'scan': {
                'lambda_max': 60.0,
                'refine_tol': 1e-9,
            },
            'sweep': {
                'workers': 1,
            },
            'logging': {
                'level': 'WARNING',
                'file': '',
                'max_bytes': 10485760,
                'backup_count': 5,
            },
        })

    def _apply_env_overrides(self):
        """Apply FRACVP_* environment variables on top of the defaults"""
        quad_tol = os.getenv('FRACVP_QUAD_TOL')
        if quad_tol:
            try:
                tol = float(quad_tol)
                if not tol > 0:
                    raise ValueError(f"must be positive, got {tol}")
                self.config['quad']['abs_tol'] = tol
                self.config['quad']['rel_tol'] = tol
                logger.info(f"Quadrature tolerance overridden from environment: {tol}")
            except ValueError as e:
                logger.warning(f"Ignoring invalid FRACVP_QUAD_TOL={quad_tol!r}: {e}")

        for name, (keys, parser) in ENV_OVERRIDES.items():
            raw = os.getenv(name)
            if not raw:
                continue
            try:
                self.set(*keys, value=parser(raw))
            except ValueError as e:
                logger.warning(f"Ignoring invalid {name}={raw!r}: {e}")

    def get(self, *keys, default=None):
        """Get nested configuration value"""
        value = self.config
        for key in keys:
            if isinstance(value, dict):
                value = value.get(key)
                if value is None:
                    return default
            else:
                return default
        return value

    def set(self, *keys, value):
        """Set nested configuration value"""
        config = self.config
        for key in keys[:-1]:
            if key not in config:
                config[key] = {}
            config = config[key]
        config[keys[-1]] = value

    def quad_config(self, **changes) -> QuadConfig:
        """Build the default quadrature configuration"""
        params = dict(self.config['quad'])
        params.update(changes)
        return QuadConfig(**params)
