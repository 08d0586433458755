"""
Config Package - Application settings and per-run configuration

RunConfig lives in config.run_config and is imported from there; it depends
on the generator specs, which themselves read these settings.
"""

from .settings import Settings, get_settings

__all__ = ['Settings', 'get_settings']
