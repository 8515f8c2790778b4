"""Python front end for the conformal Lyapunov optimization simulator."""

import json

from . import _core
from ._core import ConfigError, capacity, min_power_for_slot

__all__ = ["ConfigError", "capacity", "min_power_for_slot", "default_scenario", "normalize", "run"]


def default_scenario():
    """Default single-hop scenario as a dict."""
    return json.loads(_core.default_scenario())


def normalize(config):
    """Validate `config` (dict) and return it with every field explicit."""
    return json.loads(_core.normalize_scenario(json.dumps(config)))


def run(config=None, seed=1):
    """Run one seed. Returns a dict with summary, certificate, frames and energy."""
    out = _core.run(json.dumps(config) if config is not None else "", seed)
    out["summary"] = json.loads(out["summary"])
    return out
