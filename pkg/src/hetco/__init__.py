"""Coordinate heterogeneous behavioural models through a broker and verify them."""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def asset_path(*parts: str) -> Path:
    """Path of a bundled asset, e.g. ``asset_path("levelcrossing", "levelcrossing.system.json")``."""
    return Path(str(resources.files(__name__).joinpath("assets", *parts)))
