"""Bundled example models."""

from __future__ import annotations

from importlib import resources

from .dsl import parse_act
from .model import Act


def bundled_model_text(name: str = "mia") -> str:
    """Source text of a bundled model (currently just ``mia``)."""
    return resources.files(__package__).joinpath(f"data/{name}.act").read_text(encoding="utf-8")


def load_bundled(name: str = "mia") -> Act:
    """Parse a bundled model; ``mia`` is the malicious-insider example."""
    return parse_act(bundled_model_text(name))
