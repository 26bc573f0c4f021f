"""Conjugacy invariants for unipotent polynomially growing outer automorphisms of free groups."""

__version__ = "0.1.0"

from pathlib import Path

DATA = Path(__file__).parent / "data"


def example_path(name: str) -> Path:
    """Path of a shipped example CT, e.g. ``example_path("running")``."""
    return DATA / f"{name}.ct"
