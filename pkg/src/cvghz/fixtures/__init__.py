"""Shipped data files: measured targets and the matching fitted config."""

from importlib import resources
from pathlib import Path

__all__ = ["fixture_path", "fixture_text"]


def fixture_path(name: str) -> Path:
    """Filesystem path of a shipped fixture (``paper.targets`` etc.)."""
    path = resources.files(__package__).joinpath(name)
    return Path(str(path))


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")
