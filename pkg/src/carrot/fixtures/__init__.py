"""Bundled minilang programs and input-case files."""

from importlib import resources


def path(name: str):
    """Filesystem path of a bundled fixture, e.g. ``path("partial_id.mini")``."""
    return resources.files(__name__) / name


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
