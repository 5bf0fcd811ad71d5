"""Bundled example models."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

NAMES = ("bitobs", "broken", "self2", "selfdiag", "spin1")
VALID = ("bitobs", "self2", "selfdiag", "spin1")


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(f"{name}.spm")))


def text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
