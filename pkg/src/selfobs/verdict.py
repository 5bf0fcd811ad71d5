"""Outcome of a single named check, with the least witness on failure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Verdict:
    check: str
    ok: bool
    detail: str = ""
    witness: dict[str, Any] = field(default_factory=dict)
    severity: str = "error"

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls, check: str, detail: str = "", **witness: Any) -> "Verdict":
        return cls(check, True, detail, dict(witness))

    @classmethod
    def failed(cls, check: str, detail: str = "", **witness: Any) -> "Verdict":
        return cls(check, False, detail, dict(witness))

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"check": self.check, "ok": self.ok}
        if self.detail:
            out["detail"] = self.detail
        if self.witness:
            out["witness"] = {k: _plain(v) for k, v in sorted(self.witness.items())}
        if self.severity != "error":
            out["severity"] = self.severity
        return out


def _plain(value: Any) -> Any:
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, list):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in sorted(value.items())}
    if hasattr(value, "text"):
        return value.text
    return value
