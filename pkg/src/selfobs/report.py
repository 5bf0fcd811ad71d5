"""Reports produced by the command-line driver, as text or JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .diagonal import Certificate
from .search import SearchReport
from .verdict import Verdict

SCHEMA_VERSION = 1


@dataclass
class Report:
    command: str
    files: list[str] = field(default_factory=list)
    flags: dict[str, Any] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    certificates: list[Certificate] = field(default_factory=list)
    search: SearchReport | None = None
    errors: list[str] = field(default_factory=list)
    status: str = "pass"

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs": {"files": list(self.files), "flags": dict(sorted(self.flags.items()))},
            "status": self.status,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "certificates": [c.to_dict() for c in self.certificates],
        }
        if self.search is not None:
            out["search"] = self.search.to_dict(timing=timing)
        if self.errors:
            out["errors"] = list(self.errors)
        return out


def render_structured(report: Report, timing: bool = True) -> str:
    return json.dumps(report.to_dict(timing), indent=2, sort_keys=True) + "\n"


def _scalar(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_scalar(x)}" for k, x in v.items()) + "}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    return str(v)


def verdict_line(v: dict[str, Any]) -> str:
    if v["ok"]:
        tag = "PASS"
    else:
        tag = "WARN" if v.get("severity") == "warning" else "FAIL"
    line = f"{tag} {v['check']}"
    if v.get("detail"):
        line += f": {v['detail']}"
    if v.get("witness"):
        line += "  (" + ", ".join(f"{k}={_scalar(x)}" for k, x in v["witness"].items()) + ")"
    return line


def render_text(report: Report, timing: bool = True) -> str:
    """Human-readable form carrying the same fields as the JSON form."""
    d = report.to_dict(timing)
    lines = [f"{d['command']}: {d['status']}"]
    if d["inputs"]["files"]:
        lines.append("files: " + " ".join(d["inputs"]["files"]))
    for err in d.get("errors", []):
        lines.append(f"error: {err}")
    lines += [verdict_line(v) for v in d["verdicts"]]
    for c in d["certificates"]:
        lines.append(f"certificate {c['kind']} (focus {c['focus']}, quantify {c['quantify']})")
        if c.get("note"):
            lines.append(f"  note: {c['note']}")
        for i, step in enumerate(c["trace"], 1):
            lines.append(f"  {i}. {step['claim']}")
            lines.append(f"     {step['equation']}")
            lines.append(f"     values: {_scalar(step['values'])}")
    s = d.get("search")
    if s:
        for key in ("bounds", "mode", "seed", "samples", "quantify", "inversion_mode",
                    "models_examined", "rejected", "premise_satisfying", "pa_perfect_found",
                    "contradictions"):
            lines.append(f"{key}: {_scalar(s[key])}")
        for name, tally in s["theorem_tallies"].items():
            lines.append(f"{name}: {_scalar(tally)}")
        for cx in s["counterexamples"]:
            lines.append(f"counterexample: {_scalar(cx)}")
        if "duration" in s:
            lines.append(f"duration: {s['duration']}")
    return "\n".join(lines) + "\n"
