"""Run reports: what was run, on which inputs, and with which verdict."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .structure import INSUFFICIENT, REFUTED, VERIFIED

EXIT_CODES = {VERIFIED: 0, REFUTED: 1, INSUFFICIENT: 2}
_ORDER = {VERIFIED: 0, INSUFFICIENT: 1, REFUTED: 2}


def worst(statuses) -> str:
    """Combine verdicts: one refutation refutes, otherwise any truncation leaves it insufficient."""
    out = VERIFIED
    for s in statuses:
        if _ORDER[s] > _ORDER[out]:
            out = s
    return out


def inputs_digest(text: str, flags: dict) -> str:
    h = hashlib.sha256()
    h.update(text.encode("utf-8"))
    h.update(json.dumps(flags, sort_keys=True).encode("utf-8"))
    return h.hexdigest()


@dataclass
class RunReport:
    command: str
    digest: str
    window: dict
    status: str
    results: dict
    totality: dict = field(default_factory=dict)
    timing: dict | None = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def as_dict(self) -> dict:
        d = {
            "command": self.command,
            "inputs_digest": self.digest,
            "window": self.window,
            "status": self.status,
            "totality": self.totality,
            "results": self.results,
        }
        if self.timing is not None:
            d["timing"] = self.timing
        return d


def emit_report(report: RunReport) -> str:
    """Deterministic JSON text; timing is only present when it was asked for."""
    return json.dumps(report.as_dict(), indent=2, ensure_ascii=False, default=str) + "\n"
