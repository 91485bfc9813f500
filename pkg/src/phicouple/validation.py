"""Pass/fail report shared by the hypothesis validators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class ValidationReport:
    """Outcome of a sampled hypothesis check.

    ``checks`` maps sub-condition names to pass/fail. ``witnesses`` holds the
    first violating sample for each failed check. ``advisories`` are reported
    but never make the report fail.
    """

    subject: str
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    advisories: dict[str, bool] = field(default_factory=dict)
    worst_margin: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, ok: bool, witness: Any = None) -> None:
        self.checks[name] = bool(ok)
        if not ok and witness is not None:
            self.witnesses[name] = witness

    def summary(self) -> str:
        lines = [f"{self.subject}: {'PASS' if self.passed else 'FAIL'}"]
        for name, ok in self.checks.items():
            line = f"  {name:<28} {'ok' if ok else 'FAILED'}"
            if name in self.witnesses:
                line += f"  witness={self.witnesses[name]}"
            lines.append(line)
        for name, ok in self.advisories.items():
            lines.append(f"  {name:<28} {'ok' if ok else 'advisory'}")
        if self.worst_margin is not None:
            lines.append(f"  worst margin                 {self.worst_margin:.6g}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)
