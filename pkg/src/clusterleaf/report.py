"""Structured verification reports with text and key/value rendering."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: Optional[str] = None
    informational: bool = False


@dataclass
class VerificationReport:
    """Named checks collected by a pipeline.

    Informational checks are rendered but never affect ``passed``.
    """

    title: str
    checks: List[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "", witness=None, informational: bool = False) -> bool:
        w = None if witness is None else str(witness)
        self.checks.append(Check(name, bool(passed), detail, w, informational))
        return bool(passed)

    def info(self, name: str, detail: str) -> None:
        self.add(name, True, detail, informational=True)

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail, c.witness, c.informational))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed and not c.informational]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_text(self) -> str:
        lines = [f"== {self.title} =="]
        for c in self.checks:
            tag = "INFO" if c.informational else ("PASS" if c.passed else "FAIL")
            line = f"[{tag}] {c.name}"
            if c.detail:
                line += f": {c.detail}"
            lines.append(line)
            if c.witness is not None and not c.passed:
                lines.append(f"       witness: {c.witness}")
        verdict = "PASS" if self.passed else "FAIL"
        n_ok = sum(1 for c in self.checks if c.passed and not c.informational)
        n_all = sum(1 for c in self.checks if not c.informational)
        lines.append(f"-- {verdict} ({n_ok}/{n_all} checks)")
        return "\n".join(lines)

    def to_kv(self) -> str:
        key = self.title.replace(" ", "_")
        lines = [f"report={key}", f"passed={str(self.passed).lower()}"]
        for c in self.checks:
            k = c.name.replace(" ", "_")
            status = "info" if c.informational else ("pass" if c.passed else "fail")
            lines.append(f"{key}.{k}.status={status}")
            if c.detail:
                lines.append(f"{key}.{k}.detail={c.detail}")
            if c.witness is not None and not c.passed:
                lines.append(f"{key}.{k}.witness={c.witness}")
        return "\n".join(lines)

    def __str__(self):
        return self.to_text()
