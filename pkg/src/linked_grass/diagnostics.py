from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """Outcome of a checker: named clause failures plus non-normative notes."""

    check: str
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)
    clauses: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok

    def fail(self, clause: str, message: str):
        self.clauses[clause] = False
        self.failures.append(f"{clause}: {message}")

    def passed(self, clause: str):
        self.clauses.setdefault(clause, True)

    def expect(self, clause: str, cond: bool, message: str):
        if cond:
            self.passed(clause)
        else:
            self.fail(clause, message)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "pass": self.ok,
            "failures": list(self.failures),
            "notes": list(self.notes),
            "flags": list(self.flags),
        }

    def __str__(self):
        head = f"{self.check}: {'pass' if self.ok else 'FAIL'}"
        lines = [head] + [f"  - {f}" for f in self.failures] + [f"  * {n}" for n in self.notes] + [f"  ! {x}" for x in self.flags]
        return "\n".join(lines)
