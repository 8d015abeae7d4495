"""Structured pass/fail reports returned by the validators."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    passed: bool | None  # None: not applicable / skipped
    witness: Any = None
    note: str = ""

    def line(self) -> str:
        status = {True: "ok", False: "FAIL", None: "skip"}[self.passed]
        out = f"{status} {self.name}"
        if self.witness is not None:
            out += f" witness={self.witness}"
        if self.note:
            out += f" ({self.note})"
        return out


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool | None, witness: Any = None, note: str = "") -> Check:
        c = Check(name, passed, witness, note)
        self.checks.append(c)
        return c

    @property
    def checked(self) -> int:
        return sum(c.passed is not None for c in self.checks)

    @property
    def n_passed(self) -> int:
        return sum(c.passed is True for c in self.checks)

    @property
    def ok(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.passed is False]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def summary(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.title} axioms={self.n_passed}/{self.checked}"

    def lines(self) -> list[str]:
        return [self.summary()] + ["  " + c.line() for c in self.checks]
