"""Named-identity check reports shared by the verification entry points."""

from __future__ import annotations

from dataclasses import dataclass, field

from .scalars import VerificationResult, combine_results


@dataclass(frozen=True)
class Identity:
    """One named identity together with its verification outcome."""

    name: str
    result: VerificationResult

    def line(self) -> str:
        mark = "ok" if self.result.holds else ("??" if not self.result.decided else "FAIL")
        return f"  [{mark:4s}] {self.name}: {self.result}"


@dataclass
class CheckReport:
    """A flat list of named identities produced by one check."""

    name: str
    items: list[Identity] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, result: VerificationResult) -> VerificationResult:
        self.items.append(Identity(name, result))
        return result

    def note(self, text: str) -> None:
        self.notes.append(text)

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for item in other.items:
            self.items.append(Identity(f"{prefix}{item.name}", item.result))
        for n in other.notes:
            self.notes.append(f"{prefix}{n}")

    def get(self, name: str) -> VerificationResult:
        for item in self.items:
            if item.name == name:
                return item.result
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(item.result.holds for item in self.items)

    @property
    def combined(self) -> VerificationResult:
        return combine_results(item.result for item in self.items)

    def lines(self) -> list[str]:
        out = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        out.extend(item.line() for item in self.items)
        out.extend(f"  note: {n}" for n in self.notes)
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())
