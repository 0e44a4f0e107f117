"""Shared paths and helpers for the test-suite."""

from __future__ import annotations

from pathlib import Path

from dcprofiles.kbtext import parse_kb_text

FIXTURES = Path(__file__).parent / "fixtures"

# (criterion, passed, detail) lines collected by the acceptance tests and
# printed again in the terminal summary.
ACCEPTANCE: list[tuple[str, bool, str]] = []


def kb(text: str):
    return parse_kb_text(text.strip() + "\n")


def report(criterion: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE.append((criterion, passed, detail))
    print(line)
