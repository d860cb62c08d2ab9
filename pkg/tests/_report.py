"""Collects one summary line per acceptance criterion."""

LINES: list[str] = []


def record(name: str, ok: bool, detail: str = "") -> bool:
    LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    return ok
