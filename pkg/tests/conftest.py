"""Shared test helpers and the acceptance-criteria summary table."""

from __future__ import annotations

import re
from collections import defaultdict

from mlqueues import BosonicMLQ, BosonicWord, FermionicMLQ, FermionicWord


def fw(text: str) -> FermionicWord:
    """Parse a compact digit string like '3252035' into a fermionic word."""
    return FermionicWord(tuple(int(c) for c in text))


def bw(text: str) -> BosonicWord:
    """Parse '233,-,2235,25' (dash or empty for an empty site) into a bosonic word."""
    sites = []
    for part in text.split(","):
        part = part.strip()
        sites.append(() if part in ("", "-") else tuple(int(c) for c in part))
    return BosonicWord(tuple(sites))


def fq(n: int, *rows) -> FermionicMLQ:
    return FermionicMLQ(n, tuple(tuple(r) for r in rows))


def bq(n: int, *rows) -> BosonicMLQ:
    return BosonicMLQ(n, tuple(tuple(r) for r in rows))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion."""
    buckets: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for status in ("passed", "failed", "error", "xfailed", "xpassed"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            m = re.search(r"test_criterion_(\d+)", nodeid)
            if m:
                buckets[m.group(1)][status] += 1
    if not buckets:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for crit in sorted(buckets, key=int):
        counts = buckets[crit]
        bad = counts.get("failed", 0) + counts.get("error", 0) + counts.get("xpassed", 0)
        verdict = "PASS" if bad == 0 else "FAIL"
        detail = f"{counts.get('passed', 0)} checks"
        if counts.get("xfailed"):
            detail += f", {counts['xfailed']} pinned upstream inconsistency (expected fail, see notes)"
        if bad:
            detail += f", {bad} FAILING"
        terminalreporter.write_line(f"criterion {crit}: {verdict} ({detail})")
