"""Shared pytest plumbing.

The terminal-summary hook prints one PASS/FAIL line per acceptance criterion
(the ``test_c*`` functions in test_acceptance.py) so the end of a full run
shows the acceptance ledger at a glance, even without -s.
"""

# Labels for the acceptance summary, keyed by test-function prefix.
_CRITERIA = [
    ("test_c01", "criterion 1 (first-order self-convergence)"),
    ("test_c02_efield", "criterion 2 (field error magnitudes)"),
    ("test_c02_fnorm", "criterion 2 (f error magnitudes)"),
    ("test_c03", "criterion 3 (positivity at every step)"),
    ("test_c04", "criterion 4 (zero-field conservation)"),
    ("test_c05", "criterion 5 (Maxwellian stationarity)"),
    ("test_c06", "criterion 6 (relaxation limits)"),
    ("test_c07", "criterion 7 (field solve oracle)"),
    ("test_c08", "criterion 8 (moment round-trip)"),
    ("test_c09", "criterion 9 (stability bounds ledger)"),
    ("test_c10", "criterion 10 (bit-identical reports)"),
]


def _outcome(reports, prefix):
    hits = [r for r in reports if f"::{prefix}" in r.nodeid or f"::{prefix}[" in r.nodeid]
    if not hits:
        return None
    if any(r.outcome == "failed" for r in hits):
        return "FAIL"
    if any(getattr(r, "wasxfail", None) is not None for r in hits):
        return "FAIL (expected; documented convention mismatch)"
    return "PASS"


def pytest_terminal_summary(terminalreporter):
    reports = []
    for key in ("passed", "failed", "xfailed", "xpassed"):
        reports.extend(terminalreporter.stats.get(key, []))
    reports = [r for r in reports if "test_acceptance" in r.nodeid]
    if not reports:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for prefix, label in _CRITERIA:
        outcome = _outcome(reports, prefix)
        if outcome is not None:
            terminalreporter.write_line(f"{label}: {outcome}")
