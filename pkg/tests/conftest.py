from pathlib import Path

import pytest

from prxml.serialization import parse_prxml, parse_xdoc

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

# criterion name -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def fig1():
    return parse_prxml((CORPUS / "fig1.prxml").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fig1_w1():
    return parse_xdoc((CORPUS / "fig1-w1.xml.sexp").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fig1_root():
    return parse_xdoc((CORPUS / "fig1-root.xml.sexp").read_text(encoding="utf-8"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split(".")[0])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
