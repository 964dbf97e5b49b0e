import pytest

from siphlink import PathwaySet, apply_pathways, builtin_platforms

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def platforms():
    p45, p32, psi = builtin_platforms()
    return {"45nm-soi": p45, "32nm-soi": p32, "poly-si": psi}


@pytest.fixture(scope="session")
def variant(platforms):
    def make(platform: str, pathways: str = "vanilla"):
        return apply_pathways(platforms[platform], PathwaySet.parse(pathways))

    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
