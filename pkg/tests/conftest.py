import pytest

from phicouple import build_grid, dof2_problem, solve


@pytest.fixture(scope="session")
def grid():
    return build_grid()


@pytest.fixture(scope="session")
def dof2():
    return dof2_problem()


@pytest.fixture(scope="session")
def dof2_run(dof2):
    return solve(dof2)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
