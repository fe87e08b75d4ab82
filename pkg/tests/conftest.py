import pytest

from homoglab.distmonoid import truncated_monoid
from homoglab.families.bipede import BipedeFamily, build_bipede
from homoglab.families.crosscut import CrosscutFamily, CrosscutSpec
from homoglab.families.omegapede import OmegapedeFamily, build_omegapede
from homoglab.families.urysohn import UrysohnFamily


@pytest.fixture(scope="session")
def R012():
    return truncated_monoid([0, 1, 2])


@pytest.fixture(scope="session")
def R0134():
    return truncated_monoid([0, 1, 3, 4])


@pytest.fixture(scope="session")
def urysohn012(R012):
    return UrysohnFamily(R012).build(20, 2)


@pytest.fixture(scope="session")
def urysohn0134(R0134):
    return UrysohnFamily(R0134).build(None, 1)


@pytest.fixture(scope="session")
def crosscut333():
    return CrosscutFamily().fragment(CrosscutSpec(3, 3, 3))


@pytest.fixture(scope="session")
def bipede_frag():
    return BipedeFamily().fragment(build_bipede(6, 2, 3))


@pytest.fixture(scope="session")
def omegapede_frag():
    return OmegapedeFamily().fragment(build_omegapede(3, 4, 3, 1))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
