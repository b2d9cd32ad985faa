import pytest


def pytest_addoption(parser):
    parser.addoption("--run-t2", action="store_true", default=False,
                     help="run tier-2 checks (tens of minutes)")
    parser.addoption("--run-t3", action="store_true", default=False,
                     help="run tier-3 checks (hours)")


def pytest_collection_modifyitems(config, items):
    skip_t2 = pytest.mark.skip(reason="tier-2: pass --run-t2 to enable")
    skip_t3 = pytest.mark.skip(reason="tier-3: pass --run-t3 to enable")
    for item in items:
        if "t2" in item.keywords and not config.getoption("--run-t2"):
            item.add_marker(skip_t2)
        if "t3" in item.keywords and not config.getoption("--run-t3"):
            item.add_marker(skip_t3)
