import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running timing or scale tests")
    config.addinivalue_line(
        "markers", "paperscale: full-size experiment reproduction (opt-in)"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("-m"):
        return
    skip_paper = pytest.mark.skip(reason="opt in with -m paperscale")
    for item in items:
        if "paperscale" in item.keywords:
            item.add_marker(skip_paper)
