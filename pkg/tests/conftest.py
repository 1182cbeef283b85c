import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def catalog():
    from singweight.lattice import build_catalog

    return build_catalog()


@pytest.fixture(scope="session")
def by_id():
    from singweight.lattice import catalog_by_id

    return catalog_by_id()


@pytest.fixture(scope="session")
def reports():
    from singweight.classifier import classify_catalog

    return {r.lattice_id: r for r in classify_catalog()}


@pytest.fixture(scope="session")
def table_4p4(by_id):
    from singweight.eisenstein import expansion_table

    return expansion_table(by_id["n3_2_7p1_4p4"], 12)
