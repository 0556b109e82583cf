from pathlib import Path

import pytest

from normkit.dsl import parse_schema

REPO = Path(__file__).resolve().parent.parent
SCHEMAS = REPO / "schemas"
GOLDENS = Path(__file__).resolve().parent / "data" / "goldens"


def read_schema(name: str):
    return parse_schema((SCHEMAS / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def t12():
    """Twelve-attribute sample: 5 FDs, 2 MVDs, key {A, D, H, I}."""
    return read_schema("T12.nfs")


@pytest.fixture(scope="session")
def t14():
    """Fourteen-attribute sample for the counting method, declared key {A, E}."""
    return read_schema("T14.nfs")


@pytest.fixture(scope="session")
def rentacar():
    """Car-rental sample used by the quiz pipeline."""
    return read_schema("rent_a_car.nfs")
