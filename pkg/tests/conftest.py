"""Shared fixtures. The expensive objects (n=512 kernel, geometry constants,
positone solve) are session-scoped so the whole suite pays for them once."""

import pytest

import semipositone as sp


@pytest.fixture(scope="session")
def grid512():
    return sp.make_grid(5, 512, 20.0)


@pytest.fixture(scope="session")
def grid256():
    return sp.make_grid(5, 256, 20.0)


@pytest.fixture(scope="session")
def grid128():
    return sp.make_grid(5, 128, 20.0)


@pytest.fixture(scope="session")
def example_spec():
    return sp.example_nonlinearity()


@pytest.fixture(scope="session")
def example_w():
    return sp.example_weight()


@pytest.fixture(scope="session")
def geometry512(example_spec, example_w, grid512):
    return sp.estimate_a1(example_spec, example_w, grid512)


@pytest.fixture(scope="session")
def geometry128(example_spec, example_w, grid128):
    return sp.estimate_a1(example_spec, example_w, grid128)


@pytest.fixture(scope="session")
def positone512(example_spec, example_w, grid512, geometry512):
    shifted = sp.ShiftedNonlinearity(example_spec, 0.0)
    return sp.mp_solve(shifted, example_w, grid512, None, geometry512)
