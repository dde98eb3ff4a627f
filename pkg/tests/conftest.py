"""Shared builders for the test suite."""

from __future__ import annotations

from fractions import Fraction

import pytest

from vcsp.structures import Signature, ValuedStructure

BINARY_SIG = Signature.of(("edge", 2))


def structure(domain_size: int, table, name: str = "edge",
              arity: int = 2) -> ValuedStructure:
    return ValuedStructure(
        Signature.of((name, arity)), domain_size, {name: table}
    )


@pytest.fixture
def soft_neq() -> ValuedStructure:
    """Cost 1 on equal pairs, 0 on distinct pairs, over {0,1}."""
    return structure(2, [1, 0, 0, 1])


@pytest.fixture
def soft_eq() -> ValuedStructure:
    """Cost 0 on equal pairs, 1 on distinct pairs (submodular)."""
    return structure(2, [0, 1, 1, 0])


@pytest.fixture
def triangle() -> ValuedStructure:
    """Three variables, an edge term on each cyclic pair."""
    return structure(3, [0, 1, 0, 0, 0, 1, 1, 0, 0])


@pytest.fixture
def crisp_neq() -> ValuedStructure:
    """Hard disequality over {0,1}: infinite on equal pairs."""
    return structure(2, ["inf", 0, 0, "inf"])


def frozen(value) -> Fraction:
    return Fraction(value)
