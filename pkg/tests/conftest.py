import json
from pathlib import Path

import numpy as np
import pytest

from lrselect import (
    AmalgamationHierarchy,
    CompositionMatrix,
    close,
    read_composition_csv,
    replace_zeros,
)

FIXTURES = Path(__file__).parent / "fixtures"


def random_composition(rng, n_samples, n_parts, groups=None) -> CompositionMatrix:
    """Strictly positive random composition with lognormal-ish spread."""
    values = np.exp(rng.normal(0.0, 1.0, size=(n_samples, n_parts)))
    return CompositionMatrix(
        values,
        tuple(f"p{j}" for j in range(n_parts)),
        tuple(str(i + 1) for i in range(n_samples)),
        groups,
    )


@pytest.fixture(scope="session")
def fatty_acids() -> CompositionMatrix:
    """The 42x40 fatty-acid dataset: zeros replaced, rows closed to 100."""
    matrix = read_composition_csv(FIXTURES / "fatty_acids.csv")
    matrix, _ = replace_zeros(matrix)
    return close(matrix, 100.0)


@pytest.fixture(scope="session")
def fatty_hierarchy_doc() -> dict:
    return json.loads((FIXTURES / "fatty_acid_hierarchy.json").read_text())


@pytest.fixture(scope="session")
def fatty_hierarchy(fatty_acids, fatty_hierarchy_doc) -> AmalgamationHierarchy:
    return AmalgamationHierarchy.from_document(
        fatty_hierarchy_doc, fatty_acids.part_names
    )
