"""Session fixtures: one small simulated batch shared by the slower tests."""

import numpy as np
import pytest

from abmemu.design import generate_design, scale_design, ParamRanges
from abmemu.pipeline import run_batch, write_runs_csv


@pytest.fixture(scope="session")
def small_records():
    """24 simulated runs over the default ranges (sequential, seed 7)."""
    ranges = ParamRanges.defaults()
    design = generate_design("lptau", 24, ranges)
    matrix = scale_design(design, ranges)
    return run_batch(matrix, base_seed=7)


@pytest.fixture(scope="session")
def runs_csv(tmp_path_factory, small_records):
    path = tmp_path_factory.mktemp("runs") / "runs_24.csv"
    write_runs_csv(path, small_records)
    return path


