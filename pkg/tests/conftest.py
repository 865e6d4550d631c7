import pathlib

import numpy as np
import pytest

from bestpair import extract_best_pair, run_ashlwb
from bestpair.cli import load_problem

PROBLEMS = pathlib.Path(__file__).resolve().parent.parent / "problems"


@pytest.fixture(scope="session")
def two_ball_parsed():
    return load_problem(str(PROBLEMS / "two_balls.json"))


@pytest.fixture(scope="session")
def lens_parsed():
    return load_problem(str(PROBLEMS / "lens.json"))


@pytest.fixture(scope="session")
def boxes_parsed():
    return load_problem(str(PROBLEMS / "boxes.json"))


@pytest.fixture(scope="session")
def two_ball_run(two_ball_parsed):
    problem = two_ball_parsed.problem
    trace = run_ashlwb(problem)
    return problem, trace, extract_best_pair(trace, problem)


@pytest.fixture(scope="session")
def lens_run(lens_parsed):
    problem = lens_parsed.problem
    trace = run_ashlwb(problem)
    return problem, trace, extract_best_pair(trace, problem)


@pytest.fixture()
def rng():
    return np.random.default_rng(20230413)
