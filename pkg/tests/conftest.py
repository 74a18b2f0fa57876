import random
from importlib import resources

import pytest

from nocsynth.model import Core, CoreCommGraph, validate_ccg


def make_ccg(dims, edges):
    """CCG from [(w, h), ...] and [(src, dst, w), ...]."""
    cores = [Core(i, w, h) for i, (w, h) in enumerate(dims)]
    return validate_ccg(CoreCommGraph(cores, edges))


def random_ccg(n, n_edges, rng, wmin=1.0, wmax=500.0, int_dims=False):
    """Random connected-ish CCG with distinct ordered-pair edges."""
    dims = []
    for _ in range(n):
        if int_dims:
            dims.append((rng.randint(1, 4), rng.randint(1, 4)))
        else:
            dims.append((rng.uniform(1.0, 4.0), rng.uniform(1.0, 4.0)))
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    rng.shuffle(pairs)
    edges = [(a, b, rng.uniform(wmin, wmax)) for a, b in pairs[: min(n_edges, len(pairs))]]
    return make_ccg(dims, edges)


def benchmark_path(name):
    return resources.files("nocsynth.benchmarks") / f"{name}.ccg"


BENCHMARKS = [
    "mpeg4",
    "mwd",
    "vopd",
    "263decmp3dec",
    "263encmp3dec",
    "mp3encmp3dec",
    "d38_tvopd",
]


@pytest.fixture
def rng():
    return random.Random(12345)
