import os
import subprocess
import sys

import pytest

from irgcouple.graph import new_graph


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    return request.param


@pytest.fixture
def no_numba(monkeypatch):
    monkeypatch.setenv("IRGCOUPLE_DISABLE_NUMBA", "1")


def run_python(code, env_extra=None):
    env = dict(os.environ)
    env.update(env_extra or {})
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def random_graph(rng, n, p):
    edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if rng.random() < p]
    return new_graph(n, edges)
