import hashlib

import numpy as np
import pytest

from irgcouple.rng import UniformStream, pair_count, pair_index
from conftest import run_python


@pytest.mark.parametrize("seed,trial", [(0, 0), (12345, 7), (2**63 + 5, 2**40 + 3)])
def test_matches_numpy_philox(seed, trial):
    # numpy's Philox increments the counter before its first block, so its
    # output starts at our block 1 (draw index 4)
    ref = np.random.Philox(key=seed + (trial << 64)).random_raw(400)
    got = UniformStream(seed, trial).raw(4, 404)
    assert np.array_equal(ref, got)


def test_uniform_conversion_uses_top_53_bits():
    s = UniformStream(9, 2)
    raw = s.raw(0, 100, "numpy")
    u = s.uniforms(0, 100, "numpy")
    assert np.array_equal(u, (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53)
    assert u.min() >= 0.0 and u.max() < 1.0


@pytest.mark.parametrize("start,stop", [(0, 1), (3, 17), (5, 1030), (1001, 1002), (7, 7)])
def test_backends_agree(start, stop):
    s = UniformStream(77, 3)
    assert np.array_equal(s.uniforms(start, stop, "numba"), s.uniforms(start, stop, "numpy"))
    assert np.array_equal(s.raw(start, stop, "numba"), s.raw(start, stop, "numpy"))


def test_random_access_matches_sequential(backend):
    s = UniformStream(5)
    full = s.uniforms(0, 2000, backend)
    for a, b in [(0, 10), (11, 12), (999, 1500), (1997, 2000)]:
        assert np.array_equal(s.uniforms(a, b, backend), full[a:b])


def test_pair_addressing():
    n = 13
    seen = set()
    for i in range(n):
        for j in range(i + 1, n):
            seen.add(pair_index(n, i, j))
    assert seen == set(range(pair_count(n)))
    s = UniformStream(4, 1)
    allp = s.pair_uniforms(n)
    assert s.pair_uniform(n, 0, 1) == allp[0]
    assert s.pair_uniform(n, 4, 9) == allp[pair_index(n, 4, 9)]
    assert s.pair_uniform(n, n - 2, n - 1) == allp[-1]
    assert np.array_equal(s.weights(n), s.uniforms(0, n))


def test_streams_differ_by_trial_and_seed():
    a = UniformStream(1, 0).uniforms(0, 64)
    assert not np.array_equal(a, UniformStream(1, 1).uniforms(0, 64))
    assert not np.array_equal(a, UniformStream(2, 0).uniforms(0, 64))
    assert UniformStream(1).split(5) == UniformStream(1, 5)


def test_rejects_non_integer_seed():
    with pytest.raises(TypeError):
        UniformStream(1.5)
    with pytest.raises(TypeError):
        UniformStream(True)
    with pytest.raises(ValueError):
        UniformStream(1).uniforms(0, 3, "cuda")


def test_roughly_uniform():
    u = UniformStream(2024).uniforms(0, 200_000)
    assert abs(u.mean() - 0.5) < 0.005
    hist = np.bincount((u * 10).astype(int), minlength=10)
    assert np.all(np.abs(hist - 20_000) < 800)


def test_independent_of_thread_count():
    code = ("import hashlib; from irgcouple.rng import UniformStream; "
            "print(hashlib.sha256(UniformStream(3, 1).uniforms(0, 300001).tobytes()).hexdigest())")
    one = run_python(code, {"NUMBA_NUM_THREADS": "1"})
    four = run_python(code, {"NUMBA_NUM_THREADS": "4"})
    fallback = run_python(code, {"IRGCOUPLE_DISABLE_NUMBA": "1"})
    assert one == four == fallback
    assert one.strip() == hashlib.sha256(UniformStream(3, 1).uniforms(0, 300001, "numpy").tobytes()).hexdigest()
