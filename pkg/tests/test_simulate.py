import math

import numpy as np
import pytest

from truncvar import SimConfig, correlated_brownian_pair, generate, jumps
from truncvar.simulate import chambers_mallows_stuck, metadata


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            {"kind": "levy"},
            {"T": 0.0},
            {"n": 1},
            {"n": 2.5},
            {"sigma": -1.0},
            {"lam": -0.1},
            {"kind": "alpha_stable", "alpha": 2.0},
            {"stable_scale": 0.0},
        ],
    )
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            SimConfig(**kw)

    def test_metadata_records_rng(self):
        meta = metadata(SimConfig(seed=9))
        assert meta["rng"] == "numpy.random.PCG64" and meta["config"]["seed"] == 9


class TestGenerate:
    @pytest.mark.parametrize("kind", ["brownian", "compound_poisson", "jump_diffusion", "alpha_stable"])
    def test_deterministic(self, kind):
        cfg = SimConfig(kind=kind, n=512, lam=5.0, seed=77)
        a, b = generate(cfg), generate(cfg)
        assert a.values.tobytes() == b.values.tobytes() and a.times.tobytes() == b.times.tobytes()

    def test_brownian_shape(self):
        p = generate(SimConfig(n=2, seed=1))
        assert len(p) == 3 and p.values[0] == 0.0 and p.horizon == 1.0

    def test_no_jumps_means_constant(self):
        p = generate(SimConfig(kind="compound_poisson", lam=0.0, n=64))
        assert not p.values.any()

    def test_brownian_increment_statistics(self):
        n, sigma = 100_000, 1.3
        d = np.diff(generate(SimConfig(n=n, sigma=sigma, seed=3)).values)
        var = sigma**2 / n
        assert abs(d.mean()) <= 5 * math.sqrt(var / n)
        assert abs(d.var() - var) <= 5 * var * math.sqrt(2 / n)

    @pytest.mark.parametrize("seed", range(5))
    def test_poisson_count(self, seed):
        lam, T = 5.0, 2.0
        p = generate(SimConfig(kind="compound_poisson", lam=lam, T=T, n=256, seed=seed))
        assert abs(len(jumps(p, T)) - lam * T) <= 5 * math.sqrt(lam * T)

    def test_jump_diffusion_grid_contains_both(self):
        cfg = SimConfig(kind="jump_diffusion", lam=20.0, n=128, seed=8)
        p = generate(cfg)
        assert np.isin(np.linspace(0, 1, 129), p.times).all()
        assert len(p) == 129 + int(p.jump_mask.sum())
        assert np.all(np.diff(p.times) > 0)

    def test_jump_diffusion_continuous_part_only_on_grid(self):
        p = generate(SimConfig(kind="jump_diffusion", lam=20.0, n=128, seed=8))
        base = generate(SimConfig(kind="brownian", n=128, seed=8))
        on_grid = np.isin(p.times, base.times)
        jump_total = np.cumsum(np.where(p.jump_mask, np.diff(p.values, prepend=0.0), 0.0))
        assert np.allclose(p.values[on_grid] - jump_total[on_grid], base.values)


class TestStable:
    @pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
    def test_characteristic_function(self, alpha):
        z = chambers_mallows_stuck(alpha, 200_000, np.random.default_rng(1))
        for u in (0.5, 1.0, 2.0):
            emp = np.mean(np.cos(u * z))
            assert emp == pytest.approx(math.exp(-(u**alpha)), abs=0.01)

    def test_symmetric(self):
        z = chambers_mallows_stuck(1.5, 200_000, np.random.default_rng(2))
        assert abs(np.median(z)) < 0.02

    def test_marks_every_increment_as_jump(self):
        p = generate(SimConfig(kind="alpha_stable", n=64, seed=1))
        assert p.jump_mask is None


class TestPair:
    def test_rho_one_identical(self):
        x, y = correlated_brownian_pair(SimConfig(n=256, seed=4), 1.0)
        assert np.array_equal(x.values, y.values)

    def test_rho_zero_uncorrelated(self):
        x, y = correlated_brownian_pair(SimConfig(n=100_000, seed=4), 0.0)
        r = np.corrcoef(np.diff(x.values), np.diff(y.values))[0, 1]
        assert abs(r) < 5 / math.sqrt(100_000)

    def test_rejects_bad_rho(self):
        with pytest.raises(ValueError):
            correlated_brownian_pair(SimConfig(), 1.5)
