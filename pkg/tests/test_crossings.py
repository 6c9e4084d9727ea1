import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from truncvar import crossing_counts, crossing_integral, make_path, normalized_variation, variation_triple
from truncvar.crossings import crossing_integrals, normalized_crossing_curve

from .strategies import paths

band = st.floats(min_value=0.01, max_value=5.0)


class TestCounts:
    def test_zigzag(self, zigzag):
        tr = crossing_counts(zigzag, 0.25, 0.5)
        assert (tr.u, tr.d, tr.n) == (2, 1, 3)

    def test_single_rise_trace(self):
        tr = crossing_counts(make_path([0, 1], [0, 1]), 0.25, 0.5)
        assert tr.u == 1 and tr.up_taus == [0] and tr.up_sigmas == [0, 1]
        assert tr.d == 0 and tr.down_taus == [1] and tr.down_sigmas == [0]

    def test_constant(self):
        tr = crossing_counts(make_path([0, 1, 2], [1, 1, 1]), 0.0, 0.5)
        assert tr.u == tr.d == 0

    def test_tied_level_is_strict(self):
        # touching y + eps exactly is not a visit above the band
        tr = crossing_counts(make_path([0, 1, 2], [0, 0.5, -1]), 0.0, 0.5)
        assert tr.d == 0

    def test_window(self, zigzag):
        assert crossing_counts(zigzag, 0.25, 0.5, window=(0, 1)).u == 1

    @pytest.mark.parametrize("window", [(1, 1), (2, 1), (0, 10)])
    def test_bad_window(self, zigzag, window):
        with pytest.raises(ValueError):
            crossing_counts(zigzag, 0.25, 0.5, window=window)

    @given(paths(min_size=2), st.floats(-20, 20), band)
    def test_interleaving(self, p, y, eps):
        tr = crossing_counts(p, y, eps)
        for sig, tau in ((tr.down_sigmas, tr.down_taus), (tr.up_sigmas, tr.up_taus)):
            seq = [sig[0]]
            for k, t in enumerate(tau):
                seq.append(t)
                if k + 1 < len(sig):
                    seq.append(sig[k + 1])
            assert seq == sorted(seq)
            assert len(tau) in (len(sig) - 1, len(sig))

    @given(paths(min_size=3), st.floats(-20, 20), band, st.data())
    def test_window_monotone(self, p, y, eps, data):
        b1 = data.draw(st.integers(1, len(p) - 1))
        small = crossing_counts(p, y, eps, window=(0, p.times[b1]))
        big = crossing_counts(p, y, eps)
        assert small.u <= big.u and small.d <= big.d


class TestIntegrals:
    @pytest.mark.parametrize("which, expected", [("up", 1.0), ("down", 0.5), ("total", 1.5)])
    def test_zigzag(self, zigzag, which, expected):
        assert crossing_integral(zigzag, 0.5, which) == pytest.approx(expected)

    def test_bad_which(self, zigzag):
        with pytest.raises(ValueError):
            crossing_integral(zigzag, 0.5, "sideways")

    def test_needs_positive_eps(self, zigzag):
        with pytest.raises(ValueError):
            crossing_integral(zigzag, 0.0)

    @given(paths(), band)
    def test_reproduce_truncated_variation(self, p, eps):
        v = variation_triple(p, eps)
        up, down, total = crossing_integrals(p.values, eps)
        assert abs(up - v.utv) <= 1e-9 * (1 + v.utv)
        assert abs(down - v.dtv) <= 1e-9 * (1 + v.dtv)
        assert abs(total - v.ttv) <= 1e-9 * (1 + v.ttv)

    def test_brute_force_quadrature(self, rng):
        x = rng.standard_normal(30).cumsum()
        p = make_path(np.arange(30), x)
        ys = np.linspace(x.min() - 1.3, x.max() + 0.2, 20001)
        dy = ys[1] - ys[0]
        mids = ys[:-1] + dy / 2
        n = sum(crossing_counts(p, y, 0.7).n for y in mids)
        assert n * dy == pytest.approx(crossing_integral(p, 0.7), rel=5e-3)


def test_normalized_curve_matches_variation(zigzag):
    curves = normalized_crossing_curve(zigzag, [0.5, 0.2], [1, 3])
    for eps, (up, down, total) in curves.items():
        ref = normalized_variation(zigzag, eps)
        assert (up[-1], down[-1], total[-1]) == pytest.approx((ref.utv, ref.dtv, ref.ttv))


def test_normalized_curve_constant():
    curves = normalized_crossing_curve(make_path([0, 1], [2, 2]), [0.1], [0, 1])
    assert all(not c.any() for c in curves[0.1])
