import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from truncvar import PathError, jumps, left_limit_at, make_path, sup_distance, value_at
from truncvar.path import read_csv, union_grid, values_on_grid, write_path_csv

from .strategies import paths


class TestValidation:
    def test_single_sample_is_valid(self):
        p = make_path([0], [3.0])
        assert len(p) == 1 and p.horizon == 0.0

    def test_three_point_path(self):
        p = make_path([0, 1, 2], [0, 1, 2])
        assert np.array_equal(p.values, [0, 1, 2])

    def test_repeated_time_names_index(self):
        with pytest.raises(PathError, match="times not strictly increasing at index 2"):
            make_path([0, 1, 1], [0, 1, 2])

    @pytest.mark.parametrize(
        "times, values, fragment",
        [
            ([], [], "empty"),
            ([0, 1], [0.0], "length"),
            ([0, 1], [0.0, np.nan], "index 1"),
            ([0, 1], [np.inf, 0.0], "index 0"),
            ([0, 2, 1], [0, 0, 0], "index 2"),
        ],
    )
    def test_rejects_bad_input(self, times, values, fragment):
        with pytest.raises(PathError, match=fragment):
            make_path(times, values)

    def test_arrays_are_read_only(self):
        p = make_path([0, 1], [0, 1])
        with pytest.raises(ValueError):
            p.values[0] = 5.0


class TestEvaluation:
    p = make_path([0, 1], [5, 7])

    def test_right_continuous(self):
        assert value_at(self.p, 1) == 7
        assert value_at(self.p, 0.5) == 5

    def test_left_limit(self):
        assert left_limit_at(self.p, 1) == 5

    def test_before_start_raises(self):
        with pytest.raises(PathError):
            value_at(self.p, -0.1)

    def test_origin_convention_flag(self):
        assert left_limit_at(self.p, 0, zero_before_start=True) == 0.0

    @given(paths())
    def test_value_at_sample_times(self, p):
        assert all(value_at(p, t) == v for t, v in zip(p.times, p.values))

    @given(paths())
    def test_telescoping(self, p):
        assert p.values[-1] - p.values[0] == pytest.approx(np.sum(np.diff(p.values)), abs=1e-9)


class TestJumps:
    def test_single_jump(self):
        jl = jumps(make_path([0, 1, 2], [0, 0, 3]), 2)
        assert jl.as_pairs() == [(2.0, 3.0)] and jl.sum_squares == 9.0

    def test_constant_path_has_no_jumps(self):
        assert len(jumps(make_path([0, 1, 2], [4, 4, 4]), 2)) == 0

    def test_window_cuts_list(self):
        assert jumps(make_path([0, 1, 2], [0, 1, 0]), 1.5).as_pairs() == [(1.0, 1.0)]

    def test_mask_restricts_jumps(self):
        p = make_path([0, 1, 2], [0, 1, 3], jump_mask=[False, False, True])
        assert jumps(p, 2).as_pairs() == [(2.0, 2.0)]


class TestSupDistance:
    def test_examples(self):
        p = make_path([0, 1], [0, 1])
        assert sup_distance(p, p) == 0
        assert sup_distance(p, make_path([0, 1], [0.4, 0.7])) == pytest.approx(0.4)
        assert sup_distance(make_path([0], [1]), make_path([0], [-1])) == 2

    def test_grid_mismatch(self):
        p = make_path([0, 1], [0, 1])
        q = make_path([0, 0.5], [0, 1])
        with pytest.raises(PathError):
            sup_distance(p, q)
        assert sup_distance(p, q, resample=True) == 1.0

    @given(st.data())
    def test_metric_axioms(self, data):
        p = data.draw(paths(min_size=2))
        vals = st.floats(-10, 10, allow_nan=False)
        q = p.with_values(data.draw(st.lists(vals, min_size=len(p), max_size=len(p))))
        r = p.with_values(data.draw(st.lists(vals, min_size=len(p), max_size=len(p))))
        assert sup_distance(p, q) == sup_distance(q, p)
        assert sup_distance(p, r) <= sup_distance(p, q) + sup_distance(q, r) + 1e-12


def test_union_grid_is_exact():
    p = make_path([0, 2], [1, 3])
    q = make_path([0, 1], [5, 6])
    a, b = union_grid(p, q)
    assert np.array_equal(a.times, [0, 1, 2])
    assert np.array_equal(a.values, [1, 1, 3]) and np.array_equal(b.values, [5, 6, 6])


def test_values_on_grid():
    p = make_path([0, 1, 2], [1, 2, 3])
    assert np.array_equal(values_on_grid(p, [0.5, 1, 2]), [1, 2, 3])


class TestCsv:
    def test_round_trip_with_mask(self, tmp_path):
        p = make_path([0, 0.1, 0.3], [0.0, 1 / 3, -2.5], jump_mask=[False, True, False])
        write_path_csv(tmp_path / "p.csv", p)
        q = read_csv(tmp_path / "p.csv")
        assert np.array_equal(q.times, p.times) and np.array_equal(q.values, p.values)
        assert np.array_equal(q.jump_mask, p.jump_mask)

    def test_rejects_unsorted(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("t,x\n0,1\n2,1\n1,0\n")
        with pytest.raises(PathError, match="index 2"):
            read_csv(f)

    def test_rejects_bad_header(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("time,value\n0,1\n")
        with pytest.raises(PathError, match="header"):
            read_csv(f)

    def test_rejects_garbage_row(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("t,x\n0,1\n1,abc\n")
        with pytest.raises(PathError, match=":3"):
            read_csv(f)
