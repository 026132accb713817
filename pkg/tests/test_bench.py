"""Timing harness: rows, skip notes, power-law fit."""

import pytest

from mttkit.bench import (BenchRow, FAMILIES, bench_family, fit_power_law,
                          time_member_io)
from mttkit.families import copyfree_instance, copyfree_mtt


def test_family_list():
    assert FAMILIES == ("double", "copyfree")
    with pytest.raises(ValueError):
        bench_family("nope", [1])


def test_double_rows_skip_huge_instances():
    rows = bench_family("double", [1, 2, 3, 4], repeats=1)
    assert [r.n for r in rows] == [1, 2, 3, 4]
    assert rows[0].seconds > 0 and rows[1].seconds > 0
    for r in rows[2:]:
        assert r.seconds is None and "skipped" in r.note


def test_copyfree_rows():
    rows = bench_family("copyfree", [2, 4, 8], repeats=1)
    for r in rows:
        assert r.seconds > 0
        s, t = copyfree_instance(r.n)
        assert (r.s_size, r.t_size) == (s.size, t.size)
    assert rows[0].s_size < rows[-1].s_size


def test_time_member_io_positive():
    m = copyfree_mtt()
    s, t = copyfree_instance(3)
    assert time_member_io(m, s, t, repeats=2) > 0


def test_fit_power_law():
    rows = [BenchRow(n, n, n, float(n) ** 2) for n in (10, 20, 40, 80)]
    slope = fit_power_law(rows)
    assert abs(slope - 2.0) < 1e-6
    # skipped rows are ignored, and one point is not a fit
    rows[1:] = [BenchRow(999, None, None, None, note="skipped")]
    assert fit_power_law(rows) is None
    assert fit_power_law([]) is None
