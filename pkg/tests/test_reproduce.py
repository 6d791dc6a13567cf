import numpy as np
import pytest

from qbound.exceptions import InvalidInputError
from qbound.gaussian_bounds import gaussian_koike_bound
from qbound.reproduce import (
    column,
    fig1,
    fig2,
    fig3,
    reproduce,
    table_discrete,
    thread_count,
)


def test_fig1_shape_and_closed_form():
    cols, rows = fig1(step=0.5, stop=1.5, include_sld=False)
    assert cols == ["delta1", "bound"]
    assert [r[0] for r in rows] == [0.5, 1.0, 1.5]
    assert rows[1][1] == gaussian_koike_bound(1.0, 1.0, 1.0)


def test_fig2_argmax_edges():
    table = fig2()
    t2, s2, rld = column(table, "t2"), column(table, "sigma2"), column(table, "rld_bound")
    low = s2 == 0.5
    assert t2[low][np.argmax(rld[low])] == 0.0
    high = s2 == 50.0
    assert abs(t2[high][np.argmax(rld[high])] - 0.5) <= 0.06


def test_fig3_region_and_grid():
    table = fig3(step=0.25)
    a, b = column(table, "bound_a"), column(table, "bound_b")
    assert len(a) == 64
    assert np.any(a > b)
    assert np.all(column(table, "theta1") < 0)


def test_table_discrete_values():
    cols, rows = table_discrete(6)
    assert [r[0] for r in rows] == [2, 3, 4, 5, 6]
    row4 = rows[2]
    assert row4[cols.index("closed_form_mse")] == pytest.approx(4.75)
    assert row4[cols.index("exact_mse")] == pytest.approx(4.75, abs=1e-9)
    for r in rows:
        if r[0] % 2 == 0:
            assert r[cols.index("relative_entropy")] <= r[cols.index("exponent")]


def test_thread_count_does_not_change_output(monkeypatch):
    monkeypatch.setenv("QBOUND_THREADS", "1")
    one = fig3(step=0.5)
    monkeypatch.setenv("QBOUND_THREADS", "3")
    three = fig3(step=0.5)
    assert one == three


def test_thread_count_validation(monkeypatch):
    monkeypatch.setenv("QBOUND_THREADS", "zero")
    with pytest.raises(InvalidInputError):
        thread_count()
    monkeypatch.setenv("QBOUND_THREADS", "0")
    with pytest.raises(InvalidInputError):
        thread_count()


def test_unknown_figure():
    with pytest.raises(InvalidInputError):
        reproduce("fig9")
