import math

import pytest

import tandemq as tq


@pytest.fixture
def rates():
    return tq.Rates(0.1, [0.4, 0.5])


def test_rates_normalized(rates):
    assert rates.lam + sum(rates.mu) == pytest.approx(1.0, abs=1e-15)
    assert rates.rho(1) == pytest.approx(0.25)
    assert rates.stable()


def test_golden_values(rates):
    assert tq.w_star(rates, tq.transform_tn(60, [1, 0])) == pytest.approx(1.2037e-35, rel=1e-4)
    p = tq.solve_pn(rates, 60)
    assert p[9][0] == pytest.approx(7.8888e-31, rel=1e-3)
    assert p[60][0] == 1.0


def test_conjugate_pair(rates):
    a1, a2 = tq.solve_alpha(rates, rates.rho(2))
    assert a1 == pytest.approx(1.0)
    assert a2 == pytest.approx(rates.rho(1))
    assert abs(tq.eval_p(rates, 0.3 + 0.2j, tq.solve_alpha(rates, 0.3 + 0.2j)[0]) - 1) < 1e-12


def test_oracle_below_closed_form(rates):
    assert tq.horizon_dp(rates, [3, 1], 50) <= tq.w_star(rates, [3, 1])


def test_simulation_reproducible():
    r = tq.Rates(0.2, [0.4, 0.3])
    a = tq.simulate_pn(r, 6, [1, 0], paths=20000, seed=3)
    assert a == tq.simulate_pn(r, 6, [1, 0], paths=20000, seed=3)
    exact = tq.solve_pn(r, 6)[1][0]
    assert abs(a[0] - exact) < 4 * a[1]


def test_sweep_and_verify(rates):
    rows = tq.sweep(rates, 20, 4)
    assert all(0 < x1 + x2 < 20 for x1, x2, *_ in rows)
    assert all(math.isclose(r[4], (r[3] - r[2]) / r[2]) for r in rows)
    assert all(tq.verify(rates).values())


def test_errors_map_to_python(rates):
    with pytest.raises(tq.UnstableRates):
        tq.w_star(tq.Rates(0.5, [0.4, 0.6]), [3, 1])
    with pytest.raises(tq.DomainError):
        tq.transform_tn(5, [1])
    with pytest.raises(tq.Error):
        tq.w_star(tq.Rates(0.1, [0.45, 0.45, 0.3]), [3, 1, 1])
