import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qewlab.bound import (
    CROSSOVER,
    BoundParams,
    V,
    V_detail,
    Vbar,
    golden_section_max,
    objective,
)

from oracles import grid_V, grid_bound

BETA = math.e + 1.0


def P(F, lam=1.0, beta=1.0, d=1):
    return BoundParams(lam, beta, d, F)


def test_objective_examples():
    assert objective(P(0), 2.0, 0) == pytest.approx(-(1 + math.log(2)) / 2, abs=1e-12)
    assert objective(P(0), 1 + 1 / math.e, 8) == pytest.approx(
        (8 - math.log(2 * math.e)) / (1 + 1 / math.e), abs=1e-12)
    assert objective(P(0), 1 + 1 / math.e, 8) == pytest.approx(4.610, abs=1e-3)


def test_objective_rejects_mu_at_or_below_lambda():
    with pytest.raises(ValueError):
        objective(P(5), 1.0, 3)
    with pytest.raises(ValueError):
        objective(P(5), [1.5, 0.5], 3)


def test_objective_vectorises():
    mus = np.array([1.1, 2.0, 5.0])
    assert np.allclose(objective(P(0), mus, 4), [objective(P(0), m, 4) for m in mus])


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.5])
def test_branches_meet_at_crossover(lam):
    p = BoundParams(lam, 2.0, 1, 10)
    m = lam + CROSSOVER
    pen_log = math.log(2.0 / CROSSOVER)
    assert pen_log == pytest.approx(math.log(2 * math.e), abs=1e-15)
    left = objective(p, m - 1e-12, 7)
    right = objective(p, m + 1e-12, 7)
    assert abs(left - right) < 1e-10
    assert abs(objective(p, m, 7) - left) < 1e-10


def test_V_examples():
    assert V(P(2)) == 0.0
    r = V_detail(P(10))
    assert r.value == pytest.approx(4.75, abs=5e-3)
    assert r.mu == pytest.approx(1.2105, abs=1e-3)
    assert r.branch == "log"
    assert r.value > objective(P(10), 1 + 1 / math.e, 8)
    assert V(P(10)) == pytest.approx(grid_V(1.0, 1.0, 1, 10), abs=1e-3)


def test_clamped_result_reports_limit():
    r = V_detail(P(2))
    assert (r.value, r.mu, r.branch) == (0.0, math.inf, "limit")


def test_Vbar_examples():
    assert Vbar(P(0)) == 0.0
    assert Vbar(P(8)) == pytest.approx(V(P(10)), abs=1e-15)
    assert Vbar(P(8)) == pytest.approx(grid_bound(1.0, 1.0, 8)[0], abs=1e-3)
    with pytest.raises(ValueError):
        Vbar(P(2.5))


@pytest.mark.parametrize("F", [4, 4.9, 7, 12.3, 40])
def test_V_chains_to_Vbar(F):
    G = math.floor(F) - 2
    assert V(P(F, beta=BETA)) == max(0.0, Vbar(P(G, beta=BETA)))


def test_large_force_ratio():
    assert V(P(1000, beta=BETA)) / 1000 >= 0.98


def test_monotone_and_non_negative():
    vals = [V(P(F, beta=BETA)) for F in range(101)]
    assert min(vals) >= 0
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_optimizer_matches_grid_search():
    rng = np.random.default_rng(5)
    for _ in range(50):
        lam = float(rng.uniform(0.1, 3.0))
        beta = float(np.exp(rng.uniform(0.0, 5.0)))
        d = int(rng.integers(1, 4))
        F = float(rng.uniform(0, 60))
        assert V(BoundParams(lam, beta, d, F)) == pytest.approx(grid_V(lam, beta, d, F), abs=1e-3)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(1.0, 50.0), st.integers(5, 80))
def test_larger_beta_lowers_positive_bound(lam, beta, F):
    lo = V(BoundParams(lam, beta, 1, F))
    hi = V(BoundParams(lam, beta * 1.5, 1, F))
    if lo > 0:
        assert hi < lo
    else:
        assert hi == 0


def test_asymptotic_offset_is_bounded():
    # fitted offset C in V >= F - log(F)/lam - C stays bounded over a wide range
    lam = 1.0
    offsets = [F - math.log(F) / lam - V(P(F, lam, BETA)) for F in (50, 100, 200, 500, 1000, 5000)]
    assert max(offsets) < 10
    assert max(offsets) - min(offsets) < 5


def test_golden_section_on_parabola():
    x, fx = golden_section_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-7)
    assert fx == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("kw", [dict(lam=0), dict(beta=0.5), dict(d=0), dict(F=-1)])
def test_params_validation(kw):
    args = dict(lam=1.0, beta=1.0, d=1, F=1.0)
    args.update(kw)
    with pytest.raises(ValueError):
        BoundParams(**args)
