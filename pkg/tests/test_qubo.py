import itertools
import json

import numpy as np
import pytest

from esqubo import qubo
from esqubo.encoding import Encoding
from esqubo.errors import DimensionError, LengthMismatchError, NegativePenaltyError
from esqubo.solver import solve_exhaustive


def direct_objective(n_assets, b, cov, mu, rho, lam_b, lam_r, x):
    """Penalised objective from weights built bit by bit."""
    w = [sum(x[i * b + j] * 2.0 ** -(j + 1) for j in range(b)) for i in range(n_assets)]
    quad = 0.5 * sum(w[i] * cov[i][k] * w[k] for i in range(n_assets) for k in range(n_assets))
    ret = sum(m * v for m, v in zip(mu, w)) - rho
    return quad + lam_r * ret**2 + lam_b * (sum(w) - 1.0) ** 2


def random_instance(rng, n, b):
    a = rng.standard_normal((n, n)) * 0.1
    cov = a @ a.T
    mu = rng.standard_normal(n) * 0.05
    rho = float(rng.normal(0, 0.05))
    lam_b, lam_r = rng.uniform(0, 20, size=2)
    return cov, mu, rho, float(lam_b), float(lam_r)


def test_hand_example():
    p = qubo.build(Encoding(1, 1), [[0.04]], [0.1], 0.05, penalty_budget=1.0, penalty_return=1.0)
    assert p.offset == pytest.approx(1.0025, abs=1e-15)
    assert qubo.energy(p, [1]) == pytest.approx(0.2550, abs=1e-14)
    assert qubo.energy(p, [0]) == p.offset


def test_exhaustive_identity_random():
    rng = np.random.default_rng(5)
    n, b = 2, 3
    cov, mu, rho, lam_b, lam_r = random_instance(rng, n, b)
    p = qubo.build(Encoding(n, b), cov, mu, rho, lam_b, lam_r)
    worst = 0.0
    for x in itertools.product((0, 1), repeat=n * b):
        want = direct_objective(n, b, cov, mu, rho, lam_b, lam_r, x)
        worst = max(worst, abs(qubo.energy(p, np.array(x)) - want))
        assert qubo.objective(p, cov, mu, np.array(x)) == pytest.approx(want, abs=1e-12)
    assert worst <= 1e-12


def test_construction_rule_entries():
    rng = np.random.default_rng(9)
    n, b = 2, 2
    cov, mu, rho, lam_b, lam_r = random_instance(rng, n, b)
    p = qubo.build(Encoding(n, b), cov, mu, rho, lam_b, lam_r)
    for u in range(n * b):
        i, a = divmod(u, b)
        ca = 2.0 ** -(a + 1)
        diag = ca**2 * (0.5 * cov[i, i] + lam_r * mu[i] ** 2 + lam_b) + ca * (-2 * lam_r * rho * mu[i] - 2 * lam_b)
        assert p.q[u, u] == pytest.approx(diag, abs=1e-14)
        for v in range(n * b):
            if v == u:
                continue
            k, c = divmod(v, b)
            cb = 2.0 ** -(c + 1)
            off = ca * cb * (0.5 * cov[i, k] + lam_r * mu[i] * mu[k] + lam_b)
            assert p.q[u, v] == pytest.approx(off, abs=1e-14)
    assert p.offset == pytest.approx(lam_r * rho**2 + lam_b, abs=1e-15)


def test_energy_conventions():
    rng = np.random.default_rng(1)
    cov, mu, rho, lam_b, lam_r = random_instance(rng, 2, 3)
    p = qubo.build(Encoding(2, 3), cov, mu, rho, lam_b, lam_r)
    assert np.array_equal(p.q, p.q.T)
    assert np.all(np.isfinite(p.q))
    assert qubo.energy(p, np.zeros(6)) == p.offset
    for u in range(6):
        e = np.zeros(6)
        e[u] = 1
        assert qubo.energy(p, e) == pytest.approx(p.q[u, u] + p.offset, abs=1e-15)
    x = rng.integers(0, 2, 6)
    manual = sum(p.q[u, u] * x[u] for u in range(6)) + sum(
        2 * p.q[u, v] * x[u] * x[v] for u in range(6) for v in range(u + 1, 6)
    ) + p.offset
    assert qubo.energy(p, x) == pytest.approx(manual, abs=1e-13)
    np.testing.assert_allclose(qubo.energies(p, x[None, :]), [qubo.energy(p, x)])
    with pytest.raises(LengthMismatchError):
        qubo.energy(p, np.zeros(5))


def test_penalty_only_problem_targets_full_investment():
    enc = Encoding(2, 3)
    p = qubo.build(enc, np.zeros((2, 2)), np.zeros(2), 0.0, penalty_budget=1.0, penalty_return=0.0)
    sums = []
    for x in itertools.product((0, 1), repeat=6):
        w = np.array([int("".join(map(str, x[:3])), 2), int("".join(map(str, x[3:])), 2)]) / 8
        sums.append((qubo.energy(p, np.array(x)), abs(w.sum() - 1)))
    best = min(e for e, _ in sums)
    closest = min(d for _, d in sums)
    assert all(d == closest for e, d in sums if e == pytest.approx(best, abs=1e-15))


def test_scaling_invariance_of_argmin():
    rng = np.random.default_rng(21)
    cov, mu, rho, lam_b, lam_r = random_instance(rng, 3, 2)
    enc = Encoding(3, 2)
    s = 7.0
    base = solve_exhaustive(qubo.build(enc, cov, mu, rho, lam_b, lam_r))
    # scaling cov and mu^2 and the budget term together scales every component
    scaled = solve_exhaustive(qubo.build(enc, s * cov, mu, rho, s * lam_b, s * lam_r))
    np.testing.assert_array_equal(base.x, scaled.x)
    assert scaled.energy == pytest.approx(s * base.energy, rel=1e-10)


def test_only_quadratic_part_scales_with_cov():
    rng = np.random.default_rng(22)
    cov, mu, rho, lam_b, lam_r = random_instance(rng, 2, 3)
    enc = Encoding(2, 3)
    p1 = qubo.build(enc, cov, mu, rho, lam_b, lam_r)
    p2 = qubo.build(enc, 3 * cov, mu, rho, lam_b, lam_r)
    zero = qubo.build(enc, np.zeros_like(cov), mu, rho, lam_b, lam_r)
    x = rng.integers(0, 2, 6)
    quad = qubo.energy(p1, x) - qubo.energy(zero, x)
    assert qubo.energy(p2, x) - qubo.energy(zero, x) == pytest.approx(3 * quad, abs=1e-13)


def test_budget_penalty_dominates_on_default_penalties():
    rng = np.random.default_rng(4)
    for n, b in [(2, 3), (3, 3), (2, 4), (3, 4)]:
        for _ in range(5):
            a = rng.standard_normal((n, n)) * 0.02
            cov, mu = a @ a.T, rng.normal(0.001, 0.002, n)
            rho = float(mu.mean())
            lam_b, lam_r = qubo.default_penalties(cov, mu, rho)
            enc = Encoding(n, b)
            sol = solve_exhaustive(qubo.build(enc, cov, mu, rho, lam_b, lam_r))
            w = sol.x.reshape(n, b) @ (2.0 ** -np.arange(1, b + 1))
            assert abs(w.sum() - 1) <= 2.0**-b * n / 2


@pytest.mark.parametrize(
    "cov, mu, rho, expected",
    [
        (np.zeros((2, 2)), np.zeros(2), 0.0, (10.0, 10.0)),
        (np.array([[1.0, 0.2], [0.2, 0.5]]), np.zeros(2), 0.0, (10.0, 10.0)),
        (np.array([[6.0, 0.0], [0.0, 1.0]]), np.zeros(2), 0.0, (30.0, 30.0)),
        (np.zeros((2, 2)), np.array([2.0, -4.0]), 1.5, (60.0, 60.0)),
    ],
)
def test_default_penalties(cov, mu, rho, expected):
    assert qubo.default_penalties(cov, mu, rho) == expected


def test_build_errors():
    enc = Encoding(2, 2)
    with pytest.raises(DimensionError):
        qubo.build(enc, np.zeros((3, 3)), np.zeros(2), 0, 1, 1)
    with pytest.raises(DimensionError):
        qubo.build(enc, np.zeros((2, 2)), np.zeros(3), 0, 1, 1)
    with pytest.raises(NegativePenaltyError):
        qubo.build(enc, np.zeros((2, 2)), np.zeros(2), 0, -1, 1)


def test_json_round_trip():
    rng = np.random.default_rng(8)
    cov, mu, rho, lam_b, lam_r = random_instance(rng, 2, 2)
    enc = Encoding(2, 2)
    p = qubo.build(enc, cov, mu, rho, lam_b, lam_r)
    data = json.loads(p.to_json())
    assert data["n"] == 4 and data["offset"] == p.offset
    assert all(u <= v for u, v, _ in data["entries"])
    back = qubo.QuboProblem.from_json_dict(data, enc)
    np.testing.assert_array_equal(back.q, p.q)
    x = np.array([1, 0, 1, 1])
    # energy from the sparse entries alone
    e = data["offset"] + sum(c * x[u] if u == v else 2 * c * x[u] * x[v] for u, v, c in data["entries"])
    assert e == pytest.approx(qubo.energy(p, x), abs=1e-14)
