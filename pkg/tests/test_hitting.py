import itertools

import numpy as np
import pytest

from meetlab.graph import generate
from meetlab.hitting import (
    averaging_residual, check_triangle_extended, check_triangle_original, embedding_residual,
    ext_hitting_formula, ext_hitting_oracle, hitting_times, edge_entry_time, residual_tol,
    splitting_residual, triangle_residual_extended, triangle_residual_original,
)
from meetlab.states import Intermediate, Original, StateSpace

from conftest import SMALL_GRAPHS, small_graph_ids


def fundamental_matrix_hitting(P):
    """H(x, y) = (Z[y, y] - Z[x, y]) / pi[y] with Z = (I - P + 1 pi^T)^-1.

    Kept independent of the per-target absorbing solves under test.
    """
    n = len(P)
    w, v = np.linalg.eig(P.T)
    pi = np.real(v[:, np.argmin(np.abs(w - 1))])
    pi /= pi.sum()
    Z = np.linalg.inv(np.eye(n) - P + np.outer(np.ones(n), pi))
    return (np.diag(Z)[None, :] - Z) / pi[None, :]


def test_p3_hand_values(p3):
    # a-b-c: H(b,c) = 1 + H(a,c)/2, H(a,c) = 1 + H(b,c)  ->  3 and 4
    H = hitting_times(p3).values
    assert H[0, 2] == pytest.approx(4.0, abs=1e-12)
    assert H[1, 2] == pytest.approx(3.0, abs=1e-12)
    assert H[2, 1] == pytest.approx(1.0, abs=1e-12)


def test_k3_all_two(k3):
    H = hitting_times(k3).values
    off = ~np.eye(3, dtype=bool)
    assert np.allclose(H[off], 2.0, atol=1e-12)
    assert np.all(np.diag(H) == 0)


@pytest.mark.parametrize("family, n, k, seed", SMALL_GRAPHS, ids=small_graph_ids())
def test_hitting_matches_fundamental_matrix(family, n, k, seed):
    g = generate(family, n, k=k, seed=seed)
    H = hitting_times(g).values
    assert np.abs(H - fundamental_matrix_hitting(g.transition_matrix())).max() < 1e-9
    assert np.all(np.diag(H) == 0)
    assert np.all(H[~np.eye(g.n, dtype=bool)] > 0)


def test_p3_extended_hand_values(p3):
    ss = StateSpace(p3)
    eh = ext_hitting_formula(ss, hitting_times(p3))
    # from b: 1/2 step onto b>a at once, 1/2 detour b>c, c, then 2 back to b: T = 1/2 + 1/2 (4 + T)
    assert eh(Original(1), Intermediate(1, 0)) == pytest.approx(5.0)
    assert eh(Original(0), Original(2)) == pytest.approx(8.0)


def test_p2_edge_entry_and_oracle(p2):
    ss = StateSpace(p2)
    h = hitting_times(p2)
    assert edge_entry_time(ss, h, 0, 1) == 1.0
    oracle = ext_hitting_oracle(ss)
    assert oracle(Original(0), Original(1)) == pytest.approx(2.0, abs=1e-12)
    assert oracle(Original(0), Intermediate(0, 1)) == pytest.approx(1.0, abs=1e-12)
    assert oracle.source == "oracle"


@pytest.mark.parametrize("family, n, k, seed", SMALL_GRAPHS, ids=small_graph_ids())
def test_formula_equals_oracle(family, n, k, seed):
    g = generate(family, n, k=k, seed=seed)
    ss = StateSpace(g)
    h = hitting_times(g)
    f = ext_hitting_formula(ss, h)
    o = ext_hitting_oracle(ss)
    assert np.abs(f.values - o.values).max() <= 1e-9
    assert np.all(np.diag(o.values) == 0)
    assert averaging_residual(f) <= 1e-9
    assert averaging_residual(o) <= 1e-9
    assert embedding_residual(f, h) <= 1e-9
    assert splitting_residual(f) <= 1e-9


def test_bar_round_trip_is_positive(p3):
    ss = StateSpace(p3)
    eh = ext_hitting_formula(ss, hitting_times(p3))
    # from a>b back onto b>a: reach b (1), then leave b toward a (5)
    assert eh(Intermediate(0, 1), Intermediate(1, 0)) == pytest.approx(6.0)


def test_triangle_original_examples(p3, k3):
    h = hitting_times(p3)
    assert check_triangle_original(h, 0, 1, 2) <= 1e-9
    assert check_triangle_original(h, 1, 1, 1) == 0.0
    hk = hitting_times(k3)
    for t in itertools.permutations(range(3)):
        assert check_triangle_original(hk, *t) <= 1e-12


def test_triangle_extended_examples(p3, k3):
    ss = StateSpace(p3)
    eh = ext_hitting_formula(ss, hitting_times(p3))
    assert check_triangle_extended(eh, Original(0), Intermediate(0, 1), Original(2)) <= 1e-9
    assert check_triangle_extended(eh, "i:1>2", "i:1>2", "i:1>2") == 0.0
    sk = StateSpace(k3)
    ek = ext_hitting_formula(sk, hitting_times(k3))
    worst, checked = triangle_residual_extended(ek, exhaustive_limit=9)
    assert checked == 9 ** 3 and worst <= 1e-9


def test_triangle_vectorized_matches_scalar():
    g = generate("lollipop", 6, k=3)
    ss = StateSpace(g)
    h = hitting_times(g)
    eh = ext_hitting_formula(ss, h)
    scalar = max(check_triangle_original(h, *t) for t in itertools.product(range(g.n), repeat=3))
    assert triangle_residual_original(h) == pytest.approx(scalar, abs=1e-12)
    rng = np.random.default_rng(5)
    triples = rng.integers(0, ss.size, size=(200, 3))
    assert max(check_triangle_extended(eh, *map(int, t)) for t in triples) <= 1e-9


def test_triangle_identity_is_not_vacuous():
    # a perturbed table must fail, so the checker is actually sensitive
    g = generate("path", 4)
    ss = StateSpace(g)
    eh = ext_hitting_formula(ss, hitting_times(g))
    eh.values[0, 5] += 1.0
    assert triangle_residual_extended(eh, exhaustive_limit=100)[0] >= 1.0


def test_residual_tol():
    assert residual_tol(10.0) == 1e-9
    assert residual_tol(1e8) == pytest.approx(1e-4)
