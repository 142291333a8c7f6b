import itertools
from fractions import Fraction

import numpy as np
import pytest
from conftest import exact_probabilities, mu_state

from cohtrans import (
    DegenerateGamma,
    DimensionMismatch,
    DimensionTooLarge,
    Infeasible,
    NoFeasibleSP,
    PermutationSet,
    SingularSystem,
    alpha,
    beta,
    brute_force_oracle,
    build_table,
    closed_form_probability,
    coefficient_matrix,
    feasible_sps,
    find_feasible_sp,
    gamma,
    mandatory_permutations,
    sign_pattern,
    solve_probabilities,
)
from cohtrans.sampling import random_majorizing_pair, random_nonmajorizing_pair

# majorizing pair with no feasible identity-plus-transpositions family at all
COUNTER_SRC = (23, 21, 21, 20, 15)
COUNTER_TGT = (36, 34, 15, 8, 7)


def test_alpha_beta_gamma():
    src = mu_state([2, 1], 3)
    tgt = mu_state([3, 1], 4)
    assert alpha(src, tgt, 1) == pytest.approx(3 / 4 - 2 / 3)
    assert beta(src, tgt, [2]) == pytest.approx(1 / 3 - 1 / 4)
    assert alpha(src, tgt, [1, 2]) == pytest.approx(0.0, abs=1e-15)
    assert gamma(tgt, 1, 2) == pytest.approx(0.5)


def test_d2_hand_value():
    # beta_2 / gamma_12 = (1/3 - 1/4) / (3/4 - 1/4) = 1/6
    src = mu_state([2, 1], 3)
    tgt = mu_state([3, 1], 4)
    sol = find_feasible_sp(src, tgt)
    assert sol.sp.as_pairs() == [[1, 2]]
    np.testing.assert_allclose(sol.probabilities, [5 / 6, 1 / 6], atol=1e-14)


def test_coefficient_matrix_rows():
    tgt = mu_state([4, 3, 2, 1])
    sp = PermutationSet(4, [(1, 3), (1, 4), (2, 3)])
    c = coefficient_matrix(sp, tgt) ** 2 * 10
    np.testing.assert_allclose(c, [[4, 3, 2, 1], [2, 3, 4, 1], [1, 3, 2, 4], [4, 2, 3, 1]])
    with pytest.raises(DimensionMismatch):
        coefficient_matrix(sp, mu_state([2, 1]))


def test_solve_matches_exact_oracle(rng):
    for d in range(2, 7):
        for _ in range(30):
            s, t = random_majorizing_pair(d, rng)
            for sol in feasible_sps(s, t):
                exact = exact_probabilities(s.mu, t.mu, sol.sp.transpositions)
                np.testing.assert_allclose(sol.probabilities, [float(v) for v in exact], atol=1e-9)


def test_worked_d4_first_set_exact():
    # pattern LE,LE,GE,GE with beta_23 >= 0
    src = [Fraction(v, 100) for v in (30, 28, 24, 18)]
    tgt = [Fraction(v, 100) for v in (40, 30, 20, 10)]
    p = exact_probabilities(src, tgt, [(1, 3), (1, 4), (2, 3)])
    a2 = tgt[1] - src[1]
    b4 = src[3] - tgt[3]
    b23 = src[1] + src[2] - tgt[1] - tgt[2]
    assert p[1:] == [b23 / (tgt[0] - tgt[2]), b4 / (tgt[0] - tgt[3]), a2 / (tgt[1] - tgt[2])]
    sol = find_feasible_sp(mu_state(src), mu_state(tgt))
    np.testing.assert_allclose(sol.probabilities, [float(v) for v in p], atol=1e-12)


def test_negative_solution_is_infeasible():
    # red set of the d=4 table on a state where it fails (exact p = 8/15, 2/5, -1/30, 1/10)
    src = mu_state([33, 28, 28, 11], 100)
    tgt = mu_state([40, 30, 20, 10], 100)
    sp = PermutationSet(4, [(1, 3), (1, 4), (2, 4)])
    with pytest.raises(Infeasible) as exc:
        solve_probabilities(coefficient_matrix(sp, tgt), src)
    assert exc.value.reason == "negative"


def test_rank_deficient_system_uses_nnls():
    tgt = mu_state([2, 2, 1])
    sp = PermutationSet(3, [(1, 2), (1, 3)])  # (1,2) row equals the identity row
    p = solve_probabilities(coefficient_matrix(sp, tgt), tgt)
    assert p.sum() == pytest.approx(1.0)
    assert p.min() >= 0
    cmat = coefficient_matrix(sp, tgt)
    np.testing.assert_allclose((cmat**2).T @ p, tgt.mu, atol=1e-12)


def test_singular_system_without_solution():
    tgt = mu_state([2, 1])
    cmat = np.tile(tgt.amps, (2, 1))
    with pytest.raises(SingularSystem) as exc:
        solve_probabilities(cmat, mu_state([3, 2]))
    assert exc.value.reason == "singular"


def test_closed_forms():
    src = mu_state([30, 28, 24, 18], 100)
    tgt = mu_state([40, 30, 20, 10], 100)
    assert closed_form_probability((2, 3), "adjacent_alpha", src, tgt) == pytest.approx(0.02 / 0.10)
    assert closed_form_probability((2, 3), "adjacent_beta", src, tgt) == pytest.approx(0.04 / 0.10)
    assert closed_form_probability((1, 4), "column_unique", src, tgt) == pytest.approx(0.10 / 0.30)
    assert closed_form_probability((1, 4), "row_unique", src, tgt) == pytest.approx(0.08 / 0.30)
    with pytest.raises(ValueError):
        closed_form_probability((1, 3), "adjacent_alpha", src, tgt)
    with pytest.raises(ValueError):
        closed_form_probability((1, 3), "bogus", src, tgt)
    flat = mu_state([1, 1, 1, 1])
    with pytest.raises(DegenerateGamma):
        closed_form_probability((1, 2), "column_unique", flat, flat)


def test_column_and_row_unique_closed_forms_hold(rng):
    """Single-entry columns and rows carry alpha_v/gamma_vm and beta_k/gamma_hk."""
    checked = 0
    for d in range(3, 8):
        for _ in range(60):
            s, t = random_majorizing_pair(d, rng)
            table = build_table(sign_pattern(s, t))
            for sol in feasible_sps(s, t):
                for x in table.columns:
                    col = table.column(x)
                    if len(col) == 1:
                        want = closed_form_probability(col[0], "column_unique", s, t)
                        assert sol.probabilities[sol.sp.index(col[0])] == pytest.approx(want, abs=1e-9)
                        checked += 1
                for y in table.rows:
                    row = table.row(y)
                    if len(row) == 1:
                        want = closed_form_probability(row[0], "row_unique", s, t)
                        assert sol.probabilities[sol.sp.index(row[0])] == pytest.approx(want, abs=1e-9)
                        checked += 1
    assert checked > 100


def test_worked_d6_first_block():
    block = [11, 11, 8, 8, 7]
    target = [12, 12, 10, 7, 4]
    sol = find_feasible_sp(mu_state(block), mu_state(target))
    assert sol.sp.as_pairs() == [[1, 5], [2, 5], [3, 4], [3, 5]]
    np.testing.assert_allclose(sol.probabilities, [1 / 4, 1 / 8, 1 / 8, 1 / 3, 1 / 6], atol=1e-12)
    assert [s.sp for s in feasible_sps(mu_state(block), mu_state(target))] == [sol.sp]


def test_counterexample_has_no_transposition_family():
    src, tgt = mu_state(COUNTER_SRC), mu_state(COUNTER_TGT)
    with pytest.raises(NoFeasibleSP) as exc:
        find_feasible_sp(src, tgt)
    assert exc.value.attempts
    assert {reason for _, reason in exc.value.attempts} == {"negative"}
    assert brute_force_oracle(src, tgt) == []
    # exact arithmetic over every choice of four transpositions, not only table entries
    s = [Fraction(v, 100) for v in COUNTER_SRC]
    t = [Fraction(v, 100) for v in COUNTER_TGT]
    swaps = list(itertools.combinations(range(1, 6), 2))
    for combo in itertools.combinations(swaps, 4):
        p = exact_probabilities(s, t, combo)
        assert p is None or min(p) < 0


def test_feasible_sets_contain_first_hit(rng):
    for d in range(2, 7):
        for _ in range(20):
            s, t = random_majorizing_pair(d, rng)
            sols = feasible_sps(s, t)
            if sols:
                assert find_feasible_sp(s, t).sp == sols[0].sp


def test_usable_sets_agree_with_brute_force(rng):
    for d in range(2, 7):
        for _ in range(40):
            s, t = random_majorizing_pair(d, rng)
            forced = set(mandatory_permutations(build_table(sign_pattern(s, t))))
            brute = {sp for sp, _ in brute_force_oracle(s, t)}
            usable = {sol.sp for sol in feasible_sps(s, t)}
            assert usable <= brute
            assert usable == {sp for sp in brute if forced <= set(sp.transpositions) and sp.is_noncrossing()}


def test_brute_force_rejects_non_majorizing(rng):
    for d in range(2, 5):
        for _ in range(20):
            s, t = random_nonmajorizing_pair(d, rng)
            assert brute_force_oracle(s, t) == []


def test_brute_force_dimension_cap():
    v = mu_state([1] * 8)
    with pytest.raises(DimensionTooLarge):
        brute_force_oracle(v, v)
    with pytest.raises(DimensionMismatch):
        brute_force_oracle(mu_state([1, 1]), mu_state([1, 1, 1]))
