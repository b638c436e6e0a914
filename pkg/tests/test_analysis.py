from fractions import Fraction

import pytest

from seipcover import (
    IsolationFunction,
    KnownOptimum,
    PathCertificate,
    PathStep,
    ProblemISpec,
    Rng,
    SetCoverInstance,
    Solution,
    approximation_ratio,
    check_path_certificate,
    conditional_partial_ratio,
    cost,
    exact_solve,
    gen_problem_i,
    greedy_solve,
    harmonic,
    is_feasible,
    partial_ratio,
    price_audit,
)
from seipcover.analysis import (
    OracleLimitError,
    certificate_from_trace,
    make_linear_reference,
    make_price_reference,
    prices_from_trace,
)
from seipcover.generators import RandomSpec, gen_random_k_cover

from oracles import brute_force_opt


def test_exact_e1(e1):
    res = exact_solve(e1)
    assert res.value == 2 and res.solution.vector() == (1, 1, 0)


def test_exact_single_set():
    inst = SetCoverInstance.from_sets(3, [(1, 2, 3)], [Fraction(4, 3)])
    res = exact_solve(inst)
    assert res.value == Fraction(4, 3) and res.solution.indices() == [0]


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("L", [1, 2, 3])
def test_exact_problem_i(k, L):
    eps = Fraction(1, 10)
    inst, opt = gen_problem_i(ProblemISpec(k, L, eps))
    res = exact_solve(inst)
    assert res.value == L * (1 + eps)
    assert res.solution.indices() == list(range(L))
    assert opt.value == res.value


def test_exact_agrees_with_brute_force():
    rng = Rng(31)
    for i in range(100):
        k = 1 + rng.below(4)
        n = 1 + rng.below(10)
        lo = -(-n // k)
        m = lo + rng.below(12 - lo + 1) if lo <= 12 else lo
        inst = gen_random_k_cover(RandomSpec(n, m, k, 500 + i, (1, 4)))
        value, vec = brute_force_opt(inst.n, inst.sets, inst.weights)
        res = exact_solve(inst)
        assert res.value == value
        assert res.solution.vector() == vec


def test_exact_tie_break_is_lexicographic():
    inst = SetCoverInstance.from_sets(2, [(1, 2), (1,), (2,)], [2, 1, 1])
    # (0,1,1) < (1,0,0) as vectors
    assert exact_solve(inst).solution.vector() == (0, 1, 1)


def test_exact_refuses_large_m():
    inst = SetCoverInstance.from_sets(1, [(1,)] * 30, [1] * 30)
    with pytest.raises(OracleLimitError):
        exact_solve(inst)


def test_approximation_ratio_examples():
    assert approximation_ratio(Fraction(2), Fraction(2)) == 1
    assert approximation_ratio(3, 2) == Fraction(3, 2)
    inst, opt = gen_problem_i(ProblemISpec(3, 2, Fraction(1, 10)))
    g = greedy_solve(inst)
    assert approximation_ratio(cost(inst, g.solution), opt.value) == Fraction(5, 3)


# -- partial ratios ---------------------------------------------------------------

def test_linear_reference():
    ref = make_linear_reference(3, 2)
    assert ref.profile == (0, Fraction(2, 3), Fraction(4, 3), 2)
    assert ref(3) == 2


def test_partial_ratio_examples(e1):
    iso = IsolationFunction.for_instance(e1)
    ref = make_linear_reference(3, 2)
    s1, s2 = e1.solution([0]), e1.solution([1])
    assert partial_ratio(e1, s2, ref, iso) == Fraction(3, 2)
    assert partial_ratio(e1, e1.empty(), ref, iso) == 0
    assert conditional_partial_ratio(e1, s2, s1, ref, iso) == Fraction(3, 4)
    assert conditional_partial_ratio(e1, e1.empty(), s2, ref, iso) == partial_ratio(e1, s2, ref, iso)
    with pytest.raises(ValueError):
        conditional_partial_ratio(e1, s1 | s2, s1, ref, iso)
    full = e1.solution([0, 1])
    assert partial_ratio(e1, full, ref, iso) == approximation_ratio(cost(e1, full), 2)


def test_price_reference_is_valid(e1):
    ref = make_price_reference(e1, exact_solve(e1).solution)
    assert ref.profile[-1] == 2 and ref.profile[0] == 0


def test_decomposition_inequality_random():
    rng = Rng(41)
    checked = 0
    for i in range(10):
        inst = gen_random_k_cover(RandomSpec(8, 9, 3, 70 + i))
        iso = IsolationFunction.for_instance(inst)
        ref = make_linear_reference(inst.n, exact_solve(inst).value)
        for _ in range(300):
            x = Solution(rng.below(1 << inst.m), inst.m)
            y = Solution(rng.below(1 << inst.m), inst.m)
            if x.bits == 0:
                continue
            try:
                cond = conditional_partial_ratio(inst, x, y, ref, iso)
            except ValueError:
                continue
            z = x | y
            assert partial_ratio(inst, z, ref, iso) <= max(partial_ratio(inst, x, ref, iso), cond)
            checked += 1
    assert checked > 1000


# -- certificates ---------------------------------------------------------------

def test_certificate_e1_valid(e1):
    iso = IsolationFunction.for_instance(e1)
    steps = (PathStep(e1.solution([0]), e1.empty()), PathStep(e1.solution([1]), e1.empty()))
    rep = check_path_certificate(e1, PathCertificate(steps, 1, (Fraction(1, 2), Fraction(1, 2)), Fraction(2)), iso)
    assert rep.valid and rep.bound == 1 and rep.final_ratio == 1


def test_certificate_empty_step_fails_condition_1(e1):
    iso = IsolationFunction.for_instance(e1)
    steps = (PathStep(e1.solution([0]), e1.empty()), PathStep(e1.empty(), e1.empty()))
    rep = check_path_certificate(e1, PathCertificate(steps, 1, (Fraction(1, 2), Fraction(1, 2)), Fraction(2)), iso)
    assert not rep.valid and rep.condition == "1" and rep.step == 1


def test_certificate_conditions_2_3_and_incomplete(e1):
    iso = IsolationFunction.for_instance(e1)
    cheap = (PathStep(e1.solution([0]), e1.empty()), PathStep(e1.solution([1]), e1.empty()))
    rep = check_path_certificate(e1, PathCertificate(cheap, 1, (Fraction(1, 4), Fraction(1, 2)), Fraction(2)), iso)
    assert rep.condition == "2"
    stall = (PathStep(e1.solution([0]), e1.empty()), PathStep(e1.solution([1]), e1.solution([0])))
    rep = check_path_certificate(e1, PathCertificate(stall, 2, (Fraction(1, 2), Fraction(1, 2)), Fraction(2)), iso)
    assert rep.condition == "3"
    short = (PathStep(e1.solution([0]), e1.empty()),)
    rep = check_path_certificate(e1, PathCertificate(short, 1, (Fraction(1, 2),), Fraction(2)), iso)
    assert rep.condition == "incomplete"


def test_greedy_certificates_on_corpus(corpus):
    for inst in corpus:
        opt = exact_solve(inst).value
        g = greedy_solve(inst)
        cert = certificate_from_trace(inst, g.trace, opt, gap=1)
        rep = check_path_certificate(inst, cert, IsolationFunction.for_instance(inst))
        assert rep.valid, rep.message
        assert rep.final_ratio <= rep.bound <= harmonic(inst.k)
        assert is_feasible(inst, rep.final)


# -- price audit ------------------------------------------------------------------

def test_price_audit_problem_i_k2(problem_i_small):
    inst, opt = problem_i_small
    g = greedy_solve(inst)
    rep = price_audit(inst, g.prices, g.trace, opt)
    assert rep.passed and rep.total_price == rep.solution_cost == Fraction(3, 2)
    rows = {r.element: r for r in rep.rows}
    assert rows[2].price == Fraction(1, 2) and rows[2].bound == Fraction(11, 20)
    assert rows[1].price == 1 and rows[1].bound == Fraction(11, 10)
    assert rep.n == {2: 1, 1: 0}


def test_price_audit_singletons_tight():
    inst = SetCoverInstance.from_sets(3, [(1,), (2,), (3,)], [1, 2, 3])
    known = KnownOptimum(((1,), (2,), (3,)), (0, 1, 2), (Fraction(1), Fraction(2), Fraction(3)))
    g = greedy_solve(inst)
    rep = price_audit(inst, g.prices, g.trace, known)
    assert rep.passed
    assert all(r.price == r.bound for r in rep.rows)


def test_price_audit_reports_missing_price(problem_i_small):
    inst, opt = problem_i_small
    g = greedy_solve(inst)
    prices = dict(g.prices)
    del prices[1]
    rep = price_audit(inst, prices, g.trace, opt)
    assert not rep.passed and any("no price" in e for e in rep.errors)


def test_prices_from_trace_matches_greedy(corpus):
    for inst in corpus[:50]:
        g = greedy_solve(inst)
        assert prices_from_trace(inst, g.trace) == g.prices
