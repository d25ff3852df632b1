import math
import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metreal.errors import DomainError, StructuralError
from metreal.fuzzy_core import (BOUNDED_SUM, EMPTY_FUZZY_SET, MAX, PROBABILISTIC, FuzzyGraph, LevelFunction,
                                MIN_STRENGTH, TConorm, bounds, check_conorm_axioms, exact_level_set, exp_neg, functor_C,
                                functor_M, functor_M_morphism, fuzzy_set, fuzzy_union, fuzzy_union_graphs,
                                fuzzy_union_many, get_conorm, graph_as_fuzzy_set, is_fuzzy_morphism,
                                is_normed_morphism, level_set, neg_log, normed_set, round_trip_check, to_fuzzy,
                                to_normed, true_level)

GRID = [k / 10 for k in range(1, 11)]

fuzzy_sets = st.dictionaries(st.text(alphabet='abcdefgh', min_size=1, max_size=3),
                             st.sampled_from(GRID), max_size=8).map(fuzzy_set)


def test_neg_log_examples():
    assert neg_log(1) == 0.0
    assert neg_log(math.exp(-1)) == pytest.approx(1.0, abs=1e-15)
    assert neg_log(0.5) == pytest.approx(0.6931471805599453, abs=1e-15)


@pytest.mark.parametrize('m', [0, -0.1, 1.5, float('nan'), float('inf')])
def test_neg_log_rejects_outside_unit_interval(m):
    with pytest.raises(DomainError):
        neg_log(m)


@given(st.floats(min_value=1e-300, max_value=1.0))
def test_exp_neg_inverts_neg_log(m):
    assert exp_neg(neg_log(m)) == pytest.approx(m, rel=1e-12)


def test_exp_neg_floors_at_smallest_normal_float():
    assert exp_neg(800.0) == MIN_STRENGTH
    assert exp_neg(720.0) == MIN_STRENGTH
    assert exp_neg(700.0) == pytest.approx(math.exp(-700.0), rel=1e-12)
    assert MIN_STRENGTH > 0


def test_fuzzy_set_rejects_bad_membership():
    with pytest.raises(DomainError):
        fuzzy_set({'a': 0.0})
    with pytest.raises(DomainError):
        fuzzy_set({'a': 1.2})


def test_functor_M_worked_example(worked_fuzzy_set):
    S = functor_M(worked_fuzzy_set)
    assert S.breakpoints == [1.0, 1 / 2, 1 / 3]
    assert [set(L) for L in S.level_sets] == [{'w'}, {'w', 'z'}, {'w', 'z', 'x', 'y'}]
    assert functor_C(S) == worked_fuzzy_set

    start = time.perf_counter()
    for _ in range(100):
        functor_C(functor_M(worked_fuzzy_set))
    assert (time.perf_counter() - start) / 100 < 1e-3


def test_functor_M_small_examples():
    assert functor_M(fuzzy_set({'p': 1.0})).levels == ((1.0, ('p',)),)
    S = functor_M(fuzzy_set({'a': 0.2, 'b': 0.9}))
    assert S.levels == ((0.9, ('b',)), (0.2, ('b', 'a')))


def test_functor_C_examples():
    assert functor_C(LevelFunction()) == EMPTY_FUZZY_SET
    X = functor_C(LevelFunction(((0.7, ('a',)), (0.3, ('a', 'b', 'c')))))
    assert dict(X.membership) == {'a': 0.7, 'b': 0.3, 'c': 0.3}


def test_level_function_invariants():
    with pytest.raises(StructuralError):
        LevelFunction(((0.3, ('a',)), (0.7, ('a', 'b'))))
    with pytest.raises(StructuralError):
        LevelFunction(((0.7, ('a', 'b')), (0.3, ('a',))))
    with pytest.raises(StructuralError):
        LevelFunction(((0.7, ('a',)), (0.3, ('a',))))
    with pytest.raises(DomainError):
        LevelFunction(((1.5, ('a',)),))


def test_level_set_lookups(worked_fuzzy_set):
    S = functor_M(worked_fuzzy_set)
    assert set(level_set(S, 0.9)) == {'w'}
    assert set(level_set(S, 0.5)) == {'w', 'z'}
    assert set(level_set(S, 0.4)) == {'w', 'z'}
    assert set(level_set(S, 0.01)) == {'w', 'z', 'x', 'y'}
    assert set(exact_level_set(S, 1 / 3)) == {'x', 'y'}
    assert exact_level_set(S, 0.25) == ()
    assert true_level(S, 0.2, 'z') == 0.5
    with pytest.raises(StructuralError):
        true_level(S, 0.6, 'z')
    assert bounds(S) == (4, 1 / 3)
    assert bounds(LevelFunction()) == (0, 1.0)


def test_level_set_above_top_level_is_empty():
    S = functor_M(fuzzy_set({'a': 0.6}))
    assert level_set(S, 0.8) == ()


@given(fuzzy_sets)
def test_round_trip_holds_for_every_fuzzy_set(X):
    assert round_trip_check(X)


def test_round_trip_on_seeded_family():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(0, 9))
        X = fuzzy_set({'e' + str(k): float(rng.choice(GRID)) for k in range(n)})
        assert round_trip_check(X)
    assert round_trip_check(EMPTY_FUZZY_SET)


@given(fuzzy_sets)
def test_functor_M_output_is_nested_and_stabilises(X):
    S = functor_M(X)
    for (_, upper), (_, lower) in zip(S.levels, S.levels[1:]):
        assert set(upper) < set(lower)
    if len(X) > 0:
        assert bounds(S) == (len(X), min(X.membership.values()))


def test_normed_sets_mirror_fuzzy_sets(worked_fuzzy_set):
    N = to_normed(worked_fuzzy_set)
    assert N.norm['w'] == 0.0
    assert N.norm['z'] == pytest.approx(math.log(2))
    back = to_fuzzy(N)
    for x in worked_fuzzy_set:
        assert back[x] == pytest.approx(worked_fuzzy_set[x], rel=1e-15)
    with pytest.raises(DomainError):
        normed_set({'a': -1.0})
    assert to_fuzzy(normed_set({'a': 1e4}))['a'] == MIN_STRENGTH


def test_morphism_examples(worked_fuzzy_set):
    X = worked_fuzzy_set
    assert is_fuzzy_morphism({x: x for x in X}, X, X)
    assert not is_fuzzy_morphism({'a': 'b'}, fuzzy_set({'a': 0.5}), fuzzy_set({'b': 0.4}))
    assert is_fuzzy_morphism({'a': 'c', 'b': 'c'}, fuzzy_set({'a': 0.3, 'b': 0.3}), fuzzy_set({'c': 1.0}))
    with pytest.raises(StructuralError):
        is_fuzzy_morphism({}, fuzzy_set({'a': 0.5}), fuzzy_set({'b': 0.4}))
    with pytest.raises(StructuralError):
        is_fuzzy_morphism({'a': 'q'}, fuzzy_set({'a': 0.5}), fuzzy_set({'b': 0.4}))


def test_normed_morphism_matches_fuzzy_morphism():
    X = fuzzy_set({'a': 0.3, 'b': 0.6})
    Y = fuzzy_set({'c': 0.5, 'd': 0.9})
    for f in [{'a': 'c', 'b': 'd'}, {'a': 'd', 'b': 'c'}, {'a': 'c', 'b': 'c'}]:
        assert is_fuzzy_morphism(f, X, Y) == is_normed_morphism(f, to_normed(X), to_normed(Y))


def test_morphisms_compose():
    X = fuzzy_set({'a': 0.2})
    Y = fuzzy_set({'b': 0.5})
    Z = fuzzy_set({'c': 0.9})
    f, g = {'a': 'b'}, {'b': 'c'}
    assert is_fuzzy_morphism(f, X, Y) and is_fuzzy_morphism(g, Y, Z)
    assert is_fuzzy_morphism({x: g[f[x]] for x in f}, X, Z)


def test_functor_M_on_morphisms():
    X = fuzzy_set({'a': 0.3, 'b': 0.8})
    Y = fuzzy_set({'c': 0.9})
    restrictions = functor_M_morphism({'a': 'c', 'b': 'c'}, X, Y)
    assert restrictions == [(0.8, {'b': 'c'}), (0.3, {'b': 'c', 'a': 'c'})]
    with pytest.raises(DomainError):
        functor_M_morphism({'c': 'a'}, Y, X)


@pytest.mark.parametrize('c', [MAX, PROBABILISTIC, BOUNDED_SUM])
def test_shipped_conorms_pass_axiom_suite(c):
    start = time.perf_counter()
    assert check_conorm_axioms(c, np.linspace(0, 1, 21)) == []
    assert time.perf_counter() - start < 5


def test_axiom_suite_reports_failures():
    left_projection = TConorm('left', 'custom', lambda x, y: np.asarray(x) + 0 * np.asarray(y))
    failed = {axiom for axiom, _ in check_conorm_axioms(left_projection)}
    assert 'symmetry' in failed
    product = TConorm('product', 'custom', lambda x, y: np.asarray(x) * np.asarray(y))
    assert ('boundary', (1.0,)) in check_conorm_axioms(product)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_probabilistic_conorm_is_associative(x, y, z):
    c = PROBABILISTIC
    assert c(x, c(y, z)) == pytest.approx(c(c(x, y), z), abs=1e-12)


def test_get_conorm():
    assert get_conorm('max') is MAX
    with pytest.raises(DomainError):
        get_conorm('min')


def test_fuzzy_union_examples():
    A = fuzzy_set({'x': 0.5})
    assert fuzzy_union(A, fuzzy_set({'x': 0.5}), PROBABILISTIC)['x'] == 0.75
    assert fuzzy_union(fuzzy_set({'x': 0.3}), fuzzy_set({'x': 0.7}), MAX)['x'] == 0.7
    for c in [MAX, PROBABILISTIC, BOUNDED_SUM]:
        U = fuzzy_union(fuzzy_set({'x': 0.4}), fuzzy_set({'y': 0.9}), c)
        assert U['x'] == 0.4 and U['y'] == 0.9


@given(fuzzy_sets)
def test_max_union_is_idempotent(A):
    assert fuzzy_union(A, A, MAX) == A


def test_union_many_folds_left():
    sets = [fuzzy_set({'x': 0.5}), fuzzy_set({'x': 0.5, 'y': 0.2}), fuzzy_set({'y': 0.5})]
    U = fuzzy_union_many(sets, PROBABILISTIC)
    assert U['x'] == 0.75
    assert U['y'] == pytest.approx(0.6)
    assert fuzzy_union_many([], MAX) == EMPTY_FUZZY_SET


def test_graph_invariants():
    with pytest.raises(StructuralError):
        FuzzyGraph((0, 1), {(0, 0): 0.5})
    with pytest.raises(DomainError):
        FuzzyGraph((0, 1), {(0, 1): 0.0})
    with pytest.raises(StructuralError):
        FuzzyGraph((0, 1), {(0, 1): 0.5, (1, 0): 0.5})
    G = FuzzyGraph((0, 1, 2), {(1, 0): 0.5})
    assert G.edges == ((0, 1),)
    assert G.weight(1, 0) == 0.5 and G.weight(1, 2) == 0.0


def test_graph_union_examples():
    G = FuzzyGraph((0, 1, 2), {(0, 1): 0.5, (1, 2): 0.3})
    assert fuzzy_union_graphs([G], PROBABILISTIC) == G
    H = FuzzyGraph((0, 1, 2), {(0, 1): 0.5})
    U = fuzzy_union_graphs([G, H], PROBABILISTIC)
    assert U.weight(0, 1) == 0.75
    assert U.weight(1, 2) == 0.3
    with pytest.raises(StructuralError):
        fuzzy_union_graphs([G, FuzzyGraph((0, 1), {})], MAX)


def test_graph_union_is_fuzzy_union_of_edge_sets():
    G = FuzzyGraph(('a', 'b', 'c'), {('a', 'b'): 0.4, ('b', 'c'): 0.9})
    H = FuzzyGraph(('a', 'b', 'c'), {('b', 'a'): 0.5})
    expected = fuzzy_union(graph_as_fuzzy_set(G), graph_as_fuzzy_set(H), PROBABILISTIC)
    assert graph_as_fuzzy_set(fuzzy_union_graphs([G, H], PROBABILISTIC)) == expected


def test_graph_union_is_permutation_invariant():
    rng = np.random.default_rng(3)
    graphs = []
    for _ in range(5):
        weights = {(a, b): float(rng.uniform(0.05, 1)) for a in range(6) for b in range(a + 1, 6)
                   if rng.random() < 0.5}
        graphs.append(FuzzyGraph(tuple(range(6)), weights))
    reference = fuzzy_union_graphs(graphs, PROBABILISTIC)
    for _ in range(10):
        shuffled = [graphs[k] for k in rng.permutation(len(graphs))]
        U = fuzzy_union_graphs(shuffled, PROBABILISTIC)
        assert set(U.edges) == set(reference.edges)
        for e in reference.edges:
            assert U.weight(*e) == pytest.approx(reference.weight(*e), abs=1e-12)
