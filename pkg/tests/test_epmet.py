import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metreal.epmet import (INF, NOT_LIPSCHITZ, FiniteEPMet, MetricSimplexL1, Partition, PointMap,
                           best_lipschitz, check_barycentric, coequalizer, copair, coproduct,
                           coproduct_injections, discrete_partition, finite_metric_simplex, generated_partition,
                           is_inf, is_nonexpansive, l1_distance, lp_counterexample, lp_distance, quotient,
                           quotient_oracle, quotient_projection, simplex_degeneracy, simplex_face, validate_epmet)
from metreal.errors import DomainError, StructuralError


def path_space():
    # a -1- b -5- c -1- d on a line
    return FiniteEPMet('abcd', [[0, 1, 6, 7],
                                [1, 0, 5, 6],
                                [6, 5, 0, 1],
                                [7, 6, 1, 0]])


def two_points(d, labels=('p', 'q')):
    return FiniteEPMet(labels, [[0, d], [d, 0]])


def random_l1_space(rng, n, offset=0):
    coords = rng.integers(0, 10, size=(n, 2))
    values = np.abs(coords[:, None, :] - coords[None, :, :]).sum(axis=2).astype(float)
    return FiniteEPMet(range(offset, offset + n), values.tolist())


def test_infinity_arithmetic():
    assert INF + 3.0 == INF
    assert 3.0 + INF is INF
    assert INF + INF is INF
    assert 1e300 < INF and not INF < 1e300
    assert INF <= INF and INF >= INF
    assert str(INF) == 'inf'
    assert is_inf(INF) and not is_inf(math.inf)
    assert pickle.loads(pickle.dumps(INF)) is INF
    assert pickle.loads(pickle.dumps(NOT_LIPSCHITZ)) is NOT_LIPSCHITZ


def test_construction_accepts_float_inf():
    M = FiniteEPMet('ab', [[0, math.inf], [INF, 0]])
    assert M.distance('a', 'b') is INF
    assert M.dist == [[0.0, INF], [INF, 0.0]]
    assert not M.finite[0, 1] and M.values[0, 1] == 0
    assert np.isinf(M.as_array()[1, 0])
    assert M.as_array(-1)[0, 1] == -1
    with pytest.raises(ValueError):
        M.values[0, 0] = 1.0


def test_construction_errors():
    with pytest.raises(StructuralError):
        FiniteEPMet('aa', [[0, 1], [1, 0]])
    with pytest.raises(StructuralError):
        FiniteEPMet('ab', [[0, 1]])
    with pytest.raises(StructuralError):
        path_space().distance('a', 'z')


def test_equality_and_from_arrays():
    M = path_space()
    N = FiniteEPMet.from_arrays(M.points, M.values, M.finite)
    assert M == N
    assert M != two_points(1)


def test_valid_spaces_have_no_violations():
    assert validate_epmet(path_space()) == []
    assert validate_epmet(FiniteEPMet('abc', [[0, 1, INF], [1, 0, INF], [INF, INF, 0]])) == []
    assert validate_epmet(FiniteEPMet([], [])) == []
    assert validate_epmet(FiniteEPMet('ab', [[0, 0], [0, 0]])) == []


def test_single_triangle_violation():
    M = FiniteEPMet('abc', [[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert validate_epmet(M) == [('M3', ('a', 'b', 'c'))]


def test_triangle_violation_through_infinity():
    M = FiniteEPMet('abc', [[0, 1, INF], [1, 0, 1], [INF, 1, 0]])
    assert validate_epmet(M) == [('M3', ('a', 'b', 'c'))]


def test_other_axioms():
    assert ('M1', ('a',)) in validate_epmet(FiniteEPMet('ab', [[1, 1], [1, 0]]))
    assert ('M2', ('a', 'b')) in validate_epmet(FiniteEPMet('ab', [[0, 1], [2, 0]]))
    assert ('M2', ('a', 'b')) in validate_epmet(FiniteEPMet('ab', [[0, 1], [INF, 0]]))
    assert ('nonnegativity', ('a', 'b')) in validate_epmet(FiniteEPMet('ab', [[0, -1], [-1, 0]]))


def test_partitions():
    assert discrete_partition(path_space()).blocks == (('a',), ('b',), ('c',), ('d',))
    P = generated_partition('abcd', [('d', 'a'), ('c', 'b')])
    assert P.blocks == (('a', 'd'), ('b', 'c'))
    assert P.covers('abcd') and not P.covers('abcde')
    with pytest.raises(StructuralError):
        Partition((('a', 'b'), ('b',)))
    with pytest.raises(StructuralError):
        Partition(((),))
    with pytest.raises(StructuralError):
        generated_partition('ab', [('a', 'z')])


def test_generated_partition_closes_chains():
    P = generated_partition(range(7), [(5, 3), (3, 1), (6, 6), (5, 1)])
    assert P.blocks == ((0,), (1, 3, 5), (2,), (4,), (6,))
    assert generated_partition('abc', []).blocks == (('a',), ('b',), ('c',))
    assert generated_partition((), []).blocks == ()
    assert generated_partition('abcd', [('a', 'b'), ('c', 'd'), ('b', 'c')]).blocks == (('a', 'b', 'c', 'd'),)


def test_quotient_example():
    M = path_space()
    Q = quotient(M, generated_partition(M.points, [('a', 'd')]))
    assert Q.points == ('a', 'b', 'c')
    assert Q.distance('b', 'c') == 2
    assert Q.distance('a', 'b') == 1
    assert Q.distance('a', 'c') == 1
    assert validate_epmet(Q) == []


def test_discrete_quotient_is_identity():
    M = path_space()
    assert quotient(M, discrete_partition(M)) == M


def test_quotient_needs_a_cover():
    with pytest.raises(StructuralError):
        quotient(path_space(), Partition((('a', 'b'),)))
    with pytest.raises(StructuralError):
        quotient_oracle(path_space(), Partition((('a', 'b'),)))


def test_quotient_projection_is_nonexpansive():
    M = path_space()
    P = generated_partition(M.points, [('a', 'd')])
    pi = quotient_projection(M, P)
    assert pi('d') == 'a' and pi('b') == 'b'
    assert is_nonexpansive(pi)


def test_coproduct_distances():
    parts = [two_points(1, 'ab'), two_points(2, 'cd'), two_points(3, 'ef')]
    C = coproduct(parts)
    assert len(C) == 6
    n = len(C)
    finite_pairs = sum(C.finite[i, j] for i in range(n) for j in range(i + 1, n))
    infinite_pairs = sum(not C.finite[i, j] for i in range(n) for j in range(i + 1, n))
    assert (finite_pairs, infinite_pairs) == (3, 12)
    assert C.distance((1, 'c'), (1, 'd')) == 2
    assert C.distance((0, 'a'), (2, 'f')) is INF
    assert validate_epmet(C) == []


def test_coproduct_universal_property():
    parts = [two_points(1, 'ab'), two_points(2, 'cd')]
    for inj in coproduct_injections(parts):
        assert is_nonexpansive(inj)
    target = FiniteEPMet('xy', [[0, 1], [1, 0]])
    f = PointMap(parts[0], target, {'a': 'x', 'b': 'y'})
    g = PointMap(parts[1], target, {'c': 'y', 'd': 'y'})
    h = copair([f, g])
    assert h((0, 'a')) == 'x' and h((1, 'c')) == 'y'
    assert is_nonexpansive(h)
    with pytest.raises(StructuralError):
        copair([])


def test_coequalizer_glues_images():
    M = path_space()
    X = FiniteEPMet(['*'], [[0]])
    f = PointMap(X, M, {'*': 'a'})
    g = PointMap(X, M, {'*': 'd'})
    Q, pi = coequalizer(f, g)
    assert Q.distance('b', 'c') == 2
    assert pi(f('*')) == pi(g('*'))
    assert is_nonexpansive(pi)


def test_point_map_must_be_total():
    with pytest.raises(StructuralError):
        PointMap(two_points(1, 'ab'), two_points(1, 'xy'), {'a': 'x'})
    with pytest.raises(StructuralError):
        PointMap(two_points(1, 'ab'), two_points(1, 'xy'), {'a': 'x', 'b': 'z'})


def set_partitions(points):
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for blocks in set_partitions(rest):
        yield [(first,)] + blocks
        for b in range(len(blocks)):
            yield blocks[:b] + [(first,) + blocks[b]] + blocks[b + 1:]


def random_valid_epmet(rng, n, choices=(0.0, 0.5, 1.0, 2.0, INF)):
    while True:
        table = [[0.0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                table[i][j] = table[j][i] = choices[rng.integers(len(choices))]
        M = FiniteEPMet(range(n), table)
        if not validate_epmet(M):
            return M


def test_set_partition_counts():
    assert [sum(1 for _ in set_partitions(list(range(n)))) for n in range(6)] == [1, 1, 2, 5, 15, 52]


def test_quotient_matches_path_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(200):
        M = random_valid_epmet(rng, int(rng.integers(1, 6)))
        for blocks in set_partitions(list(M.points)):
            P = Partition(blocks)
            Q = quotient(M, P)
            assert Q == quotient_oracle(M, P)
            assert validate_epmet(Q) == []
            assert is_nonexpansive(quotient_projection(M, P, Q))


def test_quotient_of_glued_coproducts():
    rng = np.random.default_rng(11)
    for _ in range(50):
        sizes = rng.integers(1, 4, size=rng.integers(1, 3))
        parts, offset = [], 0
        for s in sizes:
            parts.append(random_l1_space(rng, int(s), offset))
            offset += int(s)
        M = coproduct(parts)
        n_pairs = int(rng.integers(0, len(M)))
        pairs = [(M.points[a], M.points[b]) for a, b in rng.integers(0, len(M), size=(n_pairs, 2))]
        P = generated_partition(M.points, pairs)
        assert quotient(M, P) == quotient_oracle(M, P)


def test_single_block_quotient():
    M = path_space()
    Q = quotient(M, Partition((tuple(M.points),)))
    assert Q.points == ('a',) and Q.distance('a', 'a') == 0


def test_best_lipschitz():
    X = two_points(1, 'ab')
    Y = two_points(3, 'xy')
    assert best_lipschitz(PointMap(X, Y, {'a': 'x', 'b': 'y'})) == 3.0
    assert best_lipschitz(PointMap(X, Y, {'a': 'x', 'b': 'x'})) == 0.0
    apart = FiniteEPMet('xy', [[0, INF], [INF, 0]])
    assert best_lipschitz(PointMap(X, apart, {'a': 'x', 'b': 'y'})) is NOT_LIPSCHITZ
    assert best_lipschitz(PointMap(apart, X, {'x': 'a', 'y': 'b'})) == 0.0
    glued = two_points(0, 'ab')
    assert best_lipschitz(PointMap(glued, Y, {'a': 'x', 'b': 'y'})) is NOT_LIPSCHITZ
    assert not is_nonexpansive(PointMap(X, Y, {'a': 'x', 'b': 'y'}))


def test_finite_metric_simplex():
    M = finite_metric_simplex(2, 1.5)
    assert M.points == (0, 1, 2)
    assert M.distance(0, 2) == 1.5 and M.distance(1, 1) == 0
    assert validate_epmet(finite_metric_simplex(3, 0.0)) == []
    with pytest.raises(DomainError):
        finite_metric_simplex(-1, 1.0)
    with pytest.raises(DomainError):
        finite_metric_simplex(1, -0.5)
    with pytest.raises(DomainError):
        finite_metric_simplex(1, math.inf)


def test_barycentric_checks():
    assert check_barycentric([0.25, 0.75], 1).tolist() == [0.25, 0.75]
    with pytest.raises(DomainError):
        check_barycentric([0.5, 0.6])
    with pytest.raises(DomainError):
        check_barycentric([1.5, -0.5])
    with pytest.raises(DomainError):
        check_barycentric([1.0], 1)
    with pytest.raises(DomainError):
        MetricSimplexL1(-1, 1.0)
    with pytest.raises(DomainError):
        lp_distance(MetricSimplexL1(1, 1.0), [1, 0], [0, 1], 0.5)


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4), st.floats(0.1, 5.0))
def test_faces_are_isometric(seed, n, a):
    rng = np.random.default_rng(seed)
    x, y = rng.dirichlet(np.ones(n + 1), size=2)
    s, t = MetricSimplexL1(n, a), MetricSimplexL1(n + 1, a)
    for i in range(n + 2):
        assert l1_distance(t, simplex_face(x, i), simplex_face(y, i)) == pytest.approx(l1_distance(s, x, y))


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 3))
def test_degeneracies_are_nonexpansive(seed, n):
    rng = np.random.default_rng(seed)
    x, y = rng.dirichlet(np.ones(n + 2), size=2)
    s, t = MetricSimplexL1(n + 1, 1.0), MetricSimplexL1(n, 1.0)
    for i in range(n + 1):
        sx, sy = simplex_degeneracy(x, i), simplex_degeneracy(y, i)
        assert np.abs(sx).sum() == pytest.approx(np.abs(x).sum())
        assert l1_distance(t, sx, sy) <= l1_distance(s, x, y) + 1e-12
        if (x[i] - y[i]) * (x[i + 1] - y[i + 1]) >= 0:
            assert l1_distance(t, sx, sy) == pytest.approx(l1_distance(s, x, y))


def test_degeneracies_can_contract():
    s, t = MetricSimplexL1(2, 1.0), MetricSimplexL1(1, 1.0)
    x, y = [0.5, 0.5, 0.0], [0.0, 1.0, 0.0]
    assert l1_distance(s, x, y) == 1.0
    assert l1_distance(t, simplex_degeneracy(x, 0), simplex_degeneracy(y, 0)) == 0.0


def test_lp_counterexample():
    before, after = lp_counterexample(2)
    assert abs(before - 2 ** -0.5) < 1e-12
    assert after == 1.0
    assert abs(after / before - math.sqrt(2)) < 1e-12
    for p in [1.5, 3, 10]:
        before, after = lp_counterexample(p, n=2, i=1)
        assert after > before
    with pytest.raises(DomainError):
        lp_counterexample(1)
    with pytest.raises(DomainError):
        lp_counterexample(math.inf)
    with pytest.raises(DomainError):
        lp_counterexample(2, n=1, i=2)


def test_lp_distance_examples():
    s = MetricSimplexL1(1, 2.0)
    assert lp_distance(s, [1, 0], [0, 1], 1) == pytest.approx(l1_distance(s, [1, 0], [0, 1]))
    assert lp_distance(s, [1, 0], [0, 1], 2) == pytest.approx(2 * math.sqrt(2))


def test_l1_maps_on_many_random_pairs():
    rng = np.random.default_rng(3)
    n = 3
    s, up, down = MetricSimplexL1(n, 1.0), MetricSimplexL1(n + 1, 1.0), MetricSimplexL1(n - 1, 1.0)
    for i in range(n + 1):
        for x, y in rng.dirichlet(np.ones(n + 1), size=(1000, 2)):
            assert abs(l1_distance(up, simplex_face(x, i), simplex_face(y, i)) - l1_distance(s, x, y)) < 1e-12
    for i in range(n):
        for x, y in rng.dirichlet(np.ones(n + 1), size=(1000, 2)):
            assert l1_distance(down, simplex_degeneracy(x, i), simplex_degeneracy(y, i)) <= l1_distance(s, x, y) + 1e-12
            assert abs(np.abs(simplex_degeneracy(x, i)).sum() - 1.0) < 1e-12
