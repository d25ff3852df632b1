import numpy as np
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable

from .errors import DomainError, StructuralError

AXIOM_TOL = 1e-12
MIN_STRENGTH = float(np.finfo(np.float64).tiny)


################# classical fuzzy / normed sets #################

@dataclass(frozen=True, eq=False)
class ClassicalFuzzySet:
    """
    Finite set with a membership map into (0,1].

    elements:   tuple of distinct hashable labels (order is kept for output).
    membership: read-only mapping element -> membership strength.
    """
    elements: tuple
    membership: MappingProxyType = field(compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        membership = dict(self.membership)
        if len(set(elements)) != len(elements):
            raise StructuralError('Fuzzy set labels are not distinct')
        if set(membership.keys()) != set(elements):
            raise StructuralError('Membership map does not match the elements')
        for x in elements:
            m = membership[x]
            if not (np.isfinite(m) and 0 < m <= 1):
                raise DomainError('Membership of ' + repr(x) + ' is ' + repr(m) + ', not in (0,1]')
        object.__setattr__(self, 'elements', elements)
        object.__setattr__(self, 'membership', MappingProxyType({x: float(membership[x]) for x in elements}))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.membership

    def __getitem__(self, x):
        return self.membership[x]

    def __eq__(self, other):
        if not isinstance(other, ClassicalFuzzySet):
            return NotImplemented
        return dict(self.membership) == dict(other.membership)


def fuzzy_set(membership):
    """Builds a ClassicalFuzzySet from an ordered mapping element -> membership."""
    membership = dict(membership)
    return ClassicalFuzzySet(tuple(membership.keys()), membership)


EMPTY_FUZZY_SET = fuzzy_set({})


@dataclass(frozen=True, eq=False)
class ClassicalNormedSet:
    """Finite set with a norm map into [0,inf)."""
    elements: tuple
    norm: MappingProxyType = field(compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        norm = dict(self.norm)
        if len(set(elements)) != len(elements):
            raise StructuralError('Normed set labels are not distinct')
        if set(norm.keys()) != set(elements):
            raise StructuralError('Norm map does not match the elements')
        for x in elements:
            if not (np.isfinite(norm[x]) and norm[x] >= 0):
                raise DomainError('Norm of ' + repr(x) + ' is ' + repr(norm[x]) + ', not in [0,inf)')
        object.__setattr__(self, 'elements', elements)
        object.__setattr__(self, 'norm', MappingProxyType({x: float(norm[x]) for x in elements}))

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        if not isinstance(other, ClassicalNormedSet):
            return NotImplemented
        return dict(self.norm) == dict(other.norm)


def normed_set(norm):
    norm = dict(norm)
    return ClassicalNormedSet(tuple(norm.keys()), norm)


################# the -log locale isomorphism #################

def neg_log(m):
    """
    Sends a membership strength in (0,1] to the norm -log(m) in [0,inf).
    """
    if not (np.isfinite(m) and 0 < m <= 1):
        raise DomainError('neg_log expects a membership in (0,1], got ' + repr(m))
    if m == 1:
        return 0.0
    return float(-np.log(m))


def exp_neg(r):
    """
    Inverse of neg_log: sends a norm in [0,inf) to exp(-r). Norms past the
    float range get MIN_STRENGTH rather than 0.
    """
    if not (np.isfinite(r) and r >= 0):
        raise DomainError('exp_neg expects a norm in [0,inf), got ' + repr(r))
    return max(float(np.exp(-r)), MIN_STRENGTH)


def to_normed(X):
    return ClassicalNormedSet(X.elements, {x: neg_log(X.membership[x]) for x in X.elements})


def to_fuzzy(N):
    """
    Inverse of to_normed. Norms so large that exp(-r) underflows to 0 have no
    fuzzy counterpart and raise DomainError.
    """
    membership = {x: exp_neg(N.norm[x]) for x in N.elements}
    for x, m in membership.items():
        if m == 0:
            raise DomainError('Norm of ' + repr(x) + ' underflows to membership 0')
    return ClassicalFuzzySet(N.elements, membership)


################# morphisms #################

def _check_element_map(f, source_elements, target):
    for x in source_elements:
        if x not in f:
            raise StructuralError('Map is not total: no image for ' + repr(x))
        if f[x] not in target:
            raise StructuralError('Image of ' + repr(x) + ' escapes the target: ' + repr(f[x]))


def is_fuzzy_morphism(f, X, Y):
    """
    True iff mu_Y(f(x)) >= mu_X(x) for every x in X.

    f is a mapping from X's elements to Y's elements.
    """
    _check_element_map(f, X.elements, Y)
    return all(Y.membership[f[x]] >= X.membership[x] for x in X.elements)


def is_normed_morphism(f, X, Y):
    """True iff ||f(x)||_Y <= ||x||_X for every x in X."""
    _check_element_map(f, X.elements, Y.norm)
    return all(Y.norm[f[x]] <= X.norm[x] for x in X.elements)


################# level functions (finite sheaf-theoretic fuzzy sets) #################

@dataclass(frozen=True)
class LevelFunction:
    """
    Step-function form of a finite fuzzy set a -> S^{>=a}.

    levels: tuple of (a_k, L_k) with a_1 > a_2 > ... > a_r in (0,1] and
            L_1 subset L_2 subset ... subset L_r, each L_k a tuple of labels.
            Every breakpoint adds at least one element, so the last level
            a_r is where the maximal cardinality is first reached.
    """
    levels: tuple = ()

    def __post_init__(self):
        levels = tuple((float(a), tuple(L)) for a, L in self.levels)
        previous_a = None
        previous_set = set()
        for a, L in levels:
            if not (0 < a <= 1):
                raise DomainError('Level ' + repr(a) + ' is not in (0,1]')
            if previous_a is not None and not a < previous_a:
                raise StructuralError('Levels are not strictly decreasing at ' + repr(a))
            current = set(L)
            if len(current) != len(L):
                raise StructuralError('Level set at ' + repr(a) + ' repeats a label')
            if not previous_set <= current:
                raise StructuralError('Level set at ' + repr(a) + ' does not contain the level above it')
            if current == previous_set:
                raise StructuralError('Level ' + repr(a) + ' adds no element and is not a breakpoint')
            previous_a, previous_set = a, current
        object.__setattr__(self, 'levels', levels)

    @property
    def breakpoints(self):
        return [a for a, _ in self.levels]

    @property
    def level_sets(self):
        return [L for _, L in self.levels]

    def __len__(self):
        return len(self.levels)


def level_set(S, a):
    """S^{>=a} for any a in (0,1]."""
    if not (0 < a <= 1):
        raise DomainError('Level ' + repr(a) + ' is not in (0,1]')
    current = ()
    for b, L in S.levels:
        if b >= a:
            current = L
        else:
            break
    return current


def exact_level_set(S, a):
    """S^{=a}: the elements whose true level is exactly a."""
    previous = set()
    for b, L in S.levels:
        if b == a:
            return tuple(x for x in L if x not in previous)
        previous = set(L)
    return ()


def true_level(S, a, x):
    """
    The true level of x seen from S^{>=a}: the largest b >= a with x in S^{>=b}.
    """
    if x not in level_set(S, a):
        raise StructuralError(repr(x) + ' is not in the level set at ' + repr(a))
    for b, L in S.levels:
        if x in L:
            return b


def bounds(S):
    """
    (L_X, l_X): the maximal cardinality of a level set and the largest
    level attaining it.
    """
    if len(S.levels) == 0:
        return 0, 1.0
    a_r, L_r = S.levels[-1]
    return len(L_r), a_r


def functor_M(X):
    """
    Sends a classical fuzzy set to its level function, M(X)(a) = {x | mu(x) >= a}.

    input:

        X: ClassicalFuzzySet

    output:

        LevelFunction whose breakpoints are the distinct memberships of X in
        decreasing order.
    """
    values = sorted(set(X.membership.values()), reverse=True)
    levels = []
    current = []
    for a in values:
        current = current + [x for x in X.elements if X.membership[x] == a]
        levels.append((a, tuple(current)))
    return LevelFunction(tuple(levels))


def functor_C(S):
    """
    Sends a level function back to a classical fuzzy set: the carrier is the
    union of the S^{=a_k} and every element gets its true level.
    """
    membership = {}
    for a, L in S.levels:
        for x in L:
            if x not in membership:
                membership[x] = a
    return fuzzy_set(membership)


def functor_M_morphism(f, X, Y):
    """
    M on morphisms: the level-wise restrictions of f at every breakpoint of X.

    Returns a list of (a, {x: f(x) for x in M(X)^{>=a}}). Each restriction
    lands in M(Y)^{>=a} because f never decreases membership.
    """
    if not is_fuzzy_morphism(f, X, Y):
        raise DomainError('Map decreases membership and is not a fuzzy morphism')
    return [(a, {x: f[x] for x in L}) for a, L in functor_M(X).levels]


def round_trip_check(X):
    """True iff C(M(X)) equals X exactly (labels and memberships)."""
    return functor_C(functor_M(X)) == X


################# T-conorms and unions #################

@dataclass(frozen=True)
class TConorm:
    """
    Binary operation on [0,1]. ``func`` must accept numpy arrays and
    broadcast; ``tag`` is one of 'max', 'probabilistic', 'custom'.
    """
    name: str
    tag: str
    func: Callable = field(compare=False, repr=False)

    def __call__(self, x, y):
        return self.func(x, y)


def _probabilistic_sum(x, y):
    return x + y - x * y


def _bounded_sum(x, y):
    return np.minimum(1.0, np.add(x, y))


MAX = TConorm('max', 'max', np.maximum)
PROBABILISTIC = TConorm('probabilistic', 'probabilistic', _probabilistic_sum)
BOUNDED_SUM = TConorm('bounded_sum', 'custom', _bounded_sum)

CONORMS = {c.name: c for c in (MAX, PROBABILISTIC, BOUNDED_SUM)}


def get_conorm(name):
    try:
        return CONORMS[name]
    except KeyError:
        raise DomainError('Unknown conorm "' + str(name) + '", choose from ' + ', '.join(sorted(CONORMS)))


def check_conorm_axioms(c, grid=None, tol=AXIOM_TOL):
    """
    Samples symmetry, monotonicity, associativity and the boundary condition
    of a T-conorm on a grid of [0,1].

    input:

        c:    TConorm
        grid: sorted 1-d array of sample points (default: 21 points 0, 0.05, ..., 1)
        tol:  tolerance on every equality / inequality

    output:

        list of (axiom, witness) tuples; empty iff every sampled axiom holds.
    """
    if grid is None:
        grid = np.linspace(0, 1, 21)
    grid = np.sort(np.asarray(grid, dtype=float))
    violations = []

    x, y = np.meshgrid(grid, grid, indexing='ij')
    table = np.asarray(c(x, y), dtype=float)

    i, j = np.nonzero(np.abs(table - table.T) > tol)
    violations += [('symmetry', (grid[a], grid[b])) for a, b in zip(i, j)]

    # the grid is sorted, so adjacent rows suffice for monotonicity
    i, j = np.nonzero(np.diff(table, axis=0) < -tol)
    violations += [('monotonicity', (grid[a], grid[a + 1], grid[b])) for a, b in zip(i, j)]

    x3, y3, z3 = np.meshgrid(grid, grid, grid, indexing='ij')
    left = np.asarray(c(x3, c(y3, z3)), dtype=float)
    right = np.asarray(c(c(x3, y3), z3), dtype=float)
    i, j, k = np.nonzero(np.abs(left - right) > tol)
    violations += [('associativity', (grid[a], grid[b], grid[d])) for a, b, d in zip(i, j, k)]

    boundary = np.asarray(c(grid, np.zeros_like(grid)), dtype=float)
    violations += [('boundary', (grid[a],)) for a in np.nonzero(np.abs(boundary - grid) > tol)[0]]

    return violations


def fuzzy_union(A, B, c):
    """
    Union of two classical fuzzy sets under the T-conorm c. Elements missing
    on one side count as membership 0 there.
    """
    elements = list(A.elements) + [x for x in B.elements if x not in A]
    membership = {}
    for x in elements:
        membership[x] = float(c(A.membership.get(x, 0.0), B.membership.get(x, 0.0)))
    return ClassicalFuzzySet(tuple(elements), membership)


def fuzzy_union_many(sets, c):
    result = EMPTY_FUZZY_SET
    for A in sets:
        result = fuzzy_union(result, A, c)
    return result


################# weighted graphs #################

@dataclass(frozen=True, eq=False)
class FuzzyGraph:
    """
    Undirected (0,1]-weighted graph without self-loops.

    vertices: tuple of distinct labels
    weights:  read-only mapping (u, v) -> w, one key per edge with u before v
              in vertex order
    """
    vertices: tuple
    weights: MappingProxyType = field(compare=False)

    def __post_init__(self):
        vertices = tuple(self.vertices)
        if len(set(vertices)) != len(vertices):
            raise StructuralError('Graph vertex labels are not distinct')
        order = {v: i for i, v in enumerate(vertices)}
        weights = {}
        for (u, v), w in dict(self.weights).items():
            if u not in order or v not in order:
                raise StructuralError('Edge ' + repr((u, v)) + ' leaves the vertex set')
            if u == v:
                raise StructuralError('Self-loop at ' + repr(u))
            if not (np.isfinite(w) and 0 < w <= 1):
                raise DomainError('Weight of edge ' + repr((u, v)) + ' is ' + repr(w) + ', not in (0,1]')
            key = (u, v) if order[u] < order[v] else (v, u)
            if key in weights:
                raise StructuralError('Edge ' + repr(key) + ' given twice')
            weights[key] = float(w)
        ordered = sorted(weights, key=lambda e: (order[e[0]], order[e[1]]))
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'weights', MappingProxyType({e: weights[e] for e in ordered}))

    @property
    def edges(self):
        return tuple(self.weights.keys())

    def weight(self, u, v):
        """Weight of {u, v}, 0.0 when there is no edge."""
        w = self.weights.get((u, v))
        if w is None:
            w = self.weights.get((v, u), 0.0)
        return w

    def __eq__(self, other):
        if not isinstance(other, FuzzyGraph):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and \
            {frozenset(e): w for e, w in self.weights.items()} == {frozenset(e): w for e, w in other.weights.items()}


def graph_as_fuzzy_set(G):
    """The classical fuzzy set of edges of G, keyed by frozenset({u, v})."""
    return fuzzy_set({frozenset(e): w for e, w in G.weights.items()})


def fuzzy_union_graphs(graphs, c):
    """
    Union of graphs on a common vertex set: an edge is present if it is
    present in any graph, with the left fold of c over its weights.
    """
    graphs = list(graphs)
    if len(graphs) == 0:
        raise StructuralError('fuzzy_union_graphs needs at least one graph')
    vertices = graphs[0].vertices
    for G in graphs[1:]:
        if set(G.vertices) != set(vertices):
            raise StructuralError('Graphs do not share a vertex set')
    union = fuzzy_union_many([graph_as_fuzzy_set(G) for G in graphs], c)
    order = {v: i for i, v in enumerate(vertices)}
    weights = {}
    for e in union.elements:
        u, v = sorted(e, key=order.__getitem__)
        weights[(u, v)] = union.membership[e]
    return FuzzyGraph(vertices, weights)
