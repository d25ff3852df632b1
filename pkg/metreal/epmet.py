import itertools
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph
from numba import njit

from .errors import DomainError, StructuralError

BARYCENTRIC_TOL = 1e-12


################# the infinite distance #################

class _Infinity:
    """
    The distance inf of an extended pseudo-metric. Compares above every real
    and absorbs addition (inf + r = inf + inf = inf). It is not a float, so
    arithmetic that forgets to handle it fails loudly instead of propagating.
    """
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'INF'

    def __str__(self):
        return 'inf'

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash('metreal.INF')

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        if other is self or np.isfinite(other):
            return self
        return NotImplemented

    __radd__ = __add__

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(value):
    return value is INF


class _NotLipschitz:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'NOT_LIPSCHITZ'

    def __reduce__(self):
        return (_NotLipschitz, ())


NOT_LIPSCHITZ = _NotLipschitz()


################# finite extended pseudo-metric spaces #################

class FiniteEPMet:
    """
    Finite extended pseudo-metric space.

    points: sequence of distinct hashable labels
    dist:   square table of distances; entries are floats >= 0 or INF
            (float('inf') is accepted on input and converted)

    The numeric matrix ``values`` holds 0.0 where the distance is infinite;
    ``finite`` is the mask telling the two apart. Both arrays are read-only.
    """

    def __init__(self, points, dist):
        points = tuple(points)
        if len(set(points)) != len(points):
            raise StructuralError('Point labels are not distinct')
        n = len(points)
        rows = [list(row) for row in dist]
        if len(rows) != n or any(len(row) != n for row in rows):
            raise StructuralError('Distance table is not ' + str(n) + 'x' + str(n))

        values = np.zeros((n, n), dtype=np.float64)
        finite = np.ones((n, n), dtype=bool)
        for i, row in enumerate(rows):
            for j, d in enumerate(row):
                if d is INF or (isinstance(d, (float, np.floating)) and np.isposinf(d)):
                    finite[i, j] = False
                else:
                    values[i, j] = float(d)
        values.setflags(write=False)
        finite.setflags(write=False)

        self.points = points
        self.values = values
        self.finite = finite
        self._index = {p: i for i, p in enumerate(points)}

    @classmethod
    def from_arrays(cls, points, values, finite):
        space = cls.__new__(cls)
        points = tuple(points)
        if len(set(points)) != len(points):
            raise StructuralError('Point labels are not distinct')
        values = np.where(finite, values, 0.0).astype(np.float64)
        finite = np.array(finite, dtype=bool)
        values.setflags(write=False)
        finite.setflags(write=False)
        space.points = points
        space.values = values
        space.finite = finite
        space._index = {p: i for i, p in enumerate(points)}
        return space

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return 'FiniteEPMet(' + repr(list(self.points)) + ')'

    def __eq__(self, other):
        if not isinstance(other, FiniteEPMet):
            return NotImplemented
        return (self.points == other.points and np.array_equal(self.finite, other.finite)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def index(self, x):
        try:
            return self._index[x]
        except KeyError:
            raise StructuralError(repr(x) + ' is not a point of the space')

    def distance(self, x, y):
        i, j = self.index(x), self.index(y)
        return self._entry(i, j)

    def _entry(self, i, j):
        if not self.finite[i, j]:
            return INF
        return float(self.values[i, j])

    @property
    def dist(self):
        n = len(self.points)
        return [[self._entry(i, j) for j in range(n)] for i in range(n)]

    def as_array(self, inf_value=np.inf):
        """Float copy of the distance matrix with inf_value in the infinite slots."""
        return np.where(self.finite, self.values, inf_value)


@dataclass(frozen=True)
class PointMap:
    """A map of points between two finite extended pseudo-metric spaces."""
    source: FiniteEPMet
    target: FiniteEPMet
    assignment: MappingProxyType = field(compare=False)

    def __post_init__(self):
        assignment = dict(self.assignment)
        for x in self.source.points:
            if x not in assignment:
                raise StructuralError('Point map is not total: no image for ' + repr(x))
            if assignment[x] not in self.target._index:
                raise StructuralError('Image of ' + repr(x) + ' is not a point of the target')
        object.__setattr__(self, 'assignment', MappingProxyType(assignment))

    def __call__(self, x):
        return self.assignment[x]


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty blocks of points."""
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(B) for B in self.blocks)
        seen = set()
        for B in blocks:
            if len(B) == 0:
                raise StructuralError('Partition has an empty block')
            for p in B:
                if p in seen:
                    raise StructuralError('Point ' + repr(p) + ' is in two blocks')
                seen.add(p)
        object.__setattr__(self, 'blocks', blocks)

    def covers(self, points):
        return set(itertools.chain.from_iterable(self.blocks)) == set(points)


def discrete_partition(M):
    return Partition(tuple((p,) for p in M.points))


def generated_partition(points, pairs):
    """
    Blocks of the equivalence relation on points generated by pairs: the
    connected components of the graph with an edge per pair. Blocks keep the
    order of first appearance.
    """
    points = tuple(points)
    if len(points) == 0:
        return Partition(())
    index = {p: a for a, p in enumerate(points)}
    rows, cols = [], []
    for p, q in pairs:
        if p not in index or q not in index:
            raise StructuralError('Pair ' + repr((p, q)) + ' mentions an unknown point')
        rows.append(index[p])
        cols.append(index[q])
    graph = scipy.sparse.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(points), len(points)))
    _, labels = scipy.sparse.csgraph.connected_components(graph, directed=False)

    blocks = {}
    for p, label in zip(points, labels):
        blocks.setdefault(label, []).append(p)
    return Partition(tuple(tuple(B) for B in blocks.values()))


def validate_epmet(M):
    """
    Checks the axioms of an extended pseudo-metric.

    input:

        M: FiniteEPMet

    output:

        list of (axiom, witness) tuples, axiom in 'nonnegativity', 'M1', 'M2',
        'M3'. Triangle violations are reported once per unordered end pair.
    """
    n = len(M.points)
    if M.values.shape != (n, n):
        raise StructuralError('Distance matrix does not match the point count')
    P = M.points
    violations = []
    for i in range(n):
        for j in range(n):
            if M.finite[i, j] and not (M.values[i, j] >= 0):
                violations.append(('nonnegativity', (P[i], P[j])))
    for i in range(n):
        if not M.finite[i, i] or M.values[i, i] != 0:
            violations.append(('M1', (P[i],)))
    for i in range(n):
        for j in range(i + 1, n):
            if M._entry(i, j) != M._entry(j, i):
                violations.append(('M2', (P[i], P[j])))
    for i in range(n):
        for k in range(i + 1, n):
            for j in range(n):
                if j == i or j == k:
                    continue
                if M.finite[i, j] and M.finite[j, k]:
                    if not M.finite[i, k] or M.values[i, k] > M.values[i, j] + M.values[j, k]:
                        violations.append(('M3', (P[i], P[j], P[k])))
    return violations


################# colimits #################

def coproduct(parts):
    """
    Disjoint union of spaces; points are relabelled (part index, point) and
    points of different parts are at distance inf.
    """
    points = []
    offsets = []
    for k, M in enumerate(parts):
        offsets.append(len(points))
        points += [(k, p) for p in M.points]
    n = len(points)
    values = np.zeros((n, n))
    finite = np.zeros((n, n), dtype=bool)
    for k, M in enumerate(parts):
        o = offsets[k]
        m = len(M.points)
        values[o:o + m, o:o + m] = M.values
        finite[o:o + m, o:o + m] = M.finite
    return FiniteEPMet.from_arrays(points, values, finite)


def coproduct_injections(parts):
    total = coproduct(parts)
    return [PointMap(M, total, {p: (k, p) for p in M.points}) for k, M in enumerate(parts)]


def copair(maps):
    """
    The map out of the coproduct of the maps' sources that restricts to
    maps[k] on part k. All maps must share a target.
    """
    if len(maps) == 0:
        raise StructuralError('copair needs at least one map')
    target = maps[0].target
    if any(f.target is not target and f.target != target for f in maps):
        raise StructuralError('copair needs maps with a common target')
    total = coproduct([f.source for f in maps])
    assignment = {(k, p): f(p) for k, f in enumerate(maps) for p in f.source.points}
    return PointMap(total, target, assignment)


@njit(cache=True)
def _block_hops(values, finite, block_of, n_blocks):
    hop = np.zeros((n_blocks, n_blocks))
    hop_finite = np.zeros((n_blocks, n_blocks), dtype=np.bool_)
    n = values.shape[0]
    for i in range(n):
        for j in range(n):
            if not finite[i, j]:
                continue
            a = block_of[i]
            b = block_of[j]
            if not hop_finite[a, b] or values[i, j] < hop[a, b]:
                hop[a, b] = values[i, j]
                hop_finite[a, b] = True
    for a in range(n_blocks):
        hop[a, a] = 0.0
        hop_finite[a, a] = True
    return hop, hop_finite


@njit(cache=True)
def _relax_to_fixpoint(dist, finite):
    """
    Floyd-Warshall passes, repeated until nothing changes, so that the result
    satisfies the triangle inequality exactly in floating point.
    """
    n = dist.shape[0]
    changed = True
    while changed:
        changed = False
        for k in range(n):
            for i in range(n):
                if not finite[i, k]:
                    continue
                for j in range(n):
                    if not finite[k, j]:
                        continue
                    candidate = dist[i, k] + dist[k, j]
                    if not finite[i, j] or candidate < dist[i, j]:
                        dist[i, j] = candidate
                        finite[i, j] = True
                        changed = True
    return dist, finite


def quotient(M, P):
    """
    Quotient of M by the partition P.

    The distance between two blocks is the shortest total length of a
    ~-path between them: all-pairs shortest paths on the block graph whose
    hop cost is the smallest distance between members. Each block is
    labelled by its first point.
    """
    if not P.covers(M.points):
        raise StructuralError('Partition does not cover the points of the space')
    block_of = np.zeros(len(M.points), dtype=np.int64)
    for b, B in enumerate(P.blocks):
        for p in B:
            block_of[M.index(p)] = b
    hop, hop_finite = _block_hops(M.values, M.finite, block_of, len(P.blocks))
    dist, finite = _relax_to_fixpoint(hop, hop_finite)
    return FiniteEPMet.from_arrays([B[0] for B in P.blocks], dist, finite)


def quotient_projection(M, P, Q=None):
    """The map M -> M/P sending every point to the label of its block."""
    if Q is None:
        Q = quotient(M, P)
    return PointMap(M, Q, {p: B[0] for B in P.blocks for p in B})


def quotient_oracle(M, P, max_hops=None):
    """
    Quotient distances by exhaustive enumeration of ~-paths.

    Every ~-path visits a sequence of blocks; between consecutive blocks it
    may use any pair of members, so its cheapest realisation over a fixed
    block sequence pays the smallest member distance per hop. All block
    sequences without repeated blocks and at most max_hops hops (default:
    number of blocks - 1) are enumerated. Slow; meant for checking quotient().
    """
    if not P.covers(M.points):
        raise StructuralError('Partition does not cover the points of the space')
    blocks = P.blocks
    n_blocks = len(blocks)
    if max_hops is None:
        max_hops = max(n_blocks - 1, 0)

    hop = [[INF] * n_blocks for _ in range(n_blocks)]
    for a in range(n_blocks):
        for b in range(n_blocks):
            for p in blocks[a]:
                for q in blocks[b]:
                    d = M.distance(p, q)
                    if d < hop[a][b]:
                        hop[a][b] = d

    def paths(a, b):
        if a == b:
            yield (a,)
            return
        others = [c for c in range(n_blocks) if c != a and c != b]
        for length in range(0, max_hops):
            for middle in itertools.permutations(others, length):
                yield (a,) + middle + (b,)

    table = [[INF] * n_blocks for _ in range(n_blocks)]
    for a in range(n_blocks):
        for b in range(n_blocks):
            if a == b:
                table[a][b] = 0.0
                continue
            best = INF
            for path in paths(a, b):
                length = 0.0
                for u, v in zip(path[:-1], path[1:]):
                    length = length + hop[u][v]
                if length < best:
                    best = length
            table[a][b] = best
    return FiniteEPMet([B[0] for B in blocks], table)


def coequalizer(f, g):
    """
    Coequalizer of two parallel point maps: the quotient of the common target
    by the equivalence generated by f(a) ~ g(a), with its projection.
    """
    same_source = f.source is g.source or f.source == g.source
    same_target = f.target is g.target or f.target == g.target
    if not (same_source and same_target):
        raise StructuralError('coequalizer needs maps with a common source and target')
    P = generated_partition(f.target.points, [(f(a), g(a)) for a in f.source.points])
    Q = quotient(f.target, P)
    return Q, quotient_projection(f.target, P, Q)


################# maps #################

def is_nonexpansive(f):
    """True iff d_Y(f(x), f(y)) <= d_X(x, y) for every pair of points."""
    X, Y = f.source, f.target
    idx = [Y.index(f(x)) for x in X.points]
    for i in range(len(X.points)):
        for j in range(i + 1, len(X.points)):
            if not X.finite[i, j]:
                continue
            a, b = idx[i], idx[j]
            if not Y.finite[a, b] or Y.values[a, b] > X.values[i, j]:
                return False
    return True


def best_lipschitz(f):
    """
    Smallest c with d_Y(f(x), f(y)) <= c * d_X(x, y) for all pairs, or
    NOT_LIPSCHITZ when no finite c exists. Pairs at distance inf in the
    source impose nothing.
    """
    X, Y = f.source, f.target
    idx = [Y.index(f(x)) for x in X.points]
    best = 0.0
    for i in range(len(X.points)):
        for j in range(i + 1, len(X.points)):
            if not X.finite[i, j]:
                continue
            a, b = idx[i], idx[j]
            if not Y.finite[a, b]:
                return NOT_LIPSCHITZ
            dx, dy = X.values[i, j], Y.values[a, b]
            if dx == 0:
                if dy > 0:
                    return NOT_LIPSCHITZ
                continue
            best = max(best, dy / dx)
    return float(best)


################# metric simplices #################

def finite_metric_simplex(n, a):
    """n+1 points 0..n with the discrete metric scaled by a."""
    if n < 0:
        raise DomainError('Simplex dimension must be >= 0')
    if not (np.isfinite(a) and a >= 0):
        raise DomainError('Simplex size must be a finite number >= 0, got ' + repr(a))
    values = np.full((n + 1, n + 1), float(a))
    np.fill_diagonal(values, 0.0)
    return FiniteEPMet.from_arrays(list(range(n + 1)), values, np.ones((n + 1, n + 1), dtype=bool))


@dataclass(frozen=True)
class MetricSimplexL1:
    """The metric n-simplex of size a: barycentric coordinates with a * l1."""
    dim: int
    scale: float

    def __post_init__(self):
        if self.dim < 0:
            raise DomainError('Simplex dimension must be >= 0')
        if not (np.isfinite(self.scale) and self.scale >= 0):
            raise DomainError('Simplex size must be a finite number >= 0')


def check_barycentric(coords, dim=None):
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 1 or (dim is not None and coords.shape[0] != dim + 1):
        raise DomainError('Expected ' + str(dim + 1 if dim is not None else 'n+1')
                          + ' barycentric coordinates, got shape ' + str(coords.shape))
    if np.any(coords < 0) or abs(coords.sum() - 1) > BARYCENTRIC_TOL:
        raise DomainError('Coordinates ' + repr(coords.tolist()) + ' are not barycentric')
    return coords


def l1_distance(s, x, y):
    x = check_barycentric(x, s.dim)
    y = check_barycentric(y, s.dim)
    return float(s.scale * np.abs(x - y).sum())


def lp_norm(v, p):
    return float(np.sum(np.abs(np.asarray(v, dtype=float)) ** p) ** (1.0 / p))


def lp_distance(s, x, y, p):
    """a * ||x - y||_p on the metric simplex s."""
    if not p >= 1:
        raise DomainError('lp distance needs p >= 1')
    x = check_barycentric(x, s.dim)
    y = check_barycentric(y, s.dim)
    return float(s.scale) * lp_norm(x - y, p)


def simplex_face(coords, i):
    """Inserts a 0 at position i: Delta^{n} -> Delta^{n+1}."""
    coords = check_barycentric(coords)
    if not (0 <= i <= coords.shape[0]):
        raise DomainError('Face index ' + str(i) + ' out of range')
    return np.insert(coords, i, 0.0)


def simplex_degeneracy(coords, i):
    """Adds coordinates i and i+1: Delta^{n+1} -> Delta^{n}."""
    coords = check_barycentric(coords)
    if not (0 <= i < coords.shape[0] - 1):
        raise DomainError('Degeneracy index ' + str(i) + ' out of range')
    return np.concatenate([coords[:i], [coords[i] + coords[i + 1]], coords[i + 2:]])


def lp_counterexample(p, n=1, i=0):
    """
    Evaluates the point with 1/2 at entries i and i+1 of Delta^{n+1} and its
    image under the degeneracy at i, both in the lp norm.

    output:

        (input norm, output norm) = (2^{1/p - 1}, 1). The output exceeds the
        input for every p > 1, so lp degeneracies are not non-expansive.
    """
    if not (np.isfinite(p) and p > 1):
        raise DomainError('lp counterexample needs p in (1, inf), got ' + repr(p))
    if not (0 <= i <= n):
        raise DomainError('Degeneracy index ' + str(i) + ' out of range')
    witness = np.zeros(n + 2)
    witness[i] = 0.5
    witness[i + 1] = 0.5
    before = lp_norm(witness, p)
    after = lp_norm(simplex_degeneracy(witness, i), p)
    if not after > before:
        raise ArithmeticError('lp degeneracy failed to expand the witness for p=' + repr(p))
    return before, after
