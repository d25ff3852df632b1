import itertools
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool
from types import MappingProxyType

import numpy as np
from tqdm import tqdm

from .epmet import (FiniteEPMet, PointMap, coproduct, finite_metric_simplex, generated_partition,
                    is_inf, is_nonexpansive, quotient, validate_epmet)
from .errors import EnumerationLimitError, StructuralError
from .fuzzy_core import FuzzyGraph, exp_neg, fuzzy_set, neg_log
from .simplicial import (TruncatedSimplicialFuzzySet, degeneracy, face, is_simplicial_morphism, validate,
                         vertices)

MAX_ENUMERATION = 10**6


@dataclass(frozen=True)
class RealizationResult:
    """
    space:   the realized FiniteEPMet; every point is labelled by a 0-simplex of S
    witness: (n, s, i) -> point of space that vertex i of the copy of s lands on
    """
    space: FiniteEPMet
    witness: MappingProxyType = field(compare=False, repr=False)


def _require_valid(S):
    violations = validate(S)
    if violations:
        raise StructuralError('Simplicial fuzzy set is not valid (' + str(len(violations))
                              + ' violations, first: ' + str(violations[0]) + ')')


def fin_metric_realize(S, verbose=False):
    """
    Finite metric realization of a truncated simplicial fuzzy set.

    Every simplex s in S_n contributes one finite metric n-simplex of size
    -log mu(s). The copies are glued along the face and degeneracy actions,
    iota_{d_i s}(k) ~ iota_s(delta_i(k)) and iota_{s_j s}(k) ~ iota_s(sigma_j(k)),
    and the result is the quotient of their coproduct.

    input:

        S: TruncatedSimplicialFuzzySet; must pass validate()

    output:

        RealizationResult
    """
    _require_valid(S)
    D = S.max_dim

    # dimension 0 first, so that each block starts with a vertex copy
    keys = [(n, s) for n in range(D + 1) for s in S.sets[n].elements]
    part_of = {key: k for k, key in enumerate(keys)}
    parts = [finite_metric_simplex(n, neg_log(S.membership(n, s))) for n, s in keys]
    total = coproduct(parts)

    if verbose:
        print('Gluing ' + str(len(keys)) + ' simplices (' + str(len(total)) + ' points)', flush=True)

    def point(n, s, i):
        return (part_of[(n, s)], i)

    pairs = []
    for n in range(1, D + 1):
        for i in range(n + 1):
            delta = face(n, i)
            for s in S.sets[n].elements:
                t = S.d(n, i, s)
                pairs += [(point(n - 1, t, k), point(n, s, delta(k))) for k in range(n)]
    for n in range(D):
        for j in range(n + 1):
            sigma = degeneracy(n, j)
            for s in S.sets[n].elements:
                t = S.s(n, j, s)
                pairs += [(point(n + 1, t, k), point(n, s, sigma(k))) for k in range(n + 2)]

    P = generated_partition(total.points, pairs)
    glued = quotient(total, P)

    label = {}
    for B in P.blocks:
        k, _ = B[0]
        n, s = keys[k]
        if n != 0:
            raise StructuralError('A realized point is not identified with any vertex')
        for p in B:
            label[p] = s
    space = FiniteEPMet.from_arrays([label[b] for b in glued.points], glued.values, glued.finite)
    witness = {(n, s, i): label[point(n, s, i)] for n, s in keys for i in range(n + 1)}
    return RealizationResult(space, MappingProxyType(witness))


################# the finite singular nerve #################

def nerve_membership(M, simplex):
    """exp(-max pairwise distance) of a tuple of points of M; 1.0 for a single point."""
    worst = 0.0
    for p, q in itertools.combinations(simplex, 2):
        d = M.distance(p, q)
        if is_inf(d):
            raise StructuralError('Tuple ' + repr(simplex) + ' has points at infinite distance')
        worst = max(worst, d)
    return exp_neg(worst)


def fin_singular_nerve(M, max_dim):
    """
    Dimensions 0..max_dim of the finite singular nerve of M.

    S_n holds every tuple (p_0, ..., p_n) of points at pairwise finite
    distance, i.e. every map [n] -> M that is Lipschitz out of the discrete
    simplex, with membership exp(-its best Lipschitz constant).
    """
    if max_dim < 0:
        raise StructuralError('max_dim must be >= 0')
    points = M.points
    sets = []
    for n in range(max_dim + 1):
        members = {}
        for simplex in itertools.product(points, repeat=n + 1):
            idx = [M.index(p) for p in simplex]
            if all(M.finite[a, b] for a in idx for b in idx):
                members[simplex] = nerve_membership(M, simplex)
        sets.append(fuzzy_set(members))
    faces = {(n, i): {x: x[:i] + x[i + 1:] for x in sets[n].elements}
             for n in range(1, max_dim + 1) for i in range(n + 1)}
    degeneracies = {(n, j): {x: x[:j + 1] + x[j:] for x in sets[n].elements}
                    for n in range(max_dim) for j in range(n + 1)}
    return TruncatedSimplicialFuzzySet(max_dim, tuple(sets), faces, degeneracies)


def one_skeleton(M):
    """Graph on the points of M with an edge exp(-d(x, y)) for every finite d, x != y."""
    weights = {}
    for i, j in itertools.combinations(range(len(M.points)), 2):
        if M.finite[i, j]:
            weights[(M.points[i], M.points[j])] = exp_neg(float(M.values[i, j]))
    return FuzzyGraph(M.points, weights)


def one_skeleton_of(S):
    """
    The 1-skeleton of a simplicial fuzzy set: its 0-simplices, joined by the
    1-simplices whose two vertices differ, at the largest membership among
    the 1-simplices joining them.
    """
    if S.max_dim < 1:
        return FuzzyGraph(S.sets[0].elements, {})
    order = {v: i for i, v in enumerate(S.sets[0].elements)}
    weights = {}
    for x in S.sets[1].elements:
        u, v = S.d(1, 1, x), S.d(1, 0, x)
        if u == v:
            continue
        key = (u, v) if order[u] < order[v] else (v, u)
        weights[key] = max(weights.get(key, 0.0), S.membership(1, x))
    return FuzzyGraph(S.sets[0].elements, weights)


################# hom-set comparison #################

@dataclass(frozen=True)
class AdjunctionReport:
    """
    realization_count: non-expansive maps fin_metric_realize(S).space -> M
    nerve_count:       morphisms S -> fin_singular_nerve(M, D)
    bijection:         the canonical translation between the two is a bijection
    """
    realization_count: int
    nerve_count: int
    bijection: bool
    candidates: MappingProxyType = field(compare=False, repr=False)

    def as_dict(self):
        return {'realization_count': self.realization_count,
                'nerve_count': self.nerve_count,
                'bijection': self.bijection,
                'candidates': dict(self.candidates)}


def _nonexpansive_assignment(assignment, source_values, source_finite, target_values, target_finite):
    n = len(assignment)
    for i in range(n):
        for j in range(i + 1, n):
            if not source_finite[i, j]:
                continue
            a, b = assignment[i], assignment[j]
            if not target_finite[a, b] or target_values[a, b] > source_values[i, j]:
                return False
    return True


def _translate(S, witness, sigma):
    """Sends a map on realized points to the vertex-tuple morphism S -> nerve."""
    phi = {}
    for n in range(S.max_dim + 1):
        phi[n] = {s: tuple(sigma[witness[(n, s, i)]] for i in range(n + 1)) for s in S.sets[n].elements}
    return phi


def _freeze(phi):
    return tuple((n, tuple(sorted(phi[n].items(), key=repr))) for n in sorted(phi))


def adjunction_check(S, M, n_jobs=1, verbose=False):
    """
    Compares Hom(fin_metric_realize(S), M) with Hom(S, fin_singular_nerve(M, D))
    by enumeration.

    Non-expansive maps are found among all |M|^|R| point maps out of the
    realization R. Morphisms into the nerve are found among the candidates
    phi_n(s) = (phi_0(v_0), ..., phi_0(v_n)) for every vertex map phi_0,
    which is every candidate since a tuple is determined by its vertices.
    S is read as the D-skeletal simplicial fuzzy set it generates.

    input:

        S:      TruncatedSimplicialFuzzySet
        M:      FiniteEPMet
        n_jobs: worker processes for the non-expansive map search

    output:

        AdjunctionReport. Raises EnumerationLimitError when either side has
        more than MAX_ENUMERATION candidates.
    """
    _require_valid(S)
    if validate_epmet(M):
        raise StructuralError('Target space is not an extended pseudo-metric space')

    R = fin_metric_realize(S)
    candidates = {'realization_maps': len(M) ** len(R.space), 'vertex_maps': len(M) ** len(S.sets[0])}
    if max(candidates.values()) > MAX_ENUMERATION:
        raise EnumerationLimitError('Adjunction check needs ' + str(max(candidates.values()))
                                    + ' candidates, more than ' + str(MAX_ENUMERATION), candidates)

    D = S.max_dim
    N = fin_singular_nerve(M, D)
    m = len(M)

    if verbose:
        print('Enumerating ' + str(candidates['realization_maps']) + ' maps out of the realization', flush=True)

    assignments = list(itertools.product(range(m), repeat=len(R.space)))
    check = partial(_nonexpansive_assignment, source_values=R.space.values, source_finite=R.space.finite,
                    target_values=M.values, target_finite=M.finite)
    if n_jobs == 1:
        keep = [check(a) for a in tqdm(assignments, position=0, leave=True, disable=not verbose)]
    else:
        with Pool(processes=n_jobs) as pool:
            chunksize = int(np.ceil(len(assignments) / n_jobs))
            keep = list(tqdm(pool.imap(check, assignments, chunksize=chunksize),
                             total=len(assignments), position=0, leave=True, disable=not verbose))
    left = []
    for a, ok in zip(assignments, keep):
        if ok:
            left.append(PointMap(R.space, M, {p: M.points[t] for p, t in zip(R.space.points, a)}))

    if verbose:
        print('Enumerating ' + str(candidates['vertex_maps']) + ' vertex maps into the nerve', flush=True)

    right = []
    vertex_lists = {(n, s): vertices(S, n, s) for n in range(D + 1) for s in S.sets[n].elements}
    for images in tqdm(itertools.product(M.points, repeat=len(S.sets[0])),
                       total=candidates['vertex_maps'], position=0, leave=True, disable=not verbose):
        phi0 = dict(zip(S.sets[0].elements, images))
        phi = {n: {} for n in range(D + 1)}
        total = True
        for (n, s), vs in vertex_lists.items():
            x = tuple(phi0[v] for v in vs)
            if x not in N.sets[n]:
                total = False
                break
            phi[n][s] = x
        if total and is_simplicial_morphism(phi, S, N):
            right.append(phi)

    translated = [_freeze(_translate(S, R.witness, f.assignment)) for f in left]
    targets = {_freeze(phi) for phi in right}
    bijection = (len(set(translated)) == len(translated) and set(translated) == targets
                 and all(is_nonexpansive(f) for f in left))

    return AdjunctionReport(len(left), len(right), bijection, MappingProxyType(candidates))
