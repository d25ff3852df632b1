import itertools
from dataclasses import dataclass, field
from types import MappingProxyType

from scipy.special import comb

from .errors import DomainError, StructuralError
from .fuzzy_core import ClassicalFuzzySet, fuzzy_set

DEFAULT_MAX_DIM = 2


################# the simplex category #################

@dataclass(frozen=True)
class SimplexMorphism:
    """
    Weakly monotone map [source] -> [target], stored as the tuple of images
    of 0..source.
    """
    source: int
    target: int
    values: tuple

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if self.source < 0 or self.target < 0:
            raise DomainError('Simplex dimensions must be >= 0')
        if len(values) != self.source + 1:
            raise StructuralError('A map out of [' + str(self.source) + '] needs '
                                  + str(self.source + 1) + ' values, got ' + str(len(values)))
        if any(v < 0 or v > self.target for v in values):
            raise StructuralError('Values ' + repr(values) + ' leave [' + str(self.target) + ']')
        if any(values[i] > values[i + 1] for i in range(len(values) - 1)):
            raise StructuralError('Values ' + repr(values) + ' are not weakly monotone')
        object.__setattr__(self, 'values', values)

    def __call__(self, k):
        return self.values[k]

    @property
    def is_injective(self):
        return len(set(self.values)) == len(self.values)

    @property
    def is_surjective(self):
        return set(self.values) == set(range(self.target + 1))


@dataclass(frozen=True)
class FaceDegeneracyWord:
    """
    Normal form delta_{i_1} ... delta_{i_r} sigma_{j_1} ... sigma_{j_s} of a
    map [source] -> [target], with i_1 > ... > i_r and j_1 < ... < j_s.
    """
    source: int
    target: int
    faces: tuple = ()
    degeneracies: tuple = ()

    def __post_init__(self):
        faces = tuple(self.faces)
        degeneracies = tuple(self.degeneracies)
        n, m = self.source, self.target
        if m != n - len(degeneracies) + len(faces):
            raise StructuralError('Word length does not match [' + str(n) + '] -> [' + str(m) + ']')
        if any(faces[k] <= faces[k + 1] for k in range(len(faces) - 1)):
            raise StructuralError('Face indices must be strictly decreasing')
        if any(degeneracies[k] >= degeneracies[k + 1] for k in range(len(degeneracies) - 1)):
            raise StructuralError('Degeneracy indices must be strictly increasing')
        if faces and not (0 <= faces[-1] and faces[0] <= m):
            raise StructuralError('Face index out of range')
        if degeneracies and not (0 <= degeneracies[0] and degeneracies[-1] < n):
            raise StructuralError('Degeneracy index out of range')
        object.__setattr__(self, 'faces', faces)
        object.__setattr__(self, 'degeneracies', degeneracies)


def identity(n):
    return SimplexMorphism(n, n, tuple(range(n + 1)))


def face(n, i):
    """delta^n_i : [n-1] -> [n], the injection skipping i."""
    if n < 1 or not (0 <= i <= n):
        raise DomainError('face(' + str(n) + ', ' + str(i) + ') is out of range')
    return SimplexMorphism(n - 1, n, tuple(k if k < i else k + 1 for k in range(n)))


def degeneracy(n, j):
    """sigma^n_j : [n+1] -> [n], the surjection hitting j twice."""
    if n < 0 or not (0 <= j <= n):
        raise DomainError('degeneracy(' + str(n) + ', ' + str(j) + ') is out of range')
    return SimplexMorphism(n + 1, n, tuple(k if k <= j else k - 1 for k in range(n + 2)))


def compose(g, f):
    """g o f, defined when f.target == g.source."""
    if f.target != g.source:
        raise StructuralError('Cannot compose [' + str(f.source) + '] -> [' + str(f.target)
                              + '] with a map out of [' + str(g.source) + ']')
    return SimplexMorphism(f.source, g.target, tuple(g.values[v] for v in f.values))


def factorize(f):
    """
    Unique face/degeneracy normal form of a simplex morphism.

    Faces are the indices of [target] missed by f (decreasing), degeneracies
    the j with f(j) = f(j+1) (increasing).
    """
    image = set(f.values)
    faces = tuple(i for i in range(f.target, -1, -1) if i not in image)
    degeneracies = tuple(j for j in range(f.source) if f.values[j] == f.values[j + 1])
    return FaceDegeneracyWord(f.source, f.target, faces, degeneracies)


def recompose(word):
    """Evaluates a FaceDegeneracyWord back to a SimplexMorphism."""
    result = identity(word.source)
    dim = word.source
    for j in reversed(word.degeneracies):
        dim -= 1
        result = compose(degeneracy(dim, j), result)
    for i in reversed(word.faces):
        dim += 1
        result = compose(face(dim, i), result)
    return result


def hom_set(n, m):
    """All weakly monotone maps [n] -> [m], in lexicographic order."""
    return [SimplexMorphism(n, m, values)
            for values in itertools.combinations_with_replacement(range(m + 1), n + 1)]


def hom_set_size(n, m):
    return int(comb(n + m + 1, n + 1, exact=True))


################# truncated simplicial classical fuzzy sets #################

@dataclass(frozen=True)
class TruncatedSimplicialFuzzySet:
    """
    Dimensions 0..max_dim of a simplicial classical fuzzy set.

    sets:         tuple of ClassicalFuzzySet, sets[n] = S_n
    faces:        {(n, i): {x: d^i_n(x)}} for 1 <= n <= max_dim, 0 <= i <= n
    degeneracies: {(n, j): {x: s^j_n(x)}} for 0 <= j <= n < max_dim

    Construction only checks that every table is present, total and lands in
    the right set; the simplicial relations are checked by validate().
    """
    max_dim: int
    sets: tuple
    faces: MappingProxyType = field(compare=False, repr=False)
    degeneracies: MappingProxyType = field(compare=False, repr=False)

    def __post_init__(self):
        D = self.max_dim
        if D < 0:
            raise DomainError('max_dim must be >= 0')
        sets = tuple(self.sets)
        if len(sets) != D + 1:
            raise StructuralError('Expected ' + str(D + 1) + ' dimensions, got ' + str(len(sets)))
        if not all(isinstance(S_n, ClassicalFuzzySet) for S_n in sets):
            raise StructuralError('Every dimension must be a ClassicalFuzzySet')
        faces = {key: dict(table) for key, table in dict(self.faces).items()}
        degeneracies = {key: dict(table) for key, table in dict(self.degeneracies).items()}

        expected_faces = {(n, i) for n in range(1, D + 1) for i in range(n + 1)}
        expected_degeneracies = {(n, j) for n in range(D) for j in range(n + 1)}
        if set(faces) != expected_faces:
            raise StructuralError('Face tables ' + repr(sorted(set(faces) ^ expected_faces)) + ' missing or unexpected')
        if set(degeneracies) != expected_degeneracies:
            raise StructuralError('Degeneracy tables ' + repr(sorted(set(degeneracies) ^ expected_degeneracies))
                                  + ' missing or unexpected')
        for (n, i), table in faces.items():
            _check_table(table, sets[n], sets[n - 1], 'd^' + str(i) + '_' + str(n))
        for (n, j), table in degeneracies.items():
            _check_table(table, sets[n], sets[n + 1], 's^' + str(j) + '_' + str(n))

        object.__setattr__(self, 'sets', sets)
        object.__setattr__(self, 'faces', MappingProxyType(faces))
        object.__setattr__(self, 'degeneracies', MappingProxyType(degeneracies))

    def d(self, n, i, x):
        return self.faces[(n, i)][x]

    def s(self, n, j, x):
        return self.degeneracies[(n, j)][x]

    def membership(self, n, x):
        return self.sets[n].membership[x]


def _check_table(table, source, target, name):
    if set(table) != set(source.elements):
        raise StructuralError(name + ' is not total on its source')
    for x, y in table.items():
        if y not in target:
            raise StructuralError(name + ' sends ' + repr(x) + ' outside its target: ' + repr(y))


def act(S, f, x):
    """
    S(f)(x) for a simplex morphism f : [k] -> [n] and x in S_n, evaluated
    through the normal form of f.
    """
    if f.target > S.max_dim or f.source > S.max_dim:
        raise StructuralError('Morphism leaves the truncation of S')
    word = factorize(f)
    dim = f.target
    for i in word.faces:
        x = S.d(dim, i, x)
        dim -= 1
    for j in word.degeneracies:
        x = S.s(dim, j, x)
        dim += 1
    return x


def vertices(S, n, x):
    """The 0-simplices of x in S_n, in vertex order 0..n."""
    return [act(S, SimplexMorphism(0, n, (i,)), x) for i in range(n + 1)]


@dataclass(frozen=True)
class Violation:
    relation: str
    dim: int
    element: object
    detail: str = ''

    def __str__(self):
        return (self.relation + ' at n=' + str(self.dim) + ' on ' + repr(self.element)
                + (': ' + self.detail if self.detail else ''))


def validate(S):
    """
    Lists every failure of the simplicial relations on generators and every
    face/degeneracy action that decreases membership.

    input:

        S: structurally well-formed TruncatedSimplicialFuzzySet

    output:

        list of Violation; empty iff S is a valid truncated simplicial fuzzy set.
    """
    D = S.max_dim
    violations = []

    def check(relation, n, x, left, right, detail):
        if left != right:
            violations.append(Violation(relation, n, x, detail + ': ' + repr(left) + ' != ' + repr(right)))

    for n in range(2, D + 1):
        for x in S.sets[n].elements:
            for j in range(1, n + 1):
                for i in range(j):
                    check('d i<j', n, x, S.d(n - 1, i, S.d(n, j, x)), S.d(n - 1, j - 1, S.d(n, i, x)),
                          'd%d d%d = d%d d%d' % (i, j, j - 1, i))

    for n in range(D):
        for x in S.sets[n].elements:
            for j in range(n + 1):
                y = S.s(n, j, x)
                for i in range(n + 2):
                    left = S.d(n + 1, i, y)
                    if i == j or i == j + 1:
                        check('d s i=j' if i == j else 'd s i=j+1', n, x, left, x, 'd%d s%d = id' % (i, j))
                    elif i < j:
                        check('d s i<j', n, x, left, S.s(n - 1, j - 1, S.d(n, i, x)),
                              'd%d s%d = s%d d%d' % (i, j, j - 1, i))
                    else:
                        check('d s i>j+1', n, x, left, S.s(n - 1, j, S.d(n, i - 1, x)),
                              'd%d s%d = s%d d%d' % (i, j, j, i - 1))

    for n in range(D - 1):
        for x in S.sets[n].elements:
            for j in range(n + 1):
                for i in range(j + 1):
                    check('s i<=j', n, x, S.s(n + 1, i, S.s(n, j, x)), S.s(n + 1, j + 1, S.s(n, i, x)),
                          's%d s%d = s%d s%d' % (i, j, j + 1, i))

    for (n, i), table in sorted(S.faces.items()):
        for x, y in table.items():
            if S.membership(n - 1, y) < S.membership(n, x):
                violations.append(Violation('monotonicity', n, x, 'd%d lowers membership %r -> %r'
                                            % (i, S.membership(n, x), S.membership(n - 1, y))))
    for (n, j), table in sorted(S.degeneracies.items()):
        for x, y in table.items():
            if S.membership(n + 1, y) < S.membership(n, x):
                violations.append(Violation('monotonicity', n, x, 's%d lowers membership %r -> %r'
                                            % (j, S.membership(n, x), S.membership(n + 1, y))))
    return violations


def is_simplicial_morphism(phi, S, T):
    """
    True iff the dimension-wise maps phi[n] : S_n -> T_n commute with every
    face and degeneracy and never decrease membership.
    """
    D = min(S.max_dim, T.max_dim)
    for n in range(D + 1):
        table = phi[n]
        for x in S.sets[n].elements:
            if x not in table:
                raise StructuralError('Morphism is not total on S_' + str(n))
            if table[x] not in T.sets[n]:
                return False
            if T.membership(n, table[x]) < S.membership(n, x):
                return False
    for n in range(1, D + 1):
        for i in range(n + 1):
            for x in S.sets[n].elements:
                if phi[n - 1][S.d(n, i, x)] != T.d(n, i, phi[n][x]):
                    return False
    for n in range(D):
        for j in range(n + 1):
            for x in S.sets[n].elements:
                if phi[n + 1][S.s(n, j, x)] != T.s(n, j, phi[n][x]):
                    return False
    return True


def from_tables(max_dim, sets, faces, degeneracies):
    return TruncatedSimplicialFuzzySet(max_dim, tuple(sets), faces, degeneracies)


def standard_simplex(m, a, D):
    """
    The representable simplicial fuzzy set on [m] at constant membership a,
    truncated at D: S_n = Hom([n],[m]) with precomposition as action.
    Elements are the value tuples of the maps.
    """
    if not (0 < a <= 1):
        raise DomainError('Membership ' + repr(a) + ' is not in (0,1]')
    if m < 0 or D < m:
        raise DomainError('standard_simplex needs 0 <= m <= D, got m=' + str(m) + ', D=' + str(D))
    sets = [fuzzy_set({f.values: a for f in hom_set(n, m)}) for n in range(D + 1)]
    faces = {}
    degeneracies = {}
    for n in range(1, D + 1):
        for i in range(n + 1):
            faces[(n, i)] = {x: x[:i] + x[i + 1:] for x in sets[n].elements}
    for n in range(D):
        for j in range(n + 1):
            degeneracies[(n, j)] = {x: x[:j + 1] + x[j:] for x in sets[n].elements}
    return TruncatedSimplicialFuzzySet(D, tuple(sets), faces, degeneracies)


def _degenerate_label(sigma, y):
    return 's' + ''.join(str(v) for v in sigma.values) + '(' + str(y) + ')'


def degenerate_fill(S, max_dim):
    """
    Extends S to a larger truncation by adding only degenerate simplices.

    Every simplex is written uniquely as S(sigma)(y) with sigma a surjection
    and y nondegenerate; the new dimensions hold exactly the pairs
    (sigma, y) with sigma : [n] -> [p] surjective and y in S_p nondegenerate,
    each at the membership of y.
    """
    D = S.max_dim
    if max_dim < D:
        raise DomainError('degenerate_fill cannot lower the truncation')
    if max_dim == D:
        return S

    # canonical[n][x] = (sigma, y): x = S(sigma)(y), y nondegenerate
    canonical = []
    for n in range(D + 1):
        table = {}
        if n > 0:
            for j in range(n):
                for w in S.sets[n - 1].elements:
                    x = S.s(n - 1, j, w)
                    if x not in table:
                        tau, z = canonical[n - 1][w]
                        table[x] = (compose(tau, degeneracy(n - 1, j)), z)
        for x in S.sets[n].elements:
            if x not in table:
                table[x] = (identity(n), x)
        canonical.append(table)

    def realize(sigma, y):
        # the element S(sigma)(y) of dimension sigma.source, old or new
        if sigma.source <= D:
            return act(S, sigma, y)
        return _degenerate_label(sigma, y)

    def restrict(sigma, y, f):
        # S(f)(S(sigma)(y)) = S(sigma o f)(y), re-normalised through the image of y
        g = compose(sigma, f)
        word = factorize(g)
        injection = recompose(FaceDegeneracyWord(g.target - len(word.faces), g.target, word.faces, ()))
        surjection = recompose(FaceDegeneracyWord(g.source, g.target - len(word.faces), (), word.degeneracies))
        z = act(S, injection, y)
        tau, w = canonical[injection.source][z]
        return realize(compose(tau, surjection), w)

    sets = list(S.sets)
    faces = dict(S.faces)
    degeneracies = dict(S.degeneracies)
    forms = []
    for n in range(D + 1, max_dim + 1):
        form = {}
        for p in range(D + 1):
            for sigma in hom_set(n, p):
                if not sigma.is_surjective:
                    continue
                for y in S.sets[p].elements:
                    if canonical[p][y][0] == identity(p):
                        form[_degenerate_label(sigma, y)] = (sigma, y)
        forms.append(form)
        sets.append(fuzzy_set({x: S.membership(sigma.target, y) for x, (sigma, y) in form.items()}))

    def form_of(n, x):
        if n <= D:
            return canonical[n][x]
        return forms[n - D - 1][x]

    for n in range(D + 1, max_dim + 1):
        for i in range(n + 1):
            faces[(n, i)] = {x: restrict(*form_of(n, x), face(n, i)) for x in sets[n].elements}
    for n in range(D, max_dim):
        for j in range(n + 1):
            degeneracies[(n, j)] = {x: restrict(*form_of(n, x), degeneracy(n, j)) for x in sets[n].elements}

    return TruncatedSimplicialFuzzySet(max_dim, tuple(sets), faces, degeneracies)
