import numpy as np
from dataclasses import dataclass, field
from numba import njit
from scipy.linalg import eigh
from scipy.spatial.distance import cdist
from scipy.special import xlogy
from sklearn.utils import check_array, check_random_state
from tqdm import tqdm

from .epmet import INF, FiniteEPMet
from .errors import DomainError, StructuralError
from .fuzzy_core import (MIN_STRENGTH, PROBABILISTIC, FuzzyGraph, fuzzy_union_graphs, fuzzy_union_many,
                         graph_as_fuzzy_set)
from .realization import fin_singular_nerve, one_skeleton_of

ISOLATED_DEGREE = 1e-12
NU_CLAMP = 1e-9
BRIDGE_TOL = 1e-12


################# data types #################

class Dataset:
    """
    N rows of Dim finite floats.
    """

    def __init__(self, rows):
        try:
            rows = check_array(rows, dtype=np.float64, ensure_2d=True)
        except ValueError as err:
            raise DomainError('Dataset is not an N x Dim array of finite floats: ' + str(err))
        rows = np.array(rows, dtype=np.float64)
        rows.setflags(write=False)
        self.rows = rows

    def __len__(self):
        return self.rows.shape[0]

    @property
    def dim(self):
        return self.rows.shape[1]


def as_dataset(X):
    return X if isinstance(X, Dataset) else Dataset(X)


@dataclass(frozen=True, eq=False)
class Embedding:
    coords: np.ndarray
    loss_history: tuple = field(default=())

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64)
        if coords.ndim != 2:
            raise StructuralError('Embedding coordinates must be an N x d array')
        if not np.all(np.isfinite(coords)):
            raise DomainError('Embedding has non-finite coordinates')
        coords.setflags(write=False)
        object.__setattr__(self, 'coords', coords)
        object.__setattr__(self, 'loss_history', tuple(float(c) for c in self.loss_history))

    def __len__(self):
        return self.coords.shape[0]


################# neighbourhoods and local graphs #################

def knn(X, k):
    """
    Exact k nearest neighbours of every row by brute force.

    input:

        X: Dataset (or anything check_array accepts)
        k: 1 <= k < N

    output:

        (indices, distances): two N x k arrays; ties are broken by smaller index.
    """
    X = as_dataset(X)
    N = len(X)
    if not (1 <= k < N):
        raise DomainError('k must satisfy 1 <= k < N = ' + str(N) + ', got k=' + str(k))
    dist = cdist(X.rows, X.rows)
    np.fill_diagonal(dist, np.inf)
    indices = np.argsort(dist, axis=1, kind='stable')[:, :k]
    distances = np.take_along_axis(dist, indices, axis=1)
    return indices, distances


@njit(cache=True)
def _local_weights(distances):
    rho = distances[0]
    weights = np.empty(distances.shape[0])
    for j in range(distances.shape[0]):
        weights[j] = max(np.exp(-max(0.0, distances[j] - rho)), MIN_STRENGTH)
    return weights


def _star(X, i, neighbors):
    """
    Row i's k nearest neighbours, followed by every other row at exactly the
    k-th neighbour's distance, so that equal rows are never split by the
    index tie-break.
    """
    indices, distances = neighbors
    indices = np.asarray(indices[i], dtype=np.int64)
    distances = np.asarray(distances[i], dtype=np.float64)
    row = cdist(X.rows[i:i + 1], X.rows)[0]
    tied = np.nonzero(row == row[indices[-1]])[0]
    extra = np.setdiff1d(tied, np.append(indices, i))
    return (np.concatenate([indices, extra]),
            np.concatenate([distances, np.full(len(extra), distances[-1])]))


def local_fuzzy_graph(X, i, k, neighbors=None):
    """
    Star graph around row i over its k nearest neighbours, with weight
    exp(-max(0, d(x_i, x_j) - rho_i)) to neighbour j; rho_i is the distance
    to the nearest neighbour, so that neighbour gets weight 1. Rows tied
    exactly with the k-th neighbour join the star. Vertices are all row
    indices. Weights below MIN_STRENGTH are raised to it.

    neighbors: optional (indices, distances) from knn(X, k).
    """
    X = as_dataset(X)
    if not (0 <= i < len(X)):
        raise DomainError('Row ' + str(i) + ' is not in the dataset')
    if neighbors is None:
        neighbors = knn(X, k)
    indices, distances = _star(X, i, neighbors)
    weights = _local_weights(np.ascontiguousarray(distances))
    edges = {(int(i), int(j)): float(w) for j, w in zip(indices, weights)}
    return FuzzyGraph(tuple(range(len(X))), edges)


def local_fuzzy_graphs(X, k, neighbors=None, verbose=False):
    X = as_dataset(X)
    if neighbors is None:
        neighbors = knn(X, k)
    return [local_fuzzy_graph(X, i, k, neighbors)
            for i in tqdm(range(len(X)), position=0, leave=True, disable=not verbose)]


def global_fuzzy_graph(X, k, c=PROBABILISTIC, verbose=False):
    """Union under c of the local fuzzy graphs of every row."""
    return fuzzy_union_graphs(local_fuzzy_graphs(X, k, verbose=verbose), c)


################# spectral initialisation #################

def weight_matrix(G):
    order = {v: a for a, v in enumerate(G.vertices)}
    W = np.zeros((len(G.vertices), len(G.vertices)))
    for (u, v), w in G.weights.items():
        W[order[u], order[v]] = w
        W[order[v], order[u]] = w
    return W


def spectral_embed(G, d, seed=0, max_coord=None, noise=0.0):
    """
    Eigenvectors of the symmetric normalised Laplacian L = I - D^-1/2 W D^-1/2
    for its d smallest eigenvalues after the trivial one.

    The trivial direction D^1/2 1 is deflated out of L before a dense
    symmetric solve, so disconnected graphs keep their component structure
    in the returned columns. Isolated vertices get degree ISOLATED_DEGREE.
    Each column is sign-fixed so its first nonzero entry is positive.

    max_coord: if given, coordinates are rescaled so the largest magnitude is max_coord
    noise:     standard deviation of seeded gaussian jitter added after rescaling
    """
    n = len(G.vertices)
    if d < 1 or d >= n:
        raise DomainError('Spectral embedding needs 1 <= d < |V| = ' + str(n) + ', got d=' + str(d))

    W = weight_matrix(G)
    degree = W.sum(axis=1)
    degree[degree == 0] = ISOLATED_DEGREE
    scale = 1.0 / np.sqrt(degree)
    L = np.eye(n) - scale[:, None] * W * scale[None, :]

    trivial = np.sqrt(degree)
    trivial /= np.linalg.norm(trivial)
    L = L + 3.0 * np.outer(trivial, trivial)

    _, vectors = eigh(L, subset_by_index=[0, d - 1])
    for c in range(d):
        column = vectors[:, c]
        nonzero = np.nonzero(np.abs(column) > 1e-12)[0]
        if len(nonzero) > 0 and column[nonzero[0]] < 0:
            vectors[:, c] = -column

    if max_coord is not None:
        largest = np.abs(vectors).max()
        if largest > 0:
            vectors = vectors * (max_coord / largest)
    if noise > 0:
        random_state = check_random_state(seed)
        vectors = vectors + random_state.normal(scale=noise, size=vectors.shape)
    return Embedding(vectors)


################# cross-entropy layout #################

def low_dimensional_weight(y_i, y_j):
    nu = np.exp(-np.linalg.norm(np.asarray(y_i) - np.asarray(y_j)))
    return float(np.clip(nu, NU_CLAMP, 1 - NU_CLAMP))


def edge_cross_entropy(w, y_i, y_j):
    nu = low_dimensional_weight(y_i, y_j)
    return float(xlogy(w, w) - xlogy(w, nu) + xlogy(1 - w, 1 - w) - xlogy(1 - w, 1 - nu))


def cross_entropy(G, Y):
    """
    Fuzzy set cross entropy between G and the graph of low dimensional
    weights exp(-|y_i - y_j|) over every pair of vertices; non-edges have
    weight 0 in G.
    """
    coords = Y.coords if isinstance(Y, Embedding) else np.asarray(Y, dtype=float)
    n = len(G.vertices)
    if coords.shape[0] != n:
        raise StructuralError('Embedding has ' + str(coords.shape[0]) + ' rows for ' + str(n) + ' vertices')
    return _cross_entropy(weight_matrix(G), coords)


def _cross_entropy(W, coords):
    a, b = np.triu_indices(W.shape[0], k=1)
    w = W[a, b]
    nu = np.clip(np.exp(-np.linalg.norm(coords[a] - coords[b], axis=1)), NU_CLAMP, 1 - NU_CLAMP)
    return float(np.sum(xlogy(w, w) - xlogy(w, nu) + xlogy(1 - w, 1 - w) - xlogy(1 - w, 1 - nu)))


@njit(cache=True)
def _gradient_coefficient(w, r):
    nu = np.exp(-r)
    if nu < NU_CLAMP:
        nu = NU_CLAMP
    elif nu > 1 - NU_CLAMP:
        nu = 1 - NU_CLAMP
    return (w - (1 - w) * nu / (1 - nu)) / r


def cross_entropy_gradient(G, Y, edge):
    """
    Gradient of the cross entropy term of one vertex pair with respect to all
    coordinates; nonzero only on the two endpoints.
    """
    coords = Y.coords if isinstance(Y, Embedding) else np.asarray(Y, dtype=float)
    order = {v: a for a, v in enumerate(G.vertices)}
    u, v = edge
    a, b = order[u], order[v]
    diff = coords[a] - coords[b]
    r = np.linalg.norm(diff)
    gradient = np.zeros_like(coords, dtype=float)
    if r == 0:
        return gradient
    g = _gradient_coefficient(G.weight(u, v), r) * diff
    gradient[a] = g
    gradient[b] = -g
    return gradient


@njit(cache=True)
def _clip(val):
    if val > 4.0:
        return 4.0
    elif val < -4.0:
        return -4.0
    return val


@njit(cache=True)
def _sgd_epoch(Y, heads, tails, weights, order, raw_negatives, alpha):
    n_vertices = Y.shape[0]
    dim = Y.shape[1]
    for e in order:
        i = heads[e]
        j = tails[e]

        r = 0.0
        for c in range(dim):
            r += (Y[i, c] - Y[j, c]) ** 2
        r = np.sqrt(r)
        if r > 0.0:
            coeff = _gradient_coefficient(weights[e], r)
            for c in range(dim):
                grad = _clip(coeff * (Y[i, c] - Y[j, c]))
                Y[i, c] -= alpha * grad
                Y[j, c] += alpha * grad

        if n_vertices <= 2:
            continue
        lo = min(i, j)
        hi = max(i, j)
        for q in range(raw_negatives.shape[1]):
            k = raw_negatives[e, q]
            if k >= lo:
                k += 1
            if k >= hi:
                k += 1
            r = 0.0
            for c in range(dim):
                r += (Y[i, c] - Y[k, c]) ** 2
            r = np.sqrt(r)
            if r == 0.0:
                continue
            coeff = _gradient_coefficient(0.0, r)
            for c in range(dim):
                Y[i, c] -= alpha * _clip(coeff * (Y[i, c] - Y[k, c]))
    return Y


def sgd_layout(G, Y0, n_epochs=200, lr=1.0, neg=5, seed=0, track_loss=False, verbose=False):
    """
    Minimises cross_entropy(G, Y) by stochastic gradient descent from Y0.

    Each epoch visits the edges in a seeded random order; every edge pulls its
    endpoints along the negative gradient and is followed by neg repulsive
    steps of its head against vertices drawn uniformly from the other
    vertices. The learning rate decays linearly from lr to 0 and every
    coordinate step is clipped to [-4, 4]. An epoch that raises the cross
    entropy is undone and the rate is halved for the remaining epochs, so
    the loss never increases from one epoch to the next.

    output:

        Embedding; with track_loss the cross entropy after each epoch is kept
        in loss_history, preceded by the initial loss.
    """
    coords = Y0.coords if isinstance(Y0, Embedding) else np.asarray(Y0, dtype=float)
    n = len(G.vertices)
    if coords.ndim != 2 or coords.shape[0] != n:
        raise StructuralError('Initial embedding has shape ' + str(coords.shape) + ' for ' + str(n) + ' vertices')
    if n_epochs < 0 or neg < 0:
        raise DomainError('n_epochs and neg must be >= 0')
    if not lr > 0:
        raise DomainError('lr must be > 0, got ' + repr(lr))

    order_of = {v: a for a, v in enumerate(G.vertices)}
    heads = np.array([order_of[u] for u, _ in G.edges], dtype=np.int64)
    tails = np.array([order_of[v] for _, v in G.edges], dtype=np.int64)
    weights = np.array(list(G.weights.values()), dtype=np.float64)
    n_edges = len(heads)

    W = weight_matrix(G)
    rng = np.random.default_rng(seed)
    Y = np.array(coords, dtype=np.float64, copy=True)
    loss = _cross_entropy(W, Y)
    history = [loss]
    rate = lr
    for epoch in tqdm(range(n_epochs), position=0, leave=True, disable=not verbose):
        alpha = rate * (1.0 - epoch / n_epochs)
        order = rng.permutation(n_edges).astype(np.int64)
        raw_negatives = rng.integers(0, max(n - 2, 1), size=(n_edges, neg)).astype(np.int64)
        trial = _sgd_epoch(Y.copy(), heads, tails, weights, order, raw_negatives, alpha)
        trial_loss = _cross_entropy(W, trial)
        if trial_loss > loss:
            rate = rate / 2
        else:
            Y, loss = trial, trial_loss
        history.append(loss)
    return Embedding(Y, tuple(history) if track_loss else ())


################# pipeline #################

def umap(X, d=2, k=15, n_epochs=200, lr=1.0, neg=5, seed=0, verbose=False):
    """
    knn -> local fuzzy graphs -> probabilistic union -> spectral_embed
    -> sgd_layout. Deterministic given seed.
    """
    X = as_dataset(X)
    N = len(X)
    if not (1 <= k < N):
        raise DomainError('k must satisfy 1 <= k < N = ' + str(N) + ', got k=' + str(k))
    if not (1 <= d < N):
        raise DomainError('d must satisfy 1 <= d < N = ' + str(N) + ', got d=' + str(d))

    if verbose:
        print('Computing ' + str(k) + ' nearest neighbours of ' + str(N) + ' points...', flush=True)
    G = global_fuzzy_graph(X, k, PROBABILISTIC, verbose=verbose)
    if verbose:
        print('Fuzzy graph has ' + str(len(G.edges)) + ' edges. Spectral initialisation...', flush=True)
    Y0 = spectral_embed(G, d, seed=seed, max_coord=10.0)
    if verbose:
        print('Optimising layout for ' + str(n_epochs) + ' epochs...', flush=True)
    return sgd_layout(G, Y0, n_epochs=n_epochs, lr=lr, neg=neg, seed=seed, verbose=verbose)


################# correspondence with the nerve #################

def local_metric(X, i, k, neighbors=None):
    """
    The extended pseudo-metric of row i: on i and its k nearest neighbours,
    d(i, j) = max(0, d(x_i, x_j) - rho_i), and inf between two distinct
    neighbours. The neighbours are those of local_fuzzy_graph, ties included.

    The result is not a metric in general (the triangle through i fails),
    but the nerve only reads pairwise distances.
    """
    X = as_dataset(X)
    if neighbors is None:
        neighbors = knn(X, k)
    indices, distances = _star(X, i, neighbors)
    points = [i] + [int(j) for j in indices]
    rho = distances[0]
    shifted = [0.0] + [max(0.0, float(d) - rho) for d in distances]
    n = len(points)
    table = [[INF] * n for _ in range(n)]
    for a in range(n):
        table[a][a] = 0.0
        table[0][a] = shifted[a]
        table[a][0] = shifted[a]
    return FiniteEPMet(points, table)


def _edge_weights(G):
    return {frozenset(e): w for e, w in G.weights.items()}


def nerve_skeleton(M):
    """1-skeleton of the nerve of M, with each vertex (p,) read back as the point p."""
    S = one_skeleton_of(fin_singular_nerve(M, 1))
    return FuzzyGraph(tuple(v[0] for v in S.vertices), {(u[0], v[0]): w for (u, v), w in S.weights.items()})


def nerve_bridge_check(X, i, k, neighbors=None):
    """
    True iff local_fuzzy_graph(X, i, k) has the same edges and weights
    (within BRIDGE_TOL) as the 1-skeleton of the nerve of local_metric(X, i, k).
    """
    X = as_dataset(X)
    if neighbors is None:
        neighbors = knn(X, k)
    local = _edge_weights(local_fuzzy_graph(X, i, k, neighbors))
    skeleton = _edge_weights(nerve_skeleton(local_metric(X, i, k, neighbors)))
    if set(local) != set(skeleton):
        return False
    return all(abs(local[e] - skeleton[e]) <= BRIDGE_TOL for e in local)


def union_bridge_check(X, k, c=PROBABILISTIC):
    """
    True iff the global fuzzy graph agrees (within BRIDGE_TOL) with the union
    of the edge fuzzy sets of the nerve 1-skeletons of every local metric.
    """
    X = as_dataset(X)
    neighbors = knn(X, k)
    G = fuzzy_union_graphs(local_fuzzy_graphs(X, k, neighbors), c)
    skeletons = [graph_as_fuzzy_set(nerve_skeleton(local_metric(X, i, k, neighbors))) for i in range(len(X))]
    union = fuzzy_union_many(skeletons, c)
    expected = dict(union.membership)
    found = _edge_weights(G)
    if set(found) != set(expected):
        return False
    return all(abs(found[e] - expected[e]) <= BRIDGE_TOL for e in found)


################# benchmarking helpers #################

def make_blobs_fixture(n_per_cluster=20, dim=10, sigma=0.1, spacing=10.0, n_clusters=3, seed=0):
    """
    Gaussian clusters with centers spacing * e_c / sqrt(2), so every two
    centers are spacing apart.

    output:

        (X, labels): (n_clusters * n_per_cluster) x dim array and integer labels
    """
    if n_clusters > dim:
        raise DomainError('Need n_clusters <= dim for orthogonal centers')
    rng = np.random.default_rng(seed)
    centers = np.eye(dim)[:n_clusters] * (spacing / np.sqrt(2))
    labels = np.repeat(np.arange(n_clusters), n_per_cluster)
    X = centers[labels] + rng.normal(scale=sigma, size=(len(labels), dim))
    return X, labels


def nearest_centroid_accuracy(Y, labels):
    """Fraction of points whose nearest label centroid is their own label's."""
    coords = Y.coords if isinstance(Y, Embedding) else np.asarray(Y, dtype=float)
    labels = np.asarray(labels)
    classes = np.unique(labels)
    centroids = np.array([coords[labels == c].mean(axis=0) for c in classes])
    assigned = classes[np.argmin(cdist(coords, centroids), axis=1)]
    return float(np.mean(assigned == labels))
