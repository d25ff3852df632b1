import os

import numpy as np
import pandas as pd

from .errors import DomainError
from .fuzzy_core import FuzzyGraph, fuzzy_union_graphs, get_conorm
from .umap_pipeline import (Embedding, as_dataset, knn, local_fuzzy_graphs, nerve_bridge_check, sgd_layout,
                            spectral_embed, union_bridge_check)


class FuzzyUmap:
    """
    Holds a dataset and the result of every stage of the pipeline, and can
    be saved to / reloaded from a directory of gzipped tab-separated tables.

    FuzzyUmap(umap_object='dir')   reloads a saved object
    FuzzyUmap(data_table='x.csv')  starts from a headerless CSV of floats
    FuzzyUmap(data=array)          starts from an array
    """

    def __init__(self,
                 umap_object='',
                 data_table='',
                 data=None
                ):

        if os.path.isdir(umap_object):
            self.data = _read_table(umap_object + '/data.tab.gz')
            if os.path.isfile(umap_object + '/graph.tab.gz'):
                edges = _read_table(umap_object + '/graph.tab.gz')
                self.graph = FuzzyGraph(tuple(range(len(self.data))),
                                        {(int(u), int(v)): float(w) for u, v, w in zip(edges.u, edges.v, edges.w)})
            if os.path.isfile(umap_object + '/spectral.tab.gz'):
                self.spectral = Embedding(_read_table(umap_object + '/spectral.tab.gz').to_numpy())
            if os.path.isfile(umap_object + '/embedding.tab.gz'):
                self.embedding = Embedding(_read_table(umap_object + '/embedding.tab.gz').to_numpy())
            if os.path.isfile(umap_object + '/params.tab.gz'):
                params = pd.read_csv(umap_object + '/params.tab.gz', sep='\t', index_col=0, dtype=str).value
                for name, value in params.items():
                    setattr(self, name, _parse_param(value))

        elif os.path.isfile(data_table):
            self.data = pd.read_csv(data_table, header=None, float_precision='round_trip')

        elif data is not None:
            self.data = pd.DataFrame(np.asarray(data, dtype=np.float64))

        else:
            raise DomainError('FuzzyUmap needs a saved object directory, a data table or an array')

        self.data.columns = ['x' + str(c) for c in range(self.data.shape[1])]
        self.data.index = range(len(self.data))
        self.dataset = as_dataset(self.data.to_numpy(dtype=np.float64))

    def compute_fuzzy_graph(self, k=15, conorm='probabilistic', verbose=False):

        self.k = k
        self.conorm = conorm

        self.neighbors = knn(self.dataset, k)
        local_graphs = local_fuzzy_graphs(self.dataset, k, self.neighbors, verbose=verbose)
        self.graph = fuzzy_union_graphs(local_graphs, get_conorm(conorm))

        if verbose:
            print('Successfully computed fuzzy graph with ' + str(len(self.graph.edges)) + ' edges', flush=True)

    def run_umap(self,
                 d=2,
                 k=15,
                 n_epochs=200,
                 lr=1.0,
                 neg=5,
                 seed=0,
                 conorm='probabilistic',
                 track_loss=False,
                 verbose=False
                ):

        self.d = d
        self.n_epochs = n_epochs
        self.lr = lr
        self.neg = neg
        self.seed = seed

        N = len(self.dataset)
        if not (1 <= d < N):
            raise DomainError('d must satisfy 1 <= d < N = ' + str(N) + ', got d=' + str(d))

        if not hasattr(self, 'graph') or getattr(self, 'k', None) != k or getattr(self, 'conorm', None) != conorm:
            if verbose:
                print('Computing fuzzy graph...', flush=True)
            self.compute_fuzzy_graph(k=k, conorm=conorm, verbose=verbose)

        self.spectral = spectral_embed(self.graph, d, seed=seed, max_coord=10.0)
        if verbose:
            print('Successfully computed spectral initialisation', flush=True)

        self.embedding = sgd_layout(self.graph, self.spectral, n_epochs=n_epochs, lr=lr, neg=neg, seed=seed,
                                    track_loss=track_loss, verbose=verbose)
        if verbose:
            print('Successfully optimised layout', flush=True)

    def bridge_check(self, k=None):
        """
        Runs the nerve correspondence on every row and on the union graph.

        output:

            pandas Series indexed by row (True when the local graph matches
            its nerve 1-skeleton); the union check is stored in
            self.union_bridge.
        """
        if k is None:
            k = self.k
        neighbors = knn(self.dataset, k)
        self.bridge = pd.Series([nerve_bridge_check(self.dataset, i, k, neighbors) for i in range(len(self.dataset))],
                                index=self.data.index, name='bridge')
        self.union_bridge = union_bridge_check(self.dataset, k)
        return self.bridge

    def save_umap_object(self, umap_dir='umap_object', overwrite=False):

        if not os.path.isdir(umap_dir):
            os.mkdir(umap_dir)

        if (not os.path.isfile(umap_dir + '/data.tab.gz')) or overwrite:
            self.data.to_csv(umap_dir + '/data.tab.gz', sep='\t', index=True, header=True)

        if (not os.path.isfile(umap_dir + '/graph.tab.gz')) or overwrite:
            if hasattr(self, 'graph'):
                edges = pd.DataFrame([(u, v, w) for (u, v), w in self.graph.weights.items()], columns=['u', 'v', 'w'])
                edges.to_csv(umap_dir + '/graph.tab.gz', sep='\t', index=True, header=True, float_format='%.17g')
            else:
                print('No fuzzy graph to save.')

        for name in ['spectral', 'embedding']:
            path = umap_dir + '/' + name + '.tab.gz'
            if (not os.path.isfile(path)) or overwrite:
                if hasattr(self, name):
                    pd.DataFrame(getattr(self, name).coords).to_csv(path, sep='\t', index=True, header=True,
                                                                    float_format='%.17g')
                else:
                    print('No ' + name + ' coordinates to save.')

        if (not os.path.isfile(umap_dir + '/params.tab.gz')) or overwrite:
            params = {name: getattr(self, name) for name in PARAMS if hasattr(self, name)}
            pd.DataFrame({'value': [repr(v) for v in params.values()]}, index=list(params.keys())).to_csv(
                umap_dir + '/params.tab.gz', sep='\t', index=True, header=True)


PARAMS = ['k', 'conorm', 'd', 'n_epochs', 'lr', 'neg', 'seed']


def _parse_param(text):
    if text.startswith("'"):
        return text.strip("'")
    try:
        return int(text)
    except ValueError:
        return float(text)


def _read_table(path):
    return pd.read_csv(path, sep='\t', index_col=0, float_precision='round_trip')
