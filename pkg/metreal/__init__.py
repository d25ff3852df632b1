from ._version import __version__
name = "metreal"

from .errors import DomainError, EnumerationLimitError, FormatError, MetrealError, StructuralError
from .fuzzy_core import (BOUNDED_SUM, MAX, PROBABILISTIC, ClassicalFuzzySet, ClassicalNormedSet, FuzzyGraph,
                         LevelFunction, TConorm, functor_C, functor_M, fuzzy_set, fuzzy_union, neg_log)
from .simplicial import TruncatedSimplicialFuzzySet, standard_simplex, validate
from .epmet import INF, FiniteEPMet, Partition, quotient, validate_epmet
from .realization import adjunction_check, fin_metric_realize, fin_singular_nerve, one_skeleton
from .umap_pipeline import Dataset, Embedding, umap
from .fuzzy_umap import FuzzyUmap
