"""Exact construction and verification of an 800x800x800 symmetric tensor whose
rank (at most 903) is certified by an explicit decomposition, together with the
finite lemmas used to separate rank from symmetric rank."""

from .decomposition import (
    Decomposition,
    SimpleTensor,
    elementary_transformation,
    factor_rank_one,
    normalize_against_rank_one_slices,
    sum_slice,
    sum_terms,
)
from .errors import *  # noqa: F401,F403
from .indices import CoreIndex, GadgetId, IndexSet
from .lazy import AdjoinedTensor, ClonedTensor, clone, declone, is_clone
from .linalg import MatrixSubspace, matrix_rank, member, span_dim
from .scalar import Scalar, format_scalar, inv, parse_scalar
from .sparse import SparseMatrix, SparseTensor, SparseVector, is_equivalent, is_symmetric, restrict, support

__version__ = "0.1.0"
