"""Index labels and ordered index sets.

Containers address entries by integer position; an :class:`IndexSet` maps
positions to user-facing labels.  Labels are plain ints (small tensors,
numbered from 1), :class:`CoreIndex` (layer, copy) for cloned tensors, or
:class:`GadgetId` for adjoined slices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ParseError

STARS = ("12", "13", "23", "45", "1234")
KINDS = ("L", "U", "V")  # Lambda, script-U, script-V
STAR_LAYERS = {"12": (1, 2), "13": (1, 3), "23": (2, 3), "45": (4, 5), "1234": (1, 2, 3, 4)}
STAR_SHIFT = {"12": 1, "13": 2, "23": 3, "45": 4, "1234": 5}
N_BLOCKS = 20


@dataclass(frozen=True)
class CoreIndex:
    layer: int
    copy: int

    def sort_key(self):
        return (0, self.layer, self.copy)

    def __str__(self):
        return f"c:{self.layer}:{self.copy}"


@dataclass(frozen=True)
class GadgetId:
    star: str
    kind: str
    block: int

    def __post_init__(self):
        if self.star not in STARS or self.kind not in KINDS or not 1 <= self.block <= N_BLOCKS:
            raise ValueError(f"invalid gadget id {self.star}/{self.kind}/{self.block}")

    def sort_key(self):
        return (1, STARS.index(self.star), KINDS.index(self.kind), self.block)

    def __str__(self):
        return f"g:{self.star}:{self.kind}:{self.block}"


def index_key(label):
    if isinstance(label, int):
        return (-1, label)
    return label.sort_key()


def format_index(label):
    return str(label)


_KIND_ALIASES = {"L": "L", "U": "U", "V": "V", "Λ": "L", "𝒰": "U", "𝒱": "V"}


def parse_index(text, position=None):
    parts = text.split(":")
    try:
        if parts[0] == "c" and len(parts) == 3:
            return CoreIndex(int(parts[1]), int(parts[2]))
        if parts[0] == "g" and len(parts) == 4:
            return GadgetId(parts[1], _KIND_ALIASES[parts[2]], int(parts[3]))
        if len(parts) == 1:
            return int(parts[0])
    except (ValueError, KeyError):
        pass
    raise ParseError(f"malformed index {text!r}", position)


class IndexSet:
    """An ordered, duplicate-free tuple of labels."""

    __slots__ = ("labels", "_pos", "_hash")

    def __init__(self, labels):
        self.labels = tuple(labels)
        self._pos = {lab: p for p, lab in enumerate(self.labels)}
        if len(self._pos) != len(self.labels):
            raise ValueError("index labels must be distinct")
        self._hash = None

    @staticmethod
    def range(n):
        return _range_set(n)

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, p):
        return self.labels[p]

    def __contains__(self, label):
        return label in self._pos

    def pos(self, label):
        try:
            return self._pos[label]
        except KeyError:
            raise IndexError(f"label {label!r} not in index set") from None

    def extend(self, labels):
        return IndexSet(self.labels + tuple(labels))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, IndexSet):
            return NotImplemented
        return self.labels == other.labels

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.labels)
        return self._hash

    def __repr__(self):
        if len(self) > 6:
            return f"IndexSet([{self.labels[0]}, ..., {self.labels[-1]}], n={len(self)})"
        return f"IndexSet({list(self.labels)})"


@lru_cache(maxsize=None)
def _range_set(n):
    return IndexSet(range(1, n + 1))


@lru_cache(maxsize=None)
def core_index_set(n_layers=5, sigma=100):
    return IndexSet(CoreIndex(l, c) for l in range(1, n_layers + 1) for c in range(1, sigma + 1))


@lru_cache(maxsize=None)
def gadget_ids():
    return tuple(GadgetId(s, k, b) for s in STARS for k in KINDS for b in range(1, N_BLOCKS + 1))


@lru_cache(maxsize=None)
def extended_index_set():
    """The 800 labels of the full counterexample tensor: 500 core, then 300 gadgets."""
    return core_index_set().extend(gadget_ids())
