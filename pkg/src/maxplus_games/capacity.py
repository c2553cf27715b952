"""Finite spaces, capacities on their subset lattices, and possibility densities.

Subsets of a space with ``n`` points are bitmasks: bit ``k`` set means the
``k``-th label is a member. A general capacity stores one value per mask in a
dense array of length ``2**n``; a possibility capacity can instead be carried
by its density, one weight per point.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .config import MAX_LATTICE_BITS, TOL
from .errors import (
    InvalidCapacity,
    InvalidDensity,
    NotPossibility,
    SpaceMismatch,
    Violation,
)

SUBSET_SEP = "|"
TUPLE_SEP = ","
# Label of the single point of an empty product (opponents of a lone player).
UNIT_LABEL = "*"


@dataclass(frozen=True)
class FiniteSpace:
    """An ordered set of distinct point labels.

    Product spaces keep their base factors in ``factors``; equality only looks
    at the labels, so a flattened product and a parsed file with the same
    ``"x,y"`` labels compare equal.
    """

    labels: tuple[str, ...]
    factors: tuple[FiniteSpace, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValueError("a space needs at least one point")
        if not all(isinstance(s, str) for s in labels):
            raise ValueError("labels must be strings")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")
        if any(SUBSET_SEP in s for s in labels):
            raise ValueError(f"labels may not contain {SUBSET_SEP!r}")

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @property
    def base_factors(self) -> tuple[FiniteSpace, ...]:
        return self.factors or (self,)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown point {label!r}") from None

    def mask(self, labels: Iterable[str]) -> int:
        m = 0
        for s in labels:
            m |= 1 << self.index(s)
        return m

    def members(self, mask: int) -> list[int]:
        return [k for k in range(self.size) if mask >> k & 1]

    def subset_key(self, mask: int) -> str:
        """Sorted member labels joined by ``|``; ``""`` for the empty set."""
        return SUBSET_SEP.join(sorted(self.labels[k] for k in self.members(mask)))

    def parse_subset(self, key: str) -> int:
        if key == "":
            return 0
        parts = key.split(SUBSET_SEP)
        if len(set(parts)) != len(parts):
            raise ValueError(f"repeated label in subset {key!r}")
        return self.mask(parts)


def product_space(*spaces: FiniteSpace) -> FiniteSpace:
    """Lexicographic product; the first factor varies slowest.

    Nested products are flattened, so ``product_space(product_space(a, b), c)``
    equals ``product_space(a, b, c)``. The empty product is a one-point space.
    """
    flat = tuple(f for s in spaces for f in s.base_factors)
    if not flat:
        return FiniteSpace((UNIT_LABEL,))
    if len(flat) == 1:
        return flat[0]
    labels = tuple(
        TUPLE_SEP.join(parts) for parts in itertools.product(*(f.labels for f in flat))
    )
    return FiniteSpace(labels, factors=flat)


def _require_lattice(space: FiniteSpace) -> None:
    if space.size > MAX_LATTICE_BITS:
        raise ValueError(
            f"general capacities are limited to {MAX_LATTICE_BITS} points, got {space.size}"
        )


def subset_max(weights: np.ndarray) -> np.ndarray:
    """For every mask, the maximum weight over its members (0 on the empty set)."""
    n = len(weights)
    out = np.zeros(1 << n)
    for b in range(n):
        lo = 1 << b
        out[lo : 2 * lo] = np.maximum(out[:lo], weights[b])
    return out


def capacity_violations(values, space: FiniteSpace) -> list[Violation]:
    """Every broken capacity constraint of a raw subset-indexed array."""
    _require_lattice(space)
    v = np.asarray(values, dtype=float)
    n = space.size
    if v.shape != (1 << n,):
        raise ValueError(f"expected {1 << n} values, got shape {v.shape}")
    out: list[Violation] = []

    bad = np.flatnonzero(~np.isfinite(v) | (v < 0.0) | (v > 1.0))
    for m in bad:
        out.append(
            Violation("RangeViolation", f"value {v[m]!r} at {{{space.subset_key(m)}}}", subset=int(m))
        )
    if not abs(v[0]) <= TOL:
        out.append(Violation("BoundaryViolation", f"value of the empty set is {v[0]!r}", subset=0))
    full = space.full_mask
    if not abs(v[full] - 1.0) <= TOL:
        out.append(
            Violation("BoundaryViolation", f"value of the whole space is {v[full]!r}", subset=full)
        )

    masks = np.arange(1 << n)
    for b in range(n):
        bit = 1 << b
        lower = masks[(masks & bit) == 0]
        drop = v[lower] - v[lower | bit]
        for m in lower[drop > TOL]:
            out.append(
                Violation(
                    "MonotonicityViolation",
                    f"{{{space.subset_key(m)}}} -> {v[m]!r} exceeds "
                    f"{{{space.subset_key(m | bit)}}} -> {v[m | bit]!r}",
                    subset=int(m),
                    superset=int(m | bit),
                )
            )
    return out


class Capacity:
    """Normalized monotone set function on the subset lattice of a space.

    Construction validates; an invalid array raises :class:`InvalidCapacity`
    listing every violation. Values are stored as given, never rounded.
    """

    __slots__ = ("space", "values", "_dual_of")

    def __init__(self, space: FiniteSpace, values):
        violations = capacity_violations(values, space)
        if violations:
            raise InvalidCapacity(violations)
        arr = np.array(values, dtype=float)
        arr.setflags(write=False)
        self.space = space
        self.values = arr
        self._dual_of = None

    def __call__(self, subset: int | Iterable[str]) -> float:
        mask = subset if isinstance(subset, (int, np.integer)) else self.space.mask(subset)
        return float(self.values[mask])

    def __eq__(self, other):
        if not isinstance(other, Capacity):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f"Capacity({list(self.space.labels)}, {self.values.tolist()})"


def validate(values, space: FiniteSpace) -> Capacity:
    """Build a :class:`Capacity`, raising :class:`InvalidCapacity` with all violations."""
    return Capacity(space, values)


def greatest(space: FiniteSpace) -> Capacity:
    _require_lattice(space)
    v = np.ones(1 << space.size)
    v[0] = 0.0
    return Capacity(space, v)


def smallest(space: FiniteSpace) -> Capacity:
    _require_lattice(space)
    v = np.zeros(1 << space.size)
    v[space.full_mask] = 1.0
    return Capacity(space, v)


def dirac(space: FiniteSpace, point: str | int) -> Capacity:
    return from_density(Density.dirac(space, point))


def _same_space(a: FiniteSpace, b: FiniteSpace) -> None:
    if a != b:
        raise SpaceMismatch(f"{list(a.labels)} vs {list(b.labels)}")


def dual(nu: Capacity) -> Capacity:
    """``A -> 1 - nu(X \\ A)``.

    The complement of mask ``m`` is ``full - m``, so the dual array is the
    reversed array subtracted from one. Applying ``dual`` to a dual returns
    the original object, keeping the involution exact in floating point.
    """
    if nu._dual_of is not None:
        return nu._dual_of
    out = Capacity(nu.space, 1.0 - nu.values[::-1])
    out._dual_of = nu
    return out


class CapacityClass(enum.Enum):
    GENERAL = "general"
    POSSIBILITY = "possibility"
    NECESSITY = "necessity"


@dataclass(frozen=True)
class Classification:
    """Which lattice laws a capacity satisfies.

    Dirac capacities satisfy both; ``tag`` then reports ``POSSIBILITY``.
    """

    possibility: bool
    necessity: bool

    @property
    def tag(self) -> CapacityClass:
        if self.possibility:
            return CapacityClass.POSSIBILITY
        if self.necessity:
            return CapacityClass.NECESSITY
        return CapacityClass.GENERAL

    @property
    def tags(self) -> list[str]:
        out = [c.value for c, ok in ((CapacityClass.POSSIBILITY, self.possibility),
                                     (CapacityClass.NECESSITY, self.necessity)) if ok]
        return out or [CapacityClass.GENERAL.value]


def _singleton_values(nu: Capacity) -> np.ndarray:
    return nu.values[[1 << k for k in range(nu.space.size)]]


def is_possibility(nu: Capacity) -> bool:
    """True when every subset's value is the max over its singletons."""
    expected = subset_max(_singleton_values(nu))
    return bool(np.all(np.abs(nu.values - expected) <= TOL))


def classify(nu: Capacity) -> Classification:
    return Classification(possibility=is_possibility(nu), necessity=is_possibility(dual(nu)))


def bconvex_combine(s: float, nu: Capacity, mu: Capacity) -> Capacity:
    """Subsetwise ``max(s * nu(A), mu(A))``."""
    _same_space(nu.space, mu.space)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"scalar must lie in [0, 1], got {s}")
    return Capacity(nu.space, np.maximum(s * nu.values, mu.values))


def leq(nu: Capacity, mu: Capacity) -> bool:
    _same_space(nu.space, mu.space)
    return bool(np.all(nu.values <= mu.values + TOL))


class Density:
    """Weights in [0, 1] with maximum 1; the singleton trace of a possibility capacity.

    Densities have no lattice and so no 16-point cap.
    """

    __slots__ = ("space", "weights")

    def __init__(self, space: FiniteSpace, weights):
        w = np.array(weights, dtype=float)
        if w.shape != (space.size,):
            raise InvalidDensity(f"expected {space.size} weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0) or np.any(w > 1.0):
            raise InvalidDensity(f"weights must lie in [0, 1]: {w.tolist()}")
        if not abs(w.max() - 1.0) <= TOL:
            raise InvalidDensity(f"maximum weight must be 1, got {w.max()!r}")
        w.setflags(write=False)
        self.space = space
        self.weights = w

    @classmethod
    def ones(cls, space: FiniteSpace) -> Density:
        return cls(space, np.ones(space.size))

    @classmethod
    def dirac(cls, space: FiniteSpace, point: str | int) -> Density:
        k = point if isinstance(point, (int, np.integer)) else space.index(point)
        w = np.zeros(space.size)
        w[k] = 1.0
        return cls(space, w)

    @classmethod
    def crisp(cls, space: FiniteSpace, support: int | Iterable[str]) -> Density:
        """Indicator density of a nonempty support."""
        mask = support if isinstance(support, (int, np.integer)) else space.mask(support)
        w = np.array([float(mask >> k & 1) for k in range(space.size)])
        return cls(space, w)

    @property
    def support(self) -> int:
        """Mask of the points with positive weight."""
        return sum(1 << k for k in np.flatnonzero(self.weights > 0.0))

    def __call__(self, point: str | int) -> float:
        k = point if isinstance(point, (int, np.integer)) else self.space.index(point)
        return float(self.weights[k])

    def __eq__(self, other):
        if not isinstance(other, Density):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.weights, other.weights)

    __hash__ = None

    def __repr__(self):
        return f"Density({dict(zip(self.space.labels, self.weights.tolist()))})"


def from_density(d: Density) -> Capacity:
    """The possibility capacity ``F -> max over F of d``."""
    _require_lattice(d.space)
    return Capacity(d.space, subset_max(d.weights))


def to_density(nu: Capacity) -> Density:
    if not is_possibility(nu):
        raise NotPossibility("capacity is not a possibility capacity")
    return Density(nu.space, _singleton_values(nu))


def bconvex_combine_density(s: float, d: Density, e: Density) -> Density:
    """Density of ``bconvex_combine(s, from_density(d), from_density(e))``."""
    _same_space(d.space, e.space)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"scalar must lie in [0, 1], got {s}")
    return Density(d.space, np.maximum(s * d.weights, e.weights))


def as_density(x: Capacity | Density) -> Density | None:
    """The density of ``x`` when it is a possibility capacity, else ``None``."""
    if isinstance(x, Density):
        return x
    return to_density(x) if is_possibility(x) else None


def as_capacity(x: Capacity | Density) -> Capacity:
    return from_density(x) if isinstance(x, Density) else x


def grid_densities(space: FiniteSpace, m: int) -> list[Density]:
    """All densities with weights in ``{0, 1/m, ..., 1}``, in lexicographic order."""
    if m < 1:
        raise ValueError("grid resolution must be >= 1")
    levels = [k / m for k in range(m + 1)]
    return [
        Density(space, w)
        for w in itertools.product(levels, repeat=space.size)
        if max(w) == 1.0
    ]


def support_masks(space: FiniteSpace) -> list[int]:
    return list(range(1, 1 << space.size))


def space_of(labels: Sequence[str]) -> FiniteSpace:
    return FiniteSpace(tuple(labels))


def classify_density(d: Density) -> Classification:
    """Classification of ``from_density(d)`` without building its lattice.

    A possibility capacity meets the intersection law only when a single
    point carries positive weight.
    """
    return Classification(possibility=True, necessity=int(np.count_nonzero(d.weights > TOL)) == 1)
