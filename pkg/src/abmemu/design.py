"""Space-filling experimental designs on the unit hypercube.

Two generators are provided. The quasi-random LP-tau design is the
Sobol' sequence built from published Joe and Kuo direction numbers
(the new-joe-kuo-6 tables), emitted in Gray-code order with the
all-zeros index-0 point skipped and no scrambling, so it is fully
deterministic. The alternative is a maximin Latin hypercube improved
by pairwise-swap hill climbing. Designs scale affinely to named
parameter ranges.
"""

from dataclasses import dataclass
import importlib.resources

import numpy as np

from .errors import DataError, UnsupportedDimensionError
from .params import PARAM_TABLE

_BITS = 52  # direction integers use 52 bits so points are exact in float64

# Joe-Kuo direction-number rows for dimensions 2..21:
# (dimension, degree s, coefficient a, initial m values m_1..m_s).
# Dimension 1 needs no row; its m values are all 1.
_JOE_KUO = (
    (2, 1, 0, (1,)),
    (3, 2, 1, (1, 3)),
    (4, 3, 1, (1, 3, 1)),
    (5, 3, 2, (1, 1, 1)),
    (6, 4, 1, (1, 1, 3, 3)),
    (7, 4, 4, (1, 3, 5, 13)),
    (8, 5, 2, (1, 1, 5, 5, 17)),
    (9, 5, 4, (1, 1, 5, 5, 5)),
    (10, 5, 7, (1, 1, 7, 11, 19)),
    (11, 5, 11, (1, 1, 5, 1, 1)),
    (12, 5, 13, (1, 1, 1, 3, 11)),
    (13, 5, 14, (1, 3, 5, 5, 31)),
    (14, 6, 1, (1, 3, 3, 9, 7, 49)),
    (15, 6, 13, (1, 1, 1, 15, 21, 21)),
    (16, 6, 16, (1, 3, 1, 13, 27, 49)),
    (17, 6, 19, (1, 1, 1, 15, 7, 5)),
    (18, 6, 22, (1, 3, 1, 15, 13, 25)),
    (19, 6, 25, (1, 1, 5, 5, 19, 61)),
    (20, 7, 1, (1, 3, 7, 11, 23, 15, 103)),
    (21, 7, 4, (1, 3, 7, 13, 13, 15, 69)),
)

MAX_DIM = 1 + len(_JOE_KUO)


def _direction_integers(dim):
    """Direction integers V[j][k] for dimensions j < dim, bits k < _BITS."""
    if dim < 1:
        raise DataError("dimension must be >= 1")
    if dim > MAX_DIM:
        raise UnsupportedDimensionError(
            "dimension %d exceeds the direction-number table (max %d)"
            % (dim, MAX_DIM)
        )
    V = np.zeros((dim, _BITS), dtype=np.uint64)
    # dimension 1: van der Corput, m_k = 1 for every k
    for k in range(_BITS):
        V[0, k] = np.uint64(1) << np.uint64(_BITS - 1 - k)
    for j in range(1, dim):
        _, s, a, m_init = _JOE_KUO[j - 1]
        m = list(m_init)
        for k in range(s, _BITS):
            mk = m[k - s] ^ (m[k - s] << s)
            for i in range(1, s):
                if (a >> (s - 1 - i)) & 1:
                    mk ^= m[k - i] << i
            m.append(mk)
        for k in range(_BITS):
            V[j, k] = np.uint64(m[k]) << np.uint64(_BITS - 1 - k)
    return V


def sobol_point(index, dim):
    """The index-th point (1-based) of the Sobol' sequence in dim dimensions.

    Index 0, the all-zeros point, is skipped by convention; index 1 is
    the first emitted point and equals 0.5 in every coordinate.
    """
    if index < 1:
        raise DataError("index must be >= 1 (the all-zeros point is skipped)")
    V = _direction_integers(dim)
    x = np.zeros(dim, dtype=np.uint64)
    gray = np.uint64(index ^ (index >> 1))
    for k in range(_BITS):
        if gray & (np.uint64(1) << np.uint64(k)):
            x ^= V[:, k]
    return x.astype(np.float64) / float(1 << _BITS)


def sobol_sequence(n, dim, skip=1):
    """First n Sobol' points (Gray-code order, index-0 point skipped)."""
    if n < 1:
        raise DataError("n must be >= 1")
    V = _direction_integers(dim)
    points = np.empty((n, dim), dtype=np.float64)
    x = np.zeros(dim, dtype=np.uint64)
    emitted = 0
    for i in range(1, n + skip):
        # Gray-code update: flip the direction of the lowest zero bit of i-1
        c = 0
        mask = i - 1
        while mask & 1:
            mask >>= 1
            c += 1
        x ^= V[:, c]
        if i >= skip:
            points[emitted] = x
            emitted += 1
    return points / float(1 << _BITS)


@dataclass(frozen=True)
class ParamRanges:
    """Named per-dimension bounds for scaling unit designs."""

    names: tuple
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))
        if not (len(self.names) == self.lower.size == self.upper.size):
            raise DataError("names, lower and upper must have equal length")
        if np.any(self.lower >= self.upper):
            raise DataError("every lower bound must be below its upper bound")

    @property
    def dim(self):
        return len(self.names)

    @classmethod
    def defaults(cls):
        """The canonical ten policy-parameter ranges."""
        return cls(
            names=tuple(r[0] for r in PARAM_TABLE),
            lower=np.array([r[2] for r in PARAM_TABLE]),
            upper=np.array([r[3] for r in PARAM_TABLE]),
        )

    @classmethod
    def from_text(cls, text, path="<string>"):
        names, lower, upper = [], [], []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise DataError(
                    "%s:%d: expected 'name lower upper'" % (path, lineno)
                )
            try:
                lo, hi = float(parts[1]), float(parts[2])
            except ValueError:
                raise DataError("%s:%d: bounds must be numeric" % (path, lineno))
            names.append(parts[0])
            lower.append(lo)
            upper.append(hi)
        if not names:
            raise DataError("%s: no ranges found" % path)
        return cls(tuple(names), np.array(lower), np.array(upper))

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read(), path=str(path))


def default_ranges_text():
    """Contents of the shipped canonical ranges file."""
    return (
        importlib.resources.files("abmemu.data")
        .joinpath("param_ranges.txt")
        .read_text(encoding="utf-8")
    )


@dataclass(frozen=True)
class UnitDesign:
    """An n x d design on [0,1]^d plus how it was generated."""

    points: np.ndarray
    method: str
    seed: int = 0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DataError("design must be a non-empty 2-D matrix")
        if np.any(pts < 0) or np.any(pts > 1):
            raise DataError("design entries must lie in [0, 1]")

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


def _random_lhs(n, dim, rng):
    """Stratified start: one point per column stratum, random within cells."""
    u = (rng.permuted(np.tile(np.arange(n), (dim, 1)), axis=1).T
         + rng.random((n, dim))) / n
    return u


def _pairwise_sqdist(points):
    diff = points[:, None, :] - points[None, :, :]
    d2 = np.sum(diff * diff, axis=2)
    np.fill_diagonal(d2, np.inf)
    return d2


def maximin_lhs(n, dim, seed, iterations=10000):
    """Latin hypercube improved by pairwise swap proposals.

    Each proposal swaps two rows' values within one column (preserving
    the stratification) and is accepted only when it strictly increases
    the minimum inter-point distance. Only the two affected rows of the
    distance matrix are recomputed per proposal.
    """
    rng = np.random.default_rng(seed)
    pts = _random_lhs(n, dim, rng)
    d2 = _pairwise_sqdist(pts)
    best = d2.min()
    for _ in range(iterations):
        i, j = rng.choice(n, size=2, replace=False)
        col = rng.integers(dim)
        pi = pts[i].copy()
        pj = pts[j].copy()
        pi[col], pj[col] = pts[j, col], pts[i, col]
        di = np.sum((pts - pi) ** 2, axis=1)
        dj = np.sum((pts - pj) ** 2, axis=1)
        dij = float(np.sum((pi - pj) ** 2))
        di[i], di[j] = np.inf, dij
        dj[j], dj[i] = np.inf, dij
        cand = d2.copy()
        cand[i, :], cand[:, i] = di, di
        cand[j, :], cand[:, j] = dj, dj
        cand[i, i] = cand[j, j] = np.inf
        cand_best = cand.min()
        if cand_best > best:
            pts[i], pts[j] = pi, pj
            d2 = cand
            best = cand_best
    return pts


def generate_design(method, n, ranges, seed=0, lhs_iterations=10000):
    """Generate a unit design with as many dimensions as the ranges."""
    if n < 2:
        raise DataError("a design needs at least 2 runs")
    dim = ranges.dim
    if method == "lptau":
        points = sobol_sequence(n, dim)
    elif method in ("lhs", "maximinLHS"):
        points = maximin_lhs(n, dim, seed, iterations=lhs_iterations)
    else:
        raise DataError("unknown design method %r (use lptau or lhs)" % method)
    return UnitDesign(points=points, method=method, seed=seed)


def scale_design(design, ranges):
    """Map a unit design onto parameter units, lower + u*(upper-lower)."""
    if design.dim != ranges.dim:
        raise DataError(
            "design has %d dimensions but ranges describe %d"
            % (design.dim, ranges.dim)
        )
    return ranges.lower + design.points * (ranges.upper - ranges.lower)


def unscale_design(matrix, ranges):
    """Inverse of scale_design, mapping parameter units back to [0,1]."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] != ranges.dim:
        raise DataError("matrix width must equal the number of ranges")
    return (matrix - ranges.lower) / (ranges.upper - ranges.lower)


def centered_l2_discrepancy(points):
    """Centred L2 star discrepancy (squared), by the closed form.

    Lower values indicate more uniform point sets. Used to compare
    quasi-random designs against plain uniform sampling.
    """
    pts = np.asarray(points, dtype=float)
    n, d = pts.shape
    shifted = pts - 0.5
    absns = np.abs(shifted)
    term1 = (13.0 / 12.0) ** d
    prod2 = np.prod(1.0 + 0.5 * absns - 0.5 * absns ** 2, axis=1)
    term2 = (2.0 / n) * prod2.sum()
    total = 0.0
    for start in range(0, n, 256):  # block the n x n cross term
        block = shifted[start:start + 256]
        cross = (
            1.0
            + 0.5 * np.abs(block[:, None, :])
            + 0.5 * absns[None, :, :]
            - 0.5 * np.abs(block[:, None, :] - shifted[None, :, :])
        )
        total += cross.prod(axis=2).sum()
    term3 = total / float(n * n)
    return term1 - term2 + term3
