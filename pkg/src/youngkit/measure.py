"""Finite atomic measures on R^k.

A :class:`DiscreteMeasure` is an immutable pair of arrays, ``points`` with
shape ``(n, k)`` and nonnegative ``weights`` with shape ``(n,)``.  Atoms are
kept in lexicographic order of their positions so that two measures are equal
exactly when their arrays are equal.
"""

from __future__ import annotations

from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    DegenerateMeasureError,
    DimensionMismatchError,
    InvalidInputError,
)

PROBABILITY_TOL = 1e-12


def _canonical_order(points: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # lexsort uses the last key as the primary one
    keys = [weights] + [points[:, j] for j in range(points.shape[1] - 1, -1, -1)]
    return np.lexsort(keys)


class DiscreteMeasure:
    """Weighted atoms in R^k.

    Parameters
    ----------
    points : array_like
        Atom positions, shape ``(n, k)``.  A 1-D array is read as ``n`` atoms
        in R^1.
    weights : array_like
        Nonnegative atom weights, shape ``(n,)``.
    dim : int, optional
        Ambient dimension; required only when the measure is empty.
    """

    __slots__ = ("points", "weights")

    def __init__(self, points, weights, dim: int | None = None):
        pts = np.asarray(points, dtype=float)
        w = np.asarray(weights, dtype=float).reshape(-1)
        if pts.ndim == 1:
            if dim not in (None, 1) and pts.size == 0:
                pts = pts.reshape(0, dim)
            else:
                pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise InvalidInputError(f"points must be 2-D, got shape {pts.shape}")
        if dim is not None and pts.shape[1] != dim:
            if pts.shape[0] == 0:
                pts = pts.reshape(0, dim)
            else:
                raise DimensionMismatchError(f"points have dim {pts.shape[1]}, expected {dim}")
        if pts.shape[1] < 1:
            raise InvalidInputError("dimension must be positive")
        if pts.shape[0] != w.shape[0]:
            raise InvalidInputError(f"{pts.shape[0]} points but {w.shape[0]} weights")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("atom positions must be finite")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidInputError("weights must be finite and nonnegative")
        pts = pts + 0.0  # folds -0.0 into 0.0
        order = _canonical_order(pts, w)
        pts = np.ascontiguousarray(pts[order])
        w = np.ascontiguousarray(w[order])
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __setattr__(self, name, value):
        raise AttributeError("measures are immutable")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self) -> Iterator[tuple[np.ndarray, float]]:
        for p, w in zip(self.points, self.weights):
            yield p, float(w)

    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def allclose(self, other: "DiscreteMeasure", atol: float = 1e-12) -> bool:
        """Same number of atoms with positions and weights within ``atol``."""
        return (
            self.dim == other.dim
            and len(self) == len(other)
            and np.allclose(self.points, other.points, rtol=0, atol=atol)
            and np.allclose(self.weights, other.weights, rtol=0, atol=atol)
        )

    def __repr__(self) -> str:
        cls = type(self).__name__
        if len(self) <= 6:
            atoms = ", ".join(f"({p.tolist()}, {w:.6g})" for p, w in self)
            return f"{cls}(dim={self.dim}, [{atoms}])"
        return f"{cls}(dim={self.dim}, n_atoms={len(self)}, mass={self.total_mass():.6g})"

    def scaled(self, factor: float) -> "DiscreteMeasure":
        if factor < 0:
            raise InvalidInputError("scale factor must be nonnegative")
        return DiscreteMeasure(self.points, self.weights * factor, dim=self.dim)

    def support_radius(self) -> float:
        if len(self) == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.points, axis=1)))

    def drop_null(self) -> "DiscreteMeasure":
        keep = self.weights > 0
        return type(self)._wrap(self.points[keep], self.weights[keep], self.dim)

    @classmethod
    def _wrap(cls, points, weights, dim):
        return cls(points, weights, dim=dim)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [{"x": p.tolist(), "w": float(w)} for p, w in self],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteMeasure":
        try:
            dim = int(data["dim"])
            atoms = data["atoms"]
            pts = [a["x"] for a in atoms]
            w = [a["w"] for a in atoms]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed measure record: {exc}") from exc
        if dim < 1:
            raise InvalidInputError("dim must be positive")
        pts = np.asarray(pts, dtype=float).reshape(len(w), -1) if w else np.zeros((0, dim))
        return cls(pts, w, dim=dim)


class ProbabilityMeasure(DiscreteMeasure):
    """A discrete measure of total mass 1 (within ``1e-12``)."""

    __slots__ = ()

    def __init__(self, points, weights, dim: int | None = None):
        super().__init__(points, weights, dim=dim)
        mass = float(np.sum(self.weights))
        if abs(mass - 1.0) > PROBABILITY_TOL:
            raise DegenerateMeasureError(f"probability measure has mass {mass!r}")

    @classmethod
    def _wrap(cls, points, weights, dim):
        # dropping or merging atoms may leave a sub-probability measure
        m = DiscreteMeasure(points, weights, dim=dim)
        if abs(m.total_mass() - 1.0) <= PROBABILITY_TOL:
            return cls(points, weights, dim=dim)
        return m


def as_probability(mu: DiscreteMeasure) -> ProbabilityMeasure:
    """View ``mu`` as a probability measure, or raise if its mass is not 1."""
    if isinstance(mu, ProbabilityMeasure):
        return mu
    return ProbabilityMeasure(mu.points, mu.weights, dim=mu.dim)


def dirac(y) -> ProbabilityMeasure:
    """Unit point mass at ``y``."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.ndim != 1:
        raise InvalidInputError("dirac expects a single vector")
    if not np.all(np.isfinite(y)):
        raise InvalidInputError("dirac position must be finite")
    return ProbabilityMeasure(y.reshape(1, -1), [1.0])


def total_mass(mu: DiscreteMeasure) -> float:
    return mu.total_mass()


def normalize(mu: DiscreteMeasure) -> ProbabilityMeasure:
    """Scale ``mu`` to unit mass."""
    mass = mu.total_mass()
    if not mass > 0:
        raise DegenerateMeasureError("cannot normalize a measure of zero mass")
    return ProbabilityMeasure(mu.points, mu.weights / mass, dim=mu.dim)


def evaluate(f: Callable, points: np.ndarray) -> np.ndarray:
    """Evaluate a vectorized scalar map on ``(n, k)`` points, returning ``(n,)``."""
    fdim = getattr(f, "dim", None)
    if fdim is not None and fdim != points.shape[1]:
        raise DimensionMismatchError(f"function on R^{fdim} applied to R^{points.shape[1]}")
    n = points.shape[0]
    vals = np.asarray(f(points), dtype=float)
    if vals.shape == (n, 1):
        vals = vals[:, 0]
    if vals.shape != (n,):
        raise InvalidInputError(f"function returned shape {vals.shape}, expected ({n},)")
    return vals


def integrate(mu: DiscreteMeasure, f: Callable) -> float:
    """Return the sum of ``w_j f(y_j)`` over the atoms of ``mu``.

    ``f`` is called once on the whole ``(n, k)`` array of positions.
    """
    if len(mu) == 0:
        return 0.0
    vals = evaluate(f, mu.points)
    return float(mu.weights @ vals)


def coalesce(mu: DiscreteMeasure, tol: float = 0.0) -> DiscreteMeasure:
    """Merge atoms that share a position (``tol == 0``) or lie within ``tol``.

    With ``tol > 0`` the atoms are visited in lexicographic order; each
    unassigned atom absorbs every unassigned atom within ``tol`` of it and the
    merged atom sits at the weighted centroid.
    """
    if tol < 0:
        raise InvalidInputError("tol must be nonnegative")
    n = len(mu)
    if n <= 1:
        return mu
    pts, w = mu.points, mu.weights
    if tol == 0:
        new_run = np.any(pts[1:] != pts[:-1], axis=1)
        starts = np.concatenate(([0], np.nonzero(new_run)[0] + 1))
        if starts.size == n:
            return mu
        return type(mu)._wrap(pts[starts], np.add.reduceat(w, starts), mu.dim)
    tree = cKDTree(pts)
    label = np.full(n, -1, dtype=np.int64)
    n_clusters = 0
    for j in range(n):
        if label[j] >= 0:
            continue
        members = np.asarray(tree.query_ball_point(pts[j], tol), dtype=np.int64)
        members = members[label[members] < 0]
        label[members] = n_clusters
        n_clusters += 1
    mass = np.bincount(label, weights=w, minlength=n_clusters)
    count = np.bincount(label, minlength=n_clusters).astype(float)
    centroid = np.empty((n_clusters, mu.dim))
    for d in range(mu.dim):
        wsum = np.bincount(label, weights=w * pts[:, d], minlength=n_clusters)
        plain = np.bincount(label, weights=pts[:, d], minlength=n_clusters) / count
        with np.errstate(invalid="ignore", divide="ignore"):
            centroid[:, d] = np.where(mass > 0, wsum / np.where(mass > 0, mass, 1.0), plain)
    return type(mu)._wrap(centroid, mass, mu.dim)


def pushforward(mu: DiscreteMeasure, h: Callable, tol: float = 0.0) -> DiscreteMeasure:
    """Image measure of ``mu`` under the vectorized map ``h: (n, k) -> (n, l)``."""
    n = len(mu)
    if n == 0:
        raise DegenerateMeasureError("cannot push forward an empty measure")
    try:
        img = np.asarray(h(mu.points), dtype=float)
    except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
        raise InvalidInputError(f"map undefined at an atom: {exc}") from exc
    if img.ndim == 1:
        img = img.reshape(n, -1) if img.size != n else img.reshape(n, 1)
    if img.ndim != 2 or img.shape[0] != n:
        raise InvalidInputError(f"map returned shape {img.shape} for {n} atoms")
    if not np.all(np.isfinite(img)):
        raise InvalidInputError("map undefined (non-finite) at an atom")
    return coalesce(type(mu)._wrap(img, mu.weights, img.shape[1]), tol)


def product(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """Cartesian product measure on R^(k+l)."""
    if len(mu) == 0 or len(nu) == 0:
        raise DegenerateMeasureError("product needs nonempty factors")
    n, m = len(mu), len(nu)
    pts = np.hstack([np.repeat(mu.points, m, axis=0), np.tile(nu.points, (n, 1))])
    w = np.outer(mu.weights, nu.weights).reshape(-1)
    cls = ProbabilityMeasure if isinstance(mu, ProbabilityMeasure) and isinstance(nu, ProbabilityMeasure) else DiscreteMeasure
    return cls._wrap(pts, w, mu.dim + nu.dim)


def marginal(mu: DiscreteMeasure, axes: Sequence[int]) -> DiscreteMeasure:
    """Pushforward by the coordinate projection onto ``axes``."""
    axes = list(axes)
    return pushforward(mu, lambda p: p[:, axes])


def convolve(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """Pushforward of ``mu x nu`` by addition, coalesced."""
    if mu.dim != nu.dim:
        raise DimensionMismatchError(f"cannot convolve dims {mu.dim} and {nu.dim}")
    k = mu.dim
    return pushforward(product(mu, nu), lambda p: p[:, :k] + p[:, k:])


def restrict(mu: DiscreteMeasure, radius: float) -> DiscreteMeasure:
    """Keep the atoms in the closed ball ``B(0, radius)``."""
    if radius < 0:
        raise InvalidInputError("radius must be nonnegative")
    keep = np.linalg.norm(mu.points, axis=1) <= radius
    return DiscreteMeasure(mu.points[keep], mu.weights[keep], dim=mu.dim)


def first_moment(mu: DiscreteMeasure) -> float:
    """Return the sum of ``w_j |y_j|``."""
    if len(mu) == 0:
        return 0.0
    return float(mu.weights @ np.linalg.norm(mu.points, axis=1))


def mixture(measures: Sequence[DiscreteMeasure], coefs: Sequence[float]) -> DiscreteMeasure:
    """Nonnegative combination ``sum c_i mu_i``, coalesced."""
    if len(measures) != len(coefs) or not measures:
        raise InvalidInputError("need matching, nonempty lists of measures and coefficients")
    dim = measures[0].dim
    if any(m.dim != dim for m in measures):
        raise DimensionMismatchError("mixture components differ in dimension")
    if any(c < 0 for c in coefs):
        raise InvalidInputError("mixture coefficients must be nonnegative")
    pts = np.vstack([m.points for m in measures])
    w = np.concatenate([c * m.weights for m, c in zip(measures, coefs)])
    out = coalesce(DiscreteMeasure(pts, w, dim=dim))
    if abs(out.total_mass() - 1.0) <= PROBABILITY_TOL:
        return as_probability(out)
    return out
