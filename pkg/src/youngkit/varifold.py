"""Discrete m-varifolds in R^n and polygonal curves.

A plane in G(n, m) is stored as its orthogonal projection matrix, flattened
row-major into R^{n^2}.  A varifold is then a graph measure over
``R^n x R^{n^2}`` and the position/plane split reuses the graph-measure
disintegration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CarrierMismatchError, DegenerateMeasureError, InvalidInputError
from .graph import GraphMeasure, disintegrate, marginal_x
from .measure import DiscreteMeasure
from .young import YoungFunction

SYM_TOL = 1e-9
IDEM_TOL = 1e-9
TRACE_TOL = 1e-6


class Plane:
    """An m-plane through the origin in R^n, given by its projection matrix."""

    __slots__ = ("proj",)

    def __init__(self, proj):
        p = np.array(proj, dtype=float)
        if p.ndim == 1:
            n = int(round(np.sqrt(p.size)))
            if n * n != p.size:
                raise InvalidInputError(f"cannot reshape {p.size} entries into a square matrix")
            p = p.reshape(n, n)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] == 0:
            raise InvalidInputError("projection must be a nonempty square matrix")
        if not np.all(np.isfinite(p)):
            raise InvalidInputError("projection entries must be finite")
        if np.max(np.abs(p - p.T)) > SYM_TOL:
            raise InvalidInputError("projection is not symmetric")
        if np.max(np.abs(p @ p - p)) > IDEM_TOL:
            raise InvalidInputError("projection is not idempotent")
        tr = float(np.trace(p))
        if abs(tr - round(tr)) > TRACE_TOL:
            raise InvalidInputError(f"projection trace {tr} is not an integer")
        p = p + 0.0
        p.setflags(write=False)
        object.__setattr__(self, "proj", p)

    def __setattr__(self, name, value):
        raise AttributeError("planes are immutable")

    @classmethod
    def from_basis(cls, vectors) -> "Plane":
        """Plane spanned by the rows of ``vectors`` (orthonormalized first)."""
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        q, r = np.linalg.qr(v.T)
        if np.any(np.abs(np.diag(r)) < 1e-12 * max(1.0, float(np.max(np.abs(v))))):
            raise InvalidInputError("basis vectors are linearly dependent")
        return cls(q @ q.T)

    @property
    def n(self) -> int:
        return self.proj.shape[0]

    @property
    def m(self) -> int:
        return int(round(float(np.trace(self.proj))))

    def vector(self) -> np.ndarray:
        return self.proj.reshape(-1)

    def distance(self, other: "Plane") -> float:
        """Frobenius norm of the difference of projections."""
        return float(np.linalg.norm(self.proj - other.proj))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Plane):
            return NotImplemented
        return np.array_equal(self.proj, other.proj)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Plane(n={self.n}, m={self.m})"


def _line_projection(t: np.ndarray) -> np.ndarray:
    t = t / np.linalg.norm(t)
    return np.outer(t, t)


class DiscreteVarifold:
    """Weighted atoms ``(x, plane)`` with ``x`` in R^n and planes in G(n, m)."""

    __slots__ = ("n", "m", "graph")

    def __init__(self, xs, planes: Sequence, weights, m: int | None = None):
        xs = np.asarray(xs, dtype=float)
        planes = [p if isinstance(p, Plane) else Plane(p) for p in planes]
        if xs.ndim == 1:
            xs = xs.reshape(len(planes), -1)
        if not (xs.shape[0] == len(planes) == np.asarray(weights).reshape(-1).shape[0]):
            raise InvalidInputError("positions, planes and weights must have equal length")
        if not planes and m is None:
            raise InvalidInputError("m is required for an empty varifold")
        n = xs.shape[1]
        m = planes[0].m if m is None else int(m)
        for p in planes:
            if p.n != n:
                raise InvalidInputError(f"plane in R^{p.n} attached to a point of R^{n}")
            if p.m != m:
                raise InvalidInputError(f"plane of dimension {p.m} in an {m}-varifold")
        ys = np.array([p.vector() for p in planes]).reshape(len(planes), n * n)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "graph", GraphMeasure(xs, ys, weights, n, n * n))

    def __setattr__(self, name, value):
        raise AttributeError("varifolds are immutable")

    @classmethod
    def from_graph(cls, g: GraphMeasure, m: int | None = None) -> "DiscreteVarifold":
        return cls(g.xs, [Plane(y) for y in g.ys], g.weights, m=m)

    def __len__(self) -> int:
        return len(self.graph)

    @property
    def xs(self) -> np.ndarray:
        return self.graph.xs

    @property
    def weights(self) -> np.ndarray:
        return self.graph.weights

    def planes(self) -> list[Plane]:
        return [Plane(y) for y in self.graph.ys]

    def mass(self) -> float:
        return self.graph.total_mass()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteVarifold):
            return NotImplemented
        return self.m == other.m and self.graph == other.graph

    __hash__ = None

    def __repr__(self) -> str:
        return f"DiscreteVarifold(n={self.n}, m={self.m}, atoms={len(self)}, mass={self.mass():.6g})"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "atoms": [
                {"x": x.tolist(), "proj": y.tolist(), "w": float(w)}
                for x, y, w in zip(self.graph.xs, self.graph.ys, self.graph.weights)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteVarifold":
        try:
            atoms = data["atoms"]
            n = int(data["n"]) if "n" in data else len(atoms[0]["x"])
            m = int(data["m"]) if "m" in data else None
            xs = np.asarray([a["x"] for a in atoms], dtype=float).reshape(len(atoms), n)
            planes = [Plane(np.asarray(a["proj"], dtype=float).reshape(n, n)) for a in atoms]
            w = [a["w"] for a in atoms]
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InvalidInputError(f"malformed varifold record: {exc}") from exc
        return cls(xs, planes, w, m=m)


@dataclass(frozen=True, eq=False)
class PolylineVarifold:
    """A polygonal curve with a positive multiplicity per segment."""

    vertices: np.ndarray
    multiplicities: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2:
            raise InvalidInputError("a polyline needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("vertices must be finite")
        n_seg = v.shape[0] if self.closed else v.shape[0] - 1
        mult = np.array(self.multiplicities, dtype=float).reshape(-1)
        if mult.size == 1 and n_seg > 1:
            mult = np.full(n_seg, float(mult[0]))
        if mult.size != n_seg:
            raise InvalidInputError(f"expected {n_seg} multiplicities, got {mult.size}")
        if not np.all(np.isfinite(mult)) or np.any(mult <= 0):
            raise InvalidInputError("multiplicities must be positive")
        seg = self._segment_vectors(v, bool(self.closed))
        if np.any(np.linalg.norm(seg, axis=1) == 0):
            raise InvalidInputError("consecutive vertices must be distinct")
        v.setflags(write=False)
        mult.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "closed", bool(self.closed))

    @staticmethod
    def _segment_vectors(v: np.ndarray, closed: bool) -> np.ndarray:
        end = np.roll(v, -1, axis=0) if closed else v[1:]
        start = v if closed else v[:-1]
        return end - start

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        """Start points and displacement vectors of every segment."""
        v = self.vertices
        start = v if self.closed else v[:-1]
        return start, self._segment_vectors(v, self.closed)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolylineVarifold):
            return NotImplemented
        return (
            self.closed == other.closed
            and np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.multiplicities, other.multiplicities)
        )

    __hash__ = None

    def length(self) -> float:
        return float(np.sum(self.multiplicities * np.linalg.norm(self.segments()[1], axis=1)))

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "multiplicities": self.multiplicities.tolist(),
            "closed": self.closed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PolylineVarifold":
        try:
            return cls(data["vertices"], data["multiplicities"], bool(data.get("closed", False)))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed polyline record: {exc}") from exc


def regular_polygon(n_sides: int, radius: float = 1.0, multiplicity: float = 1.0) -> PolylineVarifold:
    """Closed regular polygon inscribed in the circle of given radius in R^2."""
    if n_sides < 3:
        raise InvalidInputError("a polygon needs at least three sides")
    th = 2 * np.pi * np.arange(n_sides) / n_sides
    v = radius * np.column_stack([np.cos(th), np.sin(th)])
    return PolylineVarifold(v, np.full(n_sides, float(multiplicity)), closed=True)


def weight_measure(V: DiscreteVarifold) -> DiscreteMeasure:
    """Position marginal; atoms at equal positions are merged."""
    return marginal_x(V.graph)


def is_rectifiable(V: DiscreteVarifold) -> bool:
    """True when every position carries a single plane."""
    base = weight_measure(V)
    return len(base) == len(V.graph)


def tangent_young(V: DiscreteVarifold) -> YoungFunction:
    """Plane distribution at each position, as a Young function into R^{n^2}."""
    if not V.mass() > 0:
        raise DegenerateMeasureError("varifold has zero mass")
    return disintegrate(V.graph)[1]


def lift_young(V: DiscreteVarifold, f: YoungFunction) -> YoungFunction:
    """Precompose ``f`` with the position map: each atom ``(x, P)`` gets ``f(x)``.

    The result lives on the varifold's atoms in R^{n + n^2}.
    """
    base = weight_measure(V)
    if f.carrier_dim != V.n or not np.array_equal(f.points, base.points):
        raise CarrierMismatchError("Young function carrier differs from the varifold positions")
    index = {x.tobytes(): k for k, x in enumerate(base.points)}
    fibers = [f.fibers[index[x.tobytes()]] for x in V.graph.xs]
    return YoungFunction(V.graph.measure.points, V.graph.weights, fibers, fiber_dim=f.fiber_dim)


def from_polyline(P: PolylineVarifold, atoms_per_segment: int = 1) -> DiscreteVarifold:
    """Midpoint quadrature of the curve with line planes along each segment."""
    if atoms_per_segment < 1:
        raise InvalidInputError("atoms_per_segment must be at least 1")
    k = int(atoms_per_segment)
    start, seg = P.segments()
    lengths = np.linalg.norm(seg, axis=1)
    frac = (np.arange(k) + 0.5) / k
    xs = (start[:, None, :] + frac[None, :, None] * seg[:, None, :]).reshape(-1, start.shape[1])
    w = np.repeat(P.multiplicities * lengths / k, k)
    planes = [Plane(_line_projection(s)) for s in seg]
    return DiscreteVarifold(xs, [p for p in planes for _ in range(k)], w, m=1)


def first_variation_mass(P: PolylineVarifold) -> float:
    """Total mass of the first variation of a polygonal curve.

    At a vertex joining segments of multiplicities ``m1``, ``m2`` with unit
    tangents ``t1``, ``t2`` pointing away from the vertex the contribution is
    ``|m1 t1 + m2 t2|``; a free endpoint contributes its multiplicity.
    """
    _, seg = P.segments()
    t = seg / np.linalg.norm(seg, axis=1)[:, None]
    mult = P.multiplicities
    if P.closed:
        # vertex k joins segment k-1 (incoming) and segment k (outgoing)
        vec = -np.roll(mult, 1)[:, None] * np.roll(t, 1, axis=0) + mult[:, None] * t
        return float(np.sum(np.linalg.norm(vec, axis=1)))
    vec = -mult[:-1, None] * t[:-1] + mult[1:, None] * t[1:]
    return float(np.sum(np.linalg.norm(vec, axis=1)) + mult[0] + mult[-1])
