"""Graph measures on X x Y, their disintegration and a tightness diagnostic."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import measure as M
from .errors import DegenerateMeasureError, InvalidInputError
from .measure import DiscreteMeasure, evaluate
from .young import YoungFunction


class GraphMeasure:
    """A discrete measure on X x Y that remembers the split ``x_dim + y_dim``.

    Atoms are ``(x, y, w)`` triples kept in lexicographic order of ``(x, y)``.
    """

    __slots__ = ("x_dim", "y_dim", "measure")

    def __init__(self, xs, ys, weights, x_dim: int | None = None, y_dim: int | None = None):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim == 1:
            xs = xs.reshape(-1, x_dim or 1)
        if ys.ndim == 1:
            ys = ys.reshape(-1, y_dim or 1)
        if xs.shape[0] != ys.shape[0]:
            raise InvalidInputError("x and y arrays must have the same number of atoms")
        kx = xs.shape[1] if x_dim is None else x_dim
        ky = ys.shape[1] if y_dim is None else y_dim
        mu = DiscreteMeasure(np.hstack([xs.reshape(-1, kx), ys.reshape(-1, ky)]), weights, dim=kx + ky)
        object.__setattr__(self, "x_dim", int(kx))
        object.__setattr__(self, "y_dim", int(ky))
        object.__setattr__(self, "measure", mu)

    def __setattr__(self, name, value):
        raise AttributeError("graph measures are immutable")

    @classmethod
    def from_measure(cls, mu: DiscreteMeasure, x_dim: int) -> "GraphMeasure":
        if not 0 < x_dim < mu.dim:
            raise InvalidInputError(f"x_dim must lie strictly between 0 and {mu.dim}")
        return cls(mu.points[:, :x_dim], mu.points[:, x_dim:], mu.weights, x_dim, mu.dim - x_dim)

    @property
    def xs(self) -> np.ndarray:
        return self.measure.points[:, : self.x_dim]

    @property
    def ys(self) -> np.ndarray:
        return self.measure.points[:, self.x_dim :]

    @property
    def weights(self) -> np.ndarray:
        return self.measure.weights

    def __len__(self) -> int:
        return len(self.measure)

    def total_mass(self) -> float:
        return self.measure.total_mass()

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphMeasure):
            return NotImplemented
        return self.x_dim == other.x_dim and self.measure == other.measure

    __hash__ = None

    def __repr__(self) -> str:
        return f"GraphMeasure(x_dim={self.x_dim}, y_dim={self.y_dim}, atoms={len(self)}, mass={self.total_mass():.6g})"

    def slice_masses(self) -> DiscreteMeasure:
        """Mass of each slice ``{x} x Y``, i.e. the x-marginal."""
        return marginal_x(self)

    def to_dict(self) -> dict:
        return {
            "x_dim": self.x_dim,
            "y_dim": self.y_dim,
            "atoms": [
                {"x": x.tolist(), "y": y.tolist(), "w": float(w)}
                for x, y, w in zip(self.xs, self.ys, self.weights)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GraphMeasure":
        try:
            kx = int(data["x_dim"])
            ky = int(data["y_dim"])
            atoms = data["atoms"]
            xs = np.asarray([a["x"] for a in atoms], dtype=float).reshape(len(atoms), kx)
            ys = np.asarray([a["y"] for a in atoms], dtype=float).reshape(len(atoms), ky)
            w = [a["w"] for a in atoms]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed graph measure record: {exc}") from exc
        if kx < 1 or ky < 1:
            raise InvalidInputError("x_dim and y_dim must be positive")
        return cls(xs, ys, w, kx, ky)


def build(f: YoungFunction) -> GraphMeasure:
    """Graph measure with atoms ``(x_j, y_jl, w_j * p_jl)``."""
    xs, ys, ws = [], [], []
    for x, w, fib in f.sites():
        n = len(fib)
        xs.append(np.repeat(x[None, :], n, axis=0))
        ys.append(fib.points)
        ws.append(w * fib.weights)
    if not xs:
        return GraphMeasure(np.zeros((0, f.carrier_dim)), np.zeros((0, f.fiber_dim)), [], f.carrier_dim, f.fiber_dim)
    return GraphMeasure(np.vstack(xs), np.vstack(ys), np.concatenate(ws), f.carrier_dim, f.fiber_dim)


def _slices(g: GraphMeasure):
    """Start offsets of the runs of equal x (atoms are sorted by x first)."""
    xs = g.xs
    if len(g) == 0:
        return np.zeros(0, dtype=np.int64)
    new = np.any(xs[1:] != xs[:-1], axis=1)
    return np.concatenate(([0], np.nonzero(new)[0] + 1))


def marginal_x(g: GraphMeasure) -> DiscreteMeasure:
    """Pushforward by the projection onto X."""
    starts = _slices(g)
    if starts.size == 0:
        return DiscreteMeasure(np.zeros((0, g.x_dim)), [], dim=g.x_dim)
    return DiscreteMeasure(g.xs[starts], np.add.reduceat(g.weights, starts), dim=g.x_dim)


def disintegrate(g: GraphMeasure) -> tuple[DiscreteMeasure, YoungFunction]:
    """Split ``g`` into its x-marginal and the normalized slices.

    Slices are grouped by exact x value.  Slices of zero mass are dropped, as
    they are null for the marginal.
    """
    if not g.total_mass() > 0:
        raise DegenerateMeasureError("cannot disintegrate a measure of zero mass")
    starts = _slices(g)
    ends = np.append(starts[1:], len(g))
    pts, base, fibers = [], [], []
    for s, e in zip(starts, ends):
        w = g.weights[s:e]
        mass = float(np.sum(w))
        if mass <= 0:
            continue
        keep = w > 0
        pts.append(g.xs[s])
        base.append(mass)
        fibers.append(M.ProbabilityMeasure(g.ys[s:e][keep], w[keep] / mass, dim=g.y_dim))
    pts = np.asarray(pts)
    f = YoungFunction(pts, base, fibers, fiber_dim=g.y_dim)
    return f.base(), f


def disintegrate_clustered(g: GraphMeasure, h: float) -> tuple[DiscreteMeasure, YoungFunction]:
    """Disintegrate after merging x values within ``h`` (and then y values within ``h``).

    This changes the measure; it is a heuristic for sequences whose carriers
    drift, not a disintegration of ``g`` itself.
    """
    if not h > 0:
        raise InvalidInputError("cluster radius must be positive")
    xm = M.coalesce(marginal_x(g), h)
    # send each atom's x to the nearest merged carrier point
    from scipy.spatial import cKDTree

    _, idx = cKDTree(xm.points).query(g.xs)
    merged = GraphMeasure(xm.points[idx], g.ys, g.weights, g.x_dim, g.y_dim)
    base, f = disintegrate(merged)
    fibers = [M.as_probability(M.coalesce(fib, h)) for fib in f.fibers]
    f = YoungFunction(f.points, f.base_weights, fibers, fiber_dim=g.y_dim)
    return base, f


def integrate_graph(g: GraphMeasure, psi: Callable) -> float:
    """Sum of ``w * psi(x, y)``; ``psi`` takes ``(n, x_dim + y_dim)`` arrays."""
    return M.integrate(g.measure, psi)


def iterated_integral(f: YoungFunction, psi: Callable) -> float:
    """``sum_j w_j int psi(x_j, .) df(x_j)``, evaluated fiber by fiber."""
    total = 0.0
    for x, w, fib in f.sites():
        pts = np.hstack([np.repeat(x[None, :], len(fib), axis=0), fib.points])
        total += w * float(fib.weights @ evaluate(psi, pts))
    return total


@dataclass(frozen=True)
class TightnessProfile:
    """``T(s) = max_i Gamma_i(K x {|y| > s})`` on a list of radii."""

    radii: np.ndarray
    tail: np.ndarray
    mass_bound: float
    tolerance: float

    @property
    def tight(self) -> bool:
        return bool(self.tail[-1] <= self.tolerance and np.isfinite(self.mass_bound))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "T(s)", "verdict"])
        verdict = "tight" if self.tight else "not_tight"
        for s, t in zip(self.radii, self.tail):
            w.writerow([format(float(s), ".17g"), format(float(t), ".17g"), verdict])
        return buf.getvalue()


def tightness_profile(
    seq: Sequence[GraphMeasure],
    center,
    radius: float,
    radii: Sequence[float],
    tolerance: float = 1e-3,
) -> TightnessProfile:
    """Tail masses of a family of graph measures over the ball ``K = B(center, radius)``.

    The verdict is ``tight`` when ``T(max radii) <= tolerance``; the bound
    ``max_i Gamma_i(K x Y)`` is always finite here and reported.
    """
    seq = list(seq)
    if not seq:
        raise InvalidInputError("need a nonempty sequence")
    s = np.asarray(radii, dtype=float)
    if s.ndim != 1 or s.size == 0 or np.any(np.diff(s) <= 0):
        raise InvalidInputError("radii must be a strictly increasing nonempty list")
    c = np.atleast_1d(np.asarray(center, dtype=float))
    tail = np.zeros(s.size)
    mass_bound = 0.0
    for g in seq:
        in_k = np.linalg.norm(g.xs - c, axis=1) <= radius
        w = g.weights[in_k]
        ynorm = np.linalg.norm(g.ys[in_k], axis=1)
        mass_bound = max(mass_bound, float(np.sum(w)))
        for k, sk in enumerate(s):
            tail[k] = max(tail[k], float(np.sum(w[ynorm > sk])))
    return TightnessProfile(radii=s, tail=tail, mass_bound=mass_bound, tolerance=tolerance)
