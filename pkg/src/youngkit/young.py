"""Young functions on a weighted finite carrier.

A Young function assigns a probability measure (the fiber) to each carrier
point ``x`` of a discrete base measure ``sum_j w_j delta_{x_j}``.  Pointwise
operations act fiber by fiber; binary operations require identical carriers.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from . import measure as M
from .errors import CarrierMismatchError, DimensionMismatchError, InvalidInputError
from .measure import DiscreteMeasure, ProbabilityMeasure
from .transport import w1

CARRIER_TOL = 1e-12


class YoungFunction:
    """Carrier points in R^kx with base weights and one fiber per point.

    Sites are stored in lexicographic order of their positions, which must be
    pairwise distinct.
    """

    __slots__ = ("points", "base_weights", "fibers", "fiber_dim")

    def __init__(self, points, base_weights, fibers: Sequence[DiscreteMeasure], fiber_dim: int | None = None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        w = np.asarray(base_weights, dtype=float).reshape(-1)
        fibers = [M.as_probability(f) for f in fibers]
        if not (pts.shape[0] == w.shape[0] == len(fibers)):
            raise InvalidInputError("points, base weights and fibers must have equal length")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("carrier points must be finite")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidInputError("base weights must be finite and nonnegative")
        if fiber_dim is None:
            if not fibers:
                raise InvalidInputError("fiber_dim is required for an empty Young function")
            fiber_dim = fibers[0].dim
        if any(f.dim != fiber_dim for f in fibers):
            raise DimensionMismatchError("fibers differ in dimension")
        pts = pts + 0.0
        order = np.lexsort([pts[:, j] for j in range(pts.shape[1] - 1, -1, -1)])
        pts = np.ascontiguousarray(pts[order])
        w = np.ascontiguousarray(w[order])
        if pts.shape[0] > 1 and np.any(np.all(pts[1:] == pts[:-1], axis=1)):
            raise InvalidInputError("carrier points must be pairwise distinct")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "base_weights", w)
        object.__setattr__(self, "fibers", tuple(fibers[k] for k in order))
        object.__setattr__(self, "fiber_dim", int(fiber_dim))

    def __setattr__(self, name, value):
        raise AttributeError("Young functions are immutable")

    @property
    def carrier_dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def sites(self):
        for x, w, f in zip(self.points, self.base_weights, self.fibers):
            yield x, float(w), f

    def base(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.points, self.base_weights, dim=self.carrier_dim)

    def __call__(self, x) -> ProbabilityMeasure:
        """Fiber at carrier point ``x``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        hit = np.nonzero(np.all(self.points == x, axis=1))[0]
        if hit.size == 0:
            raise KeyError(f"{x.tolist()} is not a carrier point")
        return self.fibers[hit[0]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, YoungFunction):
            return NotImplemented
        return (
            self.fiber_dim == other.fiber_dim
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.base_weights, other.base_weights)
            and all(a == b for a, b in zip(self.fibers, other.fibers))
        )

    __hash__ = None

    def allclose(self, other: "YoungFunction", atol: float = 1e-12) -> bool:
        """Same carrier points and fiber positions; weights within ``atol``."""
        return (
            self.fiber_dim == other.fiber_dim
            and np.array_equal(self.points, other.points)
            and np.allclose(self.base_weights, other.base_weights, rtol=0, atol=atol)
            and all(
                len(a) == len(b)
                and np.array_equal(a.points, b.points)
                and np.allclose(a.weights, b.weights, rtol=0, atol=atol)
                for a, b in zip(self.fibers, other.fibers)
            )
        )

    def __repr__(self) -> str:
        return (
            f"YoungFunction(carrier_dim={self.carrier_dim}, fiber_dim={self.fiber_dim}, "
            f"sites={len(self)}, mass={float(np.sum(self.base_weights)):.6g})"
        )

    def to_dict(self) -> dict:
        return {
            "carrier_dim": self.carrier_dim,
            "fiber_dim": self.fiber_dim,
            "sites": [
                {"x": x.tolist(), "w": w, "fiber": f.to_dict()} for x, w, f in self.sites()
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "YoungFunction":
        try:
            kx = int(data["carrier_dim"])
            ky = int(data["fiber_dim"])
            sites = data["sites"]
            pts = np.asarray([s["x"] for s in sites], dtype=float).reshape(len(sites), kx)
            w = [s["w"] for s in sites]
            fibers = [DiscreteMeasure.from_dict(s["fiber"]) for s in sites]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed Young function record: {exc}") from exc
        return cls(pts, w, fibers, fiber_dim=ky)


def _parse_sites(sites) -> tuple[np.ndarray, np.ndarray]:
    """Accept a measure, a ``(points, weights)`` tuple of arrays or ``(x, w)`` pairs."""
    if isinstance(sites, DiscreteMeasure):
        return np.array(sites.points), np.array(sites.weights)
    if isinstance(sites, tuple) and len(sites) == 2 and isinstance(sites[0], np.ndarray):
        pts = np.asarray(sites[0], dtype=float)
        w = np.asarray(sites[1], dtype=float)
    else:
        pairs = list(sites)
        pts = np.asarray([np.atleast_1d(x) for x, _ in pairs], dtype=float)
        w = np.asarray([wt for _, wt in pairs], dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return pts, w


def _apply(g: Callable, pts: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(g(pts), dtype=float)
    except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
        raise InvalidInputError(f"map undefined at a site: {exc}") from exc
    if vals.ndim == 1:
        vals = vals.reshape(pts.shape[0], -1)
    if vals.shape[0] != pts.shape[0] or not np.all(np.isfinite(vals)):
        raise InvalidInputError("map undefined (non-finite or misshaped) at a site")
    return vals


def from_function(sites, g: Callable) -> YoungFunction:
    """Single-valued Young function ``x -> delta_{g(x)}``; ``g`` is vectorized."""
    pts, w = _parse_sites(sites)
    vals = _apply(g, pts)
    return YoungFunction(pts, w, [M.dirac(v) for v in vals], fiber_dim=vals.shape[1])


def from_q_valued(sites, branches: Sequence[Callable], convention: str = "probability") -> YoungFunction:
    """Average of ``Q`` single-valued branches, coalesced per site.

    ``convention="probability"`` keeps the given base weights.  ``"QL"``
    multiplies them by ``Q`` (the unnormalized Q-valued function counted ``Q``
    times, paired with the averaged fibers).
    """
    branches = list(branches)
    if not branches:
        raise InvalidInputError("need at least one branch")
    if convention not in ("probability", "QL"):
        raise InvalidInputError(f"unknown convention {convention!r}")
    q = len(branches)
    pts, w = _parse_sites(sites)
    vals = np.stack([_apply(b, pts) for b in branches], axis=1)  # (S, Q, k)
    fibers = [M.coalesce(DiscreteMeasure(v, np.full(q, 1.0 / q))) for v in vals]
    if convention == "QL":
        w = w * q
    return YoungFunction(pts, w, fibers, fiber_dim=vals.shape[2])


def _fiber_map(f: YoungFunction, fibers, fiber_dim: int) -> YoungFunction:
    return YoungFunction(f.points, f.base_weights, fibers, fiber_dim=fiber_dim)


def pushforward_yf(h: Callable, f: YoungFunction) -> YoungFunction:
    """Push every fiber forward by ``h``; the base is unchanged."""
    fibers = [M.pushforward(fib, h) for fib in f.fibers]
    dim = fibers[0].dim if fibers else f.fiber_dim
    return _fiber_map(f, fibers, dim)


def same_carrier(f: YoungFunction, g: YoungFunction) -> bool:
    return (
        f.points.shape == g.points.shape
        and np.array_equal(f.points, g.points)
        and np.allclose(f.base_weights, g.base_weights, rtol=0, atol=CARRIER_TOL)
    )


def _require_carrier(f: YoungFunction, g: YoungFunction) -> None:
    if not same_carrier(f, g):
        raise CarrierMismatchError("Young functions must share sites and base weights")


def product_yf(f: YoungFunction, g: YoungFunction) -> YoungFunction:
    """Fiberwise product ``x -> f(x) x g(x)`` on Y x Z."""
    _require_carrier(f, g)
    fibers = [M.product(a, b) for a, b in zip(f.fibers, g.fibers)]
    return _fiber_map(f, fibers, f.fiber_dim + g.fiber_dim)


def convolve_yf(f: YoungFunction, g: YoungFunction) -> YoungFunction:
    """Fiberwise convolution ``x -> f(x) * g(x)``."""
    _require_carrier(f, g)
    if f.fiber_dim != g.fiber_dim:
        raise DimensionMismatchError("convolution needs equal fiber dimensions")
    fibers = [M.convolve(a, b) for a, b in zip(f.fibers, g.fibers)]
    return _fiber_map(f, fibers, f.fiber_dim)


def lipschitz_bound(f: YoungFunction, distance: Callable | None = None) -> float:
    """Largest ratio ``d(f(x), f(y)) / rho(x, y)`` over pairs of sites.

    ``rho`` is Euclidean unless ``distance(x, y)`` is given.
    """
    n = len(f)
    if n < 2:
        raise InvalidInputError("need at least two sites")
    best = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            xa, xb = f.points[a], f.points[b]
            rho = float(np.linalg.norm(xa - xb)) if distance is None else float(distance(xa, xb))
            if not rho > 0:
                raise CarrierMismatchError("two sites at zero distance: carrier invariant violated")
            best = max(best, w1(f.fibers[a], f.fibers[b]) / rho)
    return best
