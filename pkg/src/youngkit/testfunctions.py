"""Closed-form C^1 test functions and finite batteries of them.

All smoothing uses the quintic smoothstep ``S(u) = 6u^5 - 15u^4 + 10u^3`` on
``[0, 1]``, whose derivative peaks at ``15/8``.  Gradients are therefore exact
and no quadrature is involved.

Support and Lipschitz claims are verified on sample grids only, which can
refute a declaration but never certify it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError

SMOOTHSTEP_SLOPE = 15.0 / 8.0
# outer taper width of the cutoff profile, chosen so its slope is exactly 1
CUTOFF_WIDTH = SMOOTHSTEP_SLOPE


def smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0)


def smoothstep_deriv(u):
    u = np.clip(u, 0.0, 1.0)
    return 30.0 * u * u * (1.0 - u) * (1.0 - u)


def _smoothstep_integral(u):
    # antiderivative of smoothstep on [0, 1], vanishing at 0
    u = np.clip(u, 0.0, 1.0)
    return u**4 * (u * (u - 3.0) + 2.5)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Scalar function on R^k with its gradient and declared bounds.

    ``func`` maps ``(n, k)`` arrays to ``(n,)`` and ``grad`` maps ``(n, k)`` to
    ``(n, k)``.  ``support_radius`` bounds ``|y|`` outside which the value is
    zero; ``lip_bound`` bounds the gradient norm and ``sup_bound`` the absolute
    value.
    """

    __test__ = False  # keep pytest from collecting this class

    func: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    dim: int
    support_radius: float = np.inf
    lip_bound: float = np.inf
    sup_bound: float = np.inf
    label: str = ""
    manifest: dict | None = field(default=None, repr=False)

    def __call__(self, y) -> np.ndarray:
        y = _as_points(y, self.dim)
        return np.asarray(self.func(y), dtype=float)

    def gradient(self, y) -> np.ndarray:
        y = _as_points(y, self.dim)
        return np.asarray(self.grad(y), dtype=float).reshape(y.shape)


def _as_points(y, dim: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim == 0:
        y = y.reshape(1, 1)
    elif y.ndim == 1:
        # on the line a flat array lists points; otherwise it is one point
        y = y.reshape(-1, 1) if dim == 1 else y.reshape(1, -1)
    if y.ndim != 2 or y.shape[1] != dim:
        raise DimensionMismatchError(f"expected points in R^{dim}, got shape {y.shape}")
    return y


@dataclass(frozen=True, eq=False)
class Battery:
    """A finite, nonempty family of test functions on a common R^k."""

    members: tuple[TestFunction, ...]
    domain_dim: int

    def __post_init__(self):
        if not self.members:
            raise InvalidInputError("a battery needs at least one member")
        if any(g.dim != self.domain_dim for g in self.members):
            raise DimensionMismatchError("battery members differ in dimension")

    @classmethod
    def of(cls, members: Sequence[TestFunction]) -> "Battery":
        members = tuple(members)
        if not members:
            raise InvalidInputError("a battery needs at least one member")
        return cls(members, members[0].dim)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    @property
    def lip_bound(self) -> float:
        return max(g.lip_bound for g in self.members)

    def to_manifest(self) -> list[dict]:
        out = []
        for g in self.members:
            if g.manifest is None:
                raise InvalidInputError(f"member {g.label!r} was not built from a manifest kind")
            out.append(g.manifest)
        return out

    @classmethod
    def from_manifest(cls, entries: Sequence[dict]) -> "Battery":
        return cls.of([from_manifest(e) for e in entries])

    def manifest_hash(self) -> str:
        text = json.dumps(self.to_manifest(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _entry(kind: str, parameters: dict, label: str) -> dict:
    return {"kind": kind, "parameters": parameters, "label": label}


def zero(dim: int) -> TestFunction:
    return TestFunction(
        func=lambda y: np.zeros(y.shape[0]),
        grad=lambda y: np.zeros_like(y),
        dim=dim,
        support_radius=0.0,
        lip_bound=0.0,
        sup_bound=0.0,
        label="zero",
        manifest=_entry("zero", {"dim": dim}, "zero"),
    )


def bump(center, r_inner: float, r_outer: float, height: float = 1.0, label: str | None = None) -> TestFunction:
    """C^1 radial bump: ``height`` on ``B(center, r_inner)``, zero outside ``B(center, r_outer)``.

    The taper between the two radii is ``1 - S((r - r_inner) / (r_outer - r_inner))``
    so the largest gradient norm is ``15/8 * |height| / (r_outer - r_inner)``.
    """
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if not 0 < r_inner < r_outer:
        raise InvalidInputError(f"need 0 < r_inner < r_outer, got {r_inner}, {r_outer}")
    width = r_outer - r_inner
    dim = c.size

    def func(y):
        r = np.linalg.norm(y - c, axis=1)
        return height * (1.0 - smoothstep((r - r_inner) / width))

    def grad(y):
        d = y - c
        r = np.linalg.norm(d, axis=1)
        slope = -height * smoothstep_deriv((r - r_inner) / width) / width
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r[:, None] > 0, d / np.where(r > 0, r, 1.0)[:, None], 0.0)
        return slope[:, None] * unit

    if label is None:
        label = f"bump({c.tolist()},{r_inner},{r_outer})"
    params = {"center": c.tolist(), "r_inner": r_inner, "r_outer": r_outer, "height": height}
    return TestFunction(
        func=func,
        grad=grad,
        dim=dim,
        support_radius=float(np.linalg.norm(c) + r_outer),
        lip_bound=SMOOTHSTEP_SLOPE * abs(height) / width,
        sup_bound=abs(height),
        label=label,
        manifest=_entry("bump", params, label),
    )


def _cutoff(r):
    # 1 on [0, 1], smooth decay to 0 on [1, 1 + CUTOFF_WIDTH], slope at most 1
    return 1.0 - smoothstep((r - 1.0) / CUTOFF_WIDTH)


def _cutoff_deriv(r):
    return -smoothstep_deriv((r - 1.0) / CUTOFF_WIDTH) / CUTOFF_WIDTH


def _soft_clamp(t, level: float, delta: float):
    """C^1 clamp of ``t`` to ``[-level, level]``, 1-Lipschitz, saturating exactly at ``level``."""
    s = np.abs(t)
    knee = level - delta
    v = s - knee
    taper = knee + v - 2.0 * delta * _smoothstep_integral(v / (2.0 * delta))
    val = np.where(s <= knee, s, np.where(s >= level + delta, level, taper))
    deriv = np.where(s <= knee, 1.0, 1.0 - smoothstep(v / (2.0 * delta)))
    return np.sign(t) * val, deriv


def truncated_linear(direction, i: int, label: str | None = None) -> TestFunction:
    """Compactly supported 1-Lipschitz approximation of ``y -> <y, direction>``.

    Returns ``g_i = phi_i * beta_i`` where ``beta_i`` is a C^1 clamp of the
    linear functional at level ``i`` (within ``1/i`` of the hard clamp) and
    ``phi_i(y) = (1 - 1/i) phi(y / i^3)`` for a radial cutoff ``phi`` equal to 1
    on the unit ball.  ``g_i(0) = 0`` and ``g_i -> <., direction>`` pointwise.
    """
    e = np.atleast_1d(np.asarray(direction, dtype=float))
    if not abs(np.linalg.norm(e) - 1.0) <= 1e-12:
        raise InvalidInputError("direction must be a unit vector")
    i = int(i)
    if i < 1:
        raise InvalidInputError("index must be a positive integer")
    dim = e.size
    scale = 1.0 - 1.0 / i
    shrink = float(i) ** -3
    delta = 1.0 / i

    def func(y):
        t = y @ e
        beta, _ = _soft_clamp(t, float(i), delta)
        r = np.linalg.norm(y, axis=1) * shrink
        return scale * _cutoff(r) * beta

    def grad(y):
        t = y @ e
        beta, dbeta = _soft_clamp(t, float(i), delta)
        norm = np.linalg.norm(y, axis=1)
        r = norm * shrink
        phi = scale * _cutoff(r)
        dphi = scale * shrink * _cutoff_deriv(r)
        with np.errstate(invalid="ignore", divide="ignore"):
            radial = np.where(norm[:, None] > 0, y / np.where(norm > 0, norm, 1.0)[:, None], 0.0)
        return (phi * dbeta)[:, None] * e + (beta * dphi)[:, None] * radial

    if label is None:
        label = f"trunclin({e.tolist()},{i})"
    return TestFunction(
        func=func,
        grad=grad,
        dim=dim,
        support_radius=(1.0 + CUTOFF_WIDTH) / shrink,
        lip_bound=scale * (1.0 + i * shrink),
        sup_bound=scale * i,
        label=label,
        manifest=_entry("truncated_linear", {"direction": e.tolist(), "i": i}, label),
    )


def tensor(alpha: TestFunction, beta: TestFunction, label: str | None = None) -> TestFunction:
    """``(x, y) -> alpha(x) * beta(y)`` on the product space."""
    kx, ky = alpha.dim, beta.dim

    def func(p):
        return alpha.func(p[:, :kx]) * beta.func(p[:, kx:])

    def grad(p):
        x, y = p[:, :kx], p[:, kx:]
        a, b = alpha.func(x), beta.func(y)
        return np.hstack([alpha.grad(x) * b[:, None], beta.grad(y) * a[:, None]])

    if label is None:
        label = f"{alpha.label}*{beta.label}"
    manifest = None
    if alpha.manifest is not None and beta.manifest is not None:
        manifest = _entry("tensor", {"x": alpha.manifest, "y": beta.manifest}, label)
    return TestFunction(
        func=func,
        grad=grad,
        dim=kx + ky,
        support_radius=float(np.hypot(alpha.support_radius, beta.support_radius)),
        lip_bound=float(np.hypot(alpha.sup_bound * beta.lip_bound, beta.sup_bound * alpha.lip_bound)),
        sup_bound=alpha.sup_bound * beta.sup_bound,
        label=label,
        manifest=manifest,
    )


def tensor_battery(x_battery: Battery, y_battery: Battery) -> Battery:
    """All products of an X-battery member with a Y-battery member."""
    members = []
    for a_idx, a in enumerate(x_battery.members):
        for b_idx, b in enumerate(y_battery.members):
            members.append(tensor(a, b, label=f"x{a_idx}*y{b_idx}"))
    return Battery(tuple(members), x_battery.domain_dim + y_battery.domain_dim)


def from_manifest(entry: dict) -> TestFunction:
    """Rebuild a test function from its ``{kind, parameters, label}`` record."""
    try:
        kind = entry["kind"]
        p = entry["parameters"]
        label = entry.get("label")
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed battery entry: {entry!r}") from exc
    if kind == "bump":
        return bump(p["center"], p["r_inner"], p["r_outer"], p.get("height", 1.0), label=label)
    if kind == "truncated_linear":
        return truncated_linear(p["direction"], p["i"], label=label)
    if kind == "zero":
        return zero(p["dim"])
    if kind == "tensor":
        return tensor(from_manifest(p["x"]), from_manifest(p["y"]), label=label)
    raise InvalidInputError(f"unknown test-function kind {kind!r}")


def truncated_linear_battery(dim: int, indices: Sequence[int], n_directions: int = 8, seed: int = 0) -> Battery:
    """Truncated linear functions along the axes, their negatives and random unit directions."""
    rng = np.random.default_rng(seed)
    dirs = [v for k in range(dim) for v in (np.eye(dim)[k], -np.eye(dim)[k])]
    for _ in range(max(0, n_directions - len(dirs))):
        v = rng.normal(size=dim)
        dirs.append(v / np.linalg.norm(v))
    members = [truncated_linear(d / np.linalg.norm(d), i) for d in dirs for i in indices]
    return Battery.of(members)


def sample_grid(dim: int, radius: float, n: int = 10_000, seed: int = 0) -> np.ndarray:
    """Sample points in ``B(0, radius)``: half on radial rays, half uniformly random."""
    rng = np.random.default_rng(seed)
    n_ray = n // 2
    dirs = rng.normal(size=(max(1, n_ray // 50), dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.linspace(0.0, radius, 50)
    rays = (dirs[:, None, :] * radii[None, :, None]).reshape(-1, dim)
    g = rng.normal(size=(n - rays.shape[0], dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    g *= radius * rng.random((g.shape[0], 1)) ** (1.0 / dim)
    return np.vstack([rays, g])


def e_norm(g: TestFunction, grid) -> float:
    """Largest gradient norm of ``g`` over the grid points."""
    pts = _as_points(grid, g.dim)
    if pts.shape[0] == 0:
        raise InvalidInputError("grid must be nonempty")
    return float(np.max(np.linalg.norm(g.gradient(pts), axis=1)))


def in_W_alpha(g: TestFunction, alpha, grid) -> bool:
    """Grid check of ``|grad g(y)| <= 1/alpha(i)`` for all ``i`` with ``|y| > i - 1``.

    ``alpha`` is a callable on positive integers or a sequence read as
    ``alpha(i) = alpha[i - 1]``.  A ``False`` answer is a certificate of
    non-membership; ``True`` only means no grid point violates the bound.
    """
    pts = _as_points(grid, g.dim)
    if pts.shape[0] == 0:
        raise InvalidInputError("grid must be nonempty")
    norms = np.linalg.norm(pts, axis=1)
    slopes = np.linalg.norm(g.gradient(pts), axis=1)
    i_max = int(np.floor(np.max(norms))) + 1
    if callable(alpha):
        alpha_of = alpha
    else:
        seq = list(alpha)
        if len(seq) < i_max:
            raise InvalidInputError(f"alpha sequence has {len(seq)} terms, grid needs {i_max}")
        alpha_of = lambda i: seq[i - 1]  # noqa: E731
    for i in range(1, i_max + 1):
        a = int(alpha_of(i))
        if a < 1:
            raise InvalidInputError("alpha must take positive integer values")
        mask = norms > i - 1
        if np.any(slopes[mask] > 1.0 / a):
            return False
    return True


def check_support(g: TestFunction, n_directions: int = 200, seed: int = 0) -> float:
    """Largest ``|g|`` sampled at ``|y| = 2 * support_radius`` (0 when the claim holds)."""
    if not np.isfinite(g.support_radius):
        raise InvalidInputError("support radius is infinite")
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_directions, g.dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    r = 2.0 * g.support_radius if g.support_radius > 0 else 1.0
    return float(np.max(np.abs(g(dirs * r))))


def check_lipschitz(g: TestFunction, grid) -> float:
    """Ratio of the largest sampled gradient norm to the declared bound."""
    m = e_norm(g, grid)
    if g.lip_bound == 0:
        return 0.0 if m == 0 else np.inf
    return m / g.lip_bound
