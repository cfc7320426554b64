"""Index-of-refraction models.

Three closed model families are supported:

* ``Constant(n0)``: ``n = n0``;
* ``GaussianPair``: ``n = 2 + (exp(-(x-1)^2-y^2) + exp(-(x+1)^2-y^2)) x/|x|``,
  which decays exponentially to 2;
* ``AngularLinear(a)``: ``n = 2 + a x/|x|``, which never settles to a
  constant and may trap guided modes for large ``a``.

``n_sharp(r)`` is the average of ``n`` over the circle ``|x| = r``.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NonPositiveIndex, OriginSingularity, ParseError

__all__ = [
    "RefractionModel",
    "Constant",
    "GaussianPair",
    "AngularLinear",
    "Admissibility",
    "eval_n",
    "radial_average_n",
    "check_admissibility",
    "parse_refraction",
]


class RefractionModel:
    """Base class. Subclasses implement :meth:`__call__` on ``(..., 2)`` arrays."""

    angular = False

    def __call__(self, points):
        raise NotImplementedError

    @property
    def lower_bound(self):
        raise NotImplementedError

    @property
    def upper_bound(self):
        raise NotImplementedError

    @property
    def is_constant(self):
        return False

    def tag(self):
        raise NotImplementedError


def _cos_theta(points):
    pts = np.asarray(points, dtype=float)
    r = np.hypot(pts[..., 0], pts[..., 1])
    if np.any(r == 0.0):
        raise OriginSingularity("angular index is undefined at the origin")
    return pts[..., 0] / r


@dataclass(frozen=True)
class Constant(RefractionModel):
    n0: float = 1.0

    def __post_init__(self):
        if not self.n0 > 0:
            raise NonPositiveIndex(f"constant index must be positive, got {self.n0}")

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        return np.full(pts.shape[:-1], float(self.n0))

    @property
    def lower_bound(self):
        return float(self.n0)

    @property
    def upper_bound(self):
        return float(self.n0)

    @property
    def is_constant(self):
        return True

    def tag(self):
        return f"constant:{self.n0:g}"


@dataclass(frozen=True)
class GaussianPair(RefractionModel):
    angular = True

    def __call__(self, points):
        pts = np.asarray(points, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        bumps = np.exp(-((x - 1.0) ** 2) - y**2) + np.exp(-((x + 1.0) ** 2) - y**2)
        return 2.0 + bumps * _cos_theta(pts)

    @cached_property
    def _bounds(self):
        # 512 x 512 polar sample on (0, 12]; beyond that n = 2 to 1e-50
        r = np.linspace(12.0 / 512, 12.0, 512)
        t = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
        rr, tt = np.meshgrid(r, t, indexing="ij")
        vals = self(np.stack([rr * np.cos(tt), rr * np.sin(tt)], axis=-1))
        lo, hi = float(vals.min()), float(vals.max())
        return min(lo, 2.0), max(hi, 2.0)

    @property
    def lower_bound(self):
        return self._bounds[0]

    @property
    def upper_bound(self):
        return self._bounds[1]

    def tag(self):
        return "gaussian_pair"


@dataclass(frozen=True)
class AngularLinear(RefractionModel):
    a: float = 0.1
    angular = True

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("a must be nonnegative")

    def __call__(self, points):
        return 2.0 + self.a * _cos_theta(points)

    @property
    def lower_bound(self):
        return 2.0 - self.a

    @property
    def upper_bound(self):
        return 2.0 + self.a

    def tag(self):
        return f"angular:{self.a:g}"


def eval_n(model, point):
    """Index at a single point (or an ``(..., 2)`` array of points)."""
    val = model(point)
    return float(val) if np.ndim(val) == 0 else val


def radial_average_n(model, r, quad_points=64):
    """Mean of ``n`` over the circle ``|x| = r`` by the periodic trapezoid rule."""
    if not r > 0:
        raise ValueError("radius must be positive")
    if quad_points < 16:
        raise ValueError("quad_points must be at least 16")
    t = 2 * np.pi * np.arange(quad_points) / quad_points
    return float(model(np.column_stack([r * np.cos(t), r * np.sin(t)])).mean())


@dataclass(frozen=True)
class Admissibility:
    sup_deviation: float
    admissible: bool
    min_n: float = field(default=math.nan)


def check_admissibility(model, r_max, n_samples=256):
    """Sample ``sup |1 - n_sharp / n|`` over ``r in (0, r_max]`` and all angles."""
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    radii = r_max * np.arange(1, n_samples + 1) / n_samples
    t = 2 * np.pi * np.arange(n_samples) / n_samples
    # include the axis directions, where the angular models peak
    t = np.union1d(t, [0.0, np.pi])
    pts = np.stack(np.broadcast_arrays(radii[:, None] * np.cos(t), radii[:, None] * np.sin(t)), axis=-1)
    n = model(pts)
    n_min = float(n.min())
    if n_min <= 0:
        raise NonPositiveIndex(f"index reaches {n_min:.6g} <= 0")
    sharp = np.array([radial_average_n(model, r, 128) for r in radii])
    dev = float(np.max(np.abs(1.0 - sharp[:, None] / n)))
    return Admissibility(dev, dev < 1.0, n_min)


def parse_refraction(text):
    """Parse ``constant:2.0``, ``gaussian_pair`` or ``angular:0.1``."""
    s = str(text).strip().lower()
    name, _, arg = s.partition(":")
    try:
        if name == "constant":
            return Constant(float(arg) if arg else 1.0)
        if name == "gaussian_pair" and not arg:
            return GaussianPair()
        if name == "angular":
            return AngularLinear(float(arg) if arg else 0.1)
    except ValueError as exc:
        if isinstance(exc, NonPositiveIndex):
            raise
        raise ParseError(f"bad refraction parameter in {text!r}") from exc
    raise ParseError(f"unknown refraction model {text!r}")
