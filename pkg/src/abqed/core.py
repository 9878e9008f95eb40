"""Units, charge/fluxon configuration and planar path geometry.

All geometry is two-dimensional.  Angles are in radians and measured
counterclockwise-positive from the fluxon position.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, DomainError

# Smallest distance a path may keep from the fluxon before it counts as touching.
TOUCH_TOL = 1e-12


@dataclass(frozen=True)
class UnitSystem:
    """Gaussian units with adjustable hbar and c (natural units by default)."""

    hbar: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.c > 0):
            raise DomainError(f"hbar and c must be positive, got {self.hbar}, {self.c}")

    def flux_quantum(self, charge: float) -> float:
        """Flux quantum 2*pi*hbar*c/charge, e.g. the superconducting one for charge = e*."""
        return 2.0 * math.pi * self.hbar * self.c / charge


@dataclass(frozen=True)
class ChargeFluxConfig:
    """Charge and fluxon parameters.

    ``M`` is recorded for completeness; the effective interaction does not
    depend on it.
    """

    e: float = 1.0
    e_star: float | None = None
    m: float = 1.0
    M: float = 1.0
    Phi: float = 2.0 * math.pi
    x_a: tuple[float, float] = (1.0, 0.0)
    x_b: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.m > 0 or not self.M > 0:
            raise DomainError("masses m and M must be positive")
        if self.e_star is None:
            object.__setattr__(self, "e_star", 2.0 * self.e)
        object.__setattr__(self, "x_a", tuple(float(v) for v in self.x_a))
        object.__setattr__(self, "x_b", tuple(float(v) for v in self.x_b))
        if len(self.x_a) != 2 or len(self.x_b) != 2:
            raise DomainError("positions must be 2-vectors")

    @property
    def separation(self) -> np.ndarray:
        """Relative coordinate x_a - x_b."""
        return np.subtract(self.x_a, self.x_b)

    def require_separated(self) -> None:
        if np.hypot(*self.separation) == 0.0:
            raise DomainError("charge and fluxon coincide")


@dataclass(frozen=True)
class PathGeometry:
    """Polygonal path in the plane.

    ``refinement`` is the maximum segment length used when the path is
    subdivided for quadrature (``inf`` means no forced subdivision).
    For closed paths the closing edge back to the first vertex is implied
    and is added if the last vertex differs from the first.
    """

    vertices: np.ndarray
    closed: bool = False
    refinement: float = math.inf

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 2:
            raise DomainError("a path needs at least two 2-vectors")
        if self.closed and not np.array_equal(v[0], v[-1]):
            v = np.vstack([v, v[:1]])
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if not self.refinement > 0:
            raise DomainError("refinement must be positive")

    @classmethod
    def from_json(cls, text: str, closed: bool = False, refinement: float = math.inf):
        return cls(np.array(json.loads(text), dtype=float), closed=closed, refinement=refinement)

    def to_json(self) -> str:
        return json.dumps(self.vertices.tolist())

    @property
    def start(self) -> np.ndarray:
        return self.vertices[0]

    @property
    def end(self) -> np.ndarray:
        return self.vertices[-1]

    def segments(self):
        """Yield (a, b) endpoint pairs, split to respect ``refinement``."""
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            length = float(np.hypot(*(b - a)))
            if length == 0.0:
                continue
            n = 1 if math.isinf(self.refinement) else max(1, math.ceil(length / self.refinement))
            for j in range(n):
                yield a + (b - a) * (j / n), a + (b - a) * ((j + 1) / n)

    def reversed(self) -> "PathGeometry":
        return PathGeometry(self.vertices[::-1].copy(), self.closed, self.refinement)

    def concat(self, other: "PathGeometry") -> "PathGeometry":
        if not np.allclose(self.end, other.start, rtol=0, atol=1e-14):
            raise DomainError("paths do not join")
        v = np.vstack([self.vertices, other.vertices[1:]])
        closed = bool(np.array_equal(v[0], v[-1]))
        return PathGeometry(v, closed=closed, refinement=min(self.refinement, other.refinement))

    def min_distance(self, point: Sequence[float]) -> float:
        p = np.asarray(point, dtype=float)
        return min(_segment_distance(a, b, p) for a, b in self.segments())


@dataclass(frozen=True)
class CurrentLoop:
    """A fluxon modelled as a current loop carrying ``current``."""

    current: float
    loop: PathGeometry = field(default=None)

    def __post_init__(self):
        if self.loop is None or not self.loop.closed:
            raise ContractError("a current loop needs a closed path")


def _segment_distance(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> float:
    d = b - a
    t = float(np.dot(p - a, d) / np.dot(d, d))
    t = min(1.0, max(0.0, t))
    return float(np.hypot(*(a + t * d - p)))


def circle(radius: float = 1.0, center=(0.0, 0.0), n: int = 64, turns: int = 1,
           start: float = 0.0, sweep: float | None = None) -> PathGeometry:
    """Polygon inscribed in a circle.

    With ``sweep`` given an open arc from ``start`` to ``start + sweep`` is
    returned; otherwise a closed polygon traversed ``turns`` times
    (negative turns run clockwise).
    """
    cx, cy = center
    if sweep is None:
        th = start + 2.0 * math.pi * np.sign(turns) * np.arange(n * abs(turns) + 1) / n
        # exact closure for the repeated traversal
        pts = np.column_stack([cx + radius * np.cos(th), cy + radius * np.sin(th)])
        pts[-1] = pts[0]
        return PathGeometry(pts, closed=True)
    th = start + sweep * np.arange(n + 1) / n
    return PathGeometry(np.column_stack([cx + radius * np.cos(th), cy + radius * np.sin(th)]))


def subtended_angle(path: PathGeometry, fluxon: Sequence[float] = (0.0, 0.0)) -> float:
    """Unwrapped change of the fluxon-relative azimuth along ``path``.

    Each straight segment subtends an angle strictly inside (-pi, pi), so
    its increment is atan2(cross, dot) of the endpoint vectors with no
    branch ambiguity.  Increments are accumulated with ``math.fsum``.
    """
    f = np.asarray(fluxon, dtype=float)
    incs = []
    for a, b in zip(path.vertices[:-1], path.vertices[1:]):
        if np.array_equal(a, b):
            continue
        if _segment_distance(a, b, f) <= TOUCH_TOL:
            raise DomainError(f"path touches the fluxon at {tuple(f)}")
        u, w = a - f, b - f
        incs.append(math.atan2(u[0] * w[1] - u[1] * w[0], u[0] * w[0] + u[1] * w[1]))
    return math.fsum(incs)


def winding_number(path: PathGeometry, fluxon: Sequence[float] = (0.0, 0.0)) -> int:
    if not path.closed:
        raise ContractError("winding number needs a closed path")
    turns = subtended_angle(path, fluxon) / (2.0 * math.pi)
    n = round(turns)
    if abs(turns - n) >= 1e-6:
        raise DomainError(f"non-integer winding {turns!r}")
    return int(n)
