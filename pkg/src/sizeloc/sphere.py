"""Direction sets on the unit sphere with quadrature weights.

Every DirectionSet is antithetically closed: each node's antipode is present
with the same weight and is located by index, never by a floating-point
search. This is what makes even/odd orthogonality exact in quadrature.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import StructuralError, UnsupportedDimensionError, ValidationError

KINDS = ("random_antithetic", "equal_angle_2d", "two_point_1d")


@dataclass(frozen=True, eq=False)
class DirectionSet:
    nodes: np.ndarray  # (N, d)
    weights: np.ndarray  # (N,)
    antipode: np.ndarray  # (N,) index of -nodes[j]
    kind: str
    m: int
    seed: Optional[int] = None

    def __post_init__(self):
        for name in ("nodes", "weights", "antipode"):
            getattr(self, name).setflags(write=False)
        n = self.nodes.shape[0]
        if self.weights.shape != (n,) or self.antipode.shape != (n,):
            raise StructuralError("nodes, weights and antipode lengths differ")
        if not np.array_equal(self.nodes[self.antipode], -self.nodes):
            raise StructuralError("direction set is not antithetically closed")
        if not np.array_equal(self.weights[self.antipode], self.weights):
            raise StructuralError("antipodal nodes carry different weights")

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def __len__(self):
        return self.size

    @property
    def pairs(self) -> list[tuple[int, int]]:
        """Index pairs (j, antipode[j]) with j < antipode[j]."""
        return [(j, int(a)) for j, a in enumerate(self.antipode) if j < a]

    @property
    def ident(self) -> str:
        return f"{self.kind}:m={self.m}:seed={self.seed}"

    def same_as(self, other: "DirectionSet") -> bool:
        return self is other or (
            self.kind == other.kind
            and self.size == other.size
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def integrate(self, f) -> np.ndarray | float:
        """Quadrature sum over the last axis of ``f``."""
        return integrate(f, self)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "M": self.m, "seed": self.seed, "dim": self.dim}

    @classmethod
    def from_dict(cls, data: dict) -> "DirectionSet":
        return make_direction_set(data["kind"], int(data["M"]), data.get("seed"), int(data.get("dim", 2)))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["ux", "uy", "weight"])
            for u, wt in zip(self.nodes, self.weights):
                uy = repr(float(u[1])) if self.dim > 1 else ""
                w.writerow([repr(float(u[0])), uy, repr(float(wt))])


def _interleaved_antipodes(n_pairs: int) -> np.ndarray:
    idx = np.arange(2 * n_pairs)
    return idx ^ 1


def sample_uniform_antithetic(m_pairs: int, seed: int, d: int = 2) -> DirectionSet:
    """``m_pairs`` i.i.d. uniform directions, each stored next to its antipode."""
    if d not in (1, 2):
        raise UnsupportedDimensionError(f"only d in {{1, 2}} is supported, got d={d}")
    if int(m_pairs) < 1:
        raise ValidationError(f"m_pairs must be >= 1, got {m_pairs}")
    m_pairs = int(m_pairs)
    rng = np.random.default_rng(seed)
    if d == 1:
        u = rng.choice(np.array([-1.0, 1.0]), size=m_pairs)[:, None]
    else:
        theta = rng.uniform(0.0, 2.0 * math.pi, size=m_pairs)
        u = np.column_stack([np.cos(theta), np.sin(theta)])
    nodes = np.empty((2 * m_pairs, d))
    nodes[0::2] = u
    nodes[1::2] = -u
    weights = np.full(2 * m_pairs, 1.0 / (2 * m_pairs))
    return DirectionSet(nodes, weights, _interleaved_antipodes(m_pairs), "random_antithetic", m_pairs, seed)


def equal_angle_grid(m: int) -> DirectionSet:
    """Nodes (cos 2pi j/M, sin 2pi j/M), j = 0..M-1, equal weights."""
    if int(m) != m or m < 4 or m % 2:
        raise ValidationError(f"equal-angle grid needs an even M >= 4, got {m}")
    m = int(m)
    theta = 2.0 * math.pi * np.arange(m // 2) / m
    half = np.column_stack([np.cos(theta), np.sin(theta)])
    # second half is the exact negation so antipodes match bitwise
    nodes = np.concatenate([half, -half])
    antipode = (np.arange(m) + m // 2) % m
    return DirectionSet(nodes, np.full(m, 1.0 / m), antipode, "equal_angle_2d", m)


def two_point_1d() -> DirectionSet:
    """S^0 = {+1, -1} with sigma = (delta_{-1} + delta_{+1}) / 2."""
    nodes = np.array([[1.0], [-1.0]])
    return DirectionSet(nodes, np.array([0.5, 0.5]), np.array([1, 0]), "two_point_1d", 1)


def make_direction_set(kind: str, m: int, seed: Optional[int] = None, dim: int = 2) -> DirectionSet:
    if kind == "random_antithetic":
        return sample_uniform_antithetic(m, 0 if seed is None else seed, dim)
    if kind == "equal_angle_2d":
        return equal_angle_grid(m)
    if kind == "two_point_1d":
        return two_point_1d()
    raise ValidationError(f"unknown direction-set kind {kind!r}; expected one of {KINDS}")


def integrate(f, ds: DirectionSet):
    """Sum_j w_j f_j over the last axis of ``f``."""
    arr = np.asarray(f, dtype=float)
    if arr.shape[-1:] != (ds.size,):
        raise StructuralError(f"expected {ds.size} node values, got trailing shape {arr.shape[-1:]}")
    out = arr @ ds.weights
    return float(out) if out.ndim == 0 else out


def l2_norm(f, ds: DirectionSet):
    """Sphere L2(sigma) norm, sqrt of the integral of f^2."""
    arr = np.asarray(f, dtype=float)
    return np.sqrt(integrate(arr * arr, ds))
