"""Quadrature grids on finite intervals."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_positive_int


class QuadratureRule(str, Enum):
    GAUSS_LEGENDRE = "GaussLegendre"
    TRAPEZOID = "Trapezoid"


@dataclass(frozen=True, eq=False)
class Grid:
    """Nodes and positive weights on ``[a, b]``; weights sum to ``b - a``."""

    nodes: np.ndarray
    weights: np.ndarray
    rule: QuadratureRule
    interval: tuple

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        a, b = (float(x) for x in self.interval)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise ValueError("nodes and weights must be matching non-empty 1-D arrays")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing (no duplicates)")
        if nodes[0] < a or nodes[-1] > b:
            raise ValueError("grid nodes fall outside the interval")
        if nodes.size > 1 and np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if abs(weights.sum() - (b - a)) > 1e-10 * max(b - a, 1.0):
            raise ValueError("quadrature weights must sum to the interval length")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "rule", QuadratureRule(self.rule))
        object.__setattr__(self, "interval", (a, b))

    def __len__(self):
        return self.nodes.size

    def integrate(self, values):
        return float(self.weights @ np.asarray(values))

    def norm(self, values):
        """Discrete L2 norm sqrt(sum_i w_i f_i^2)."""
        values = np.asarray(values)
        return float(np.sqrt(self.weights @ (values * values)))

    def inner(self, f, g):
        return float(self.weights @ (np.asarray(f) * np.asarray(g)))

    def to_dict(self):
        return {"rule": self.rule.value, "interval": list(self.interval), "size": len(self)}


def gauss_legendre(a, b, n):
    n = check_positive_int(n, "n")
    if not b > a:
        raise ValueError("need b > a")
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return Grid(a + half * (x + 1.0), half * w, QuadratureRule.GAUSS_LEGENDRE, (a, b))


def trapezoid(nodes):
    """Composite trapezoid weights on arbitrary increasing nodes.

    A single node gives the degenerate zero-length rule ``[a, a]`` with unit
    weight; it only serves as a sampling grid.
    """
    nodes = np.asarray(nodes, dtype=np.float64)
    if nodes.size == 1:
        return Grid(nodes, np.zeros(1), QuadratureRule.TRAPEZOID, (nodes[0], nodes[0]))
    gaps = np.diff(nodes)
    w = np.zeros_like(nodes)
    w[:-1] += 0.5 * gaps
    w[1:] += 0.5 * gaps
    return Grid(nodes, w, QuadratureRule.TRAPEZOID, (nodes[0], nodes[-1]))


def uniform_trapezoid(a, b, n):
    n = check_positive_int(n, "n", minimum=2)
    return trapezoid(np.linspace(a, b, n))


def make_grid(rule, a, b, n):
    rule = QuadratureRule(rule)
    if rule is QuadratureRule.GAUSS_LEGENDRE:
        return gauss_legendre(a, b, n)
    return uniform_trapezoid(a, b, n)
