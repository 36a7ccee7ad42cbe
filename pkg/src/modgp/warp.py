"""Monotone time changes theta used to modulate stationary kernels.

A warping is admissible when it is strictly increasing with a piecewise
continuous, positive and bounded derivative. Everything here works on a finite
working interval, so boundedness of theta' on that interval stands in for a
finite derivative at infinity.
"""

import csv
import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ._validation import as_float_array, check_positive_int, scalar_or_array
from .exceptions import DomainError, WarpingCSVError


class WarpKind(str, Enum):
    IDENTITY = "Identity"
    AFFINE = "Affine"
    SOFT_SHIFT = "SoftShift"
    EXP_APPROACH = "ExpApproach"
    TABULATED = "Tabulated"


@dataclass(frozen=True)
class Warping:
    """An immutable warping; build it with the classmethod constructors.

    ``params`` holds ``(a, b)`` for Affine and ``(nodes, values)`` for
    Tabulated; it is empty otherwise.
    """

    kind: WarpKind
    params: tuple = ()
    domain: tuple = (-math.inf, math.inf)
    validated: bool = False
    _arrays: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", WarpKind(self.kind))
        lo, hi = (float(x) for x in self.domain)
        if not lo < hi:
            raise ValueError(f"empty domain [{lo}, {hi}]")
        object.__setattr__(self, "domain", (lo, hi))
        if self.kind is WarpKind.TABULATED:
            nodes = np.asarray(self.params[0], dtype=np.float64)
            values = np.asarray(self.params[1], dtype=np.float64)
            object.__setattr__(self, "_arrays", (nodes, values))

    # constructors ---------------------------------------------------------

    @classmethod
    def identity(cls, domain=(-math.inf, math.inf)):
        return cls(WarpKind.IDENTITY, (), domain)

    @classmethod
    def affine(cls, a, b=0.0, domain=(-math.inf, math.inf)):
        if not a > 0:
            raise ValueError(f"Affine warping needs slope a > 0, got {a}")
        return cls(WarpKind.AFFINE, (float(a), float(b)), domain)

    @classmethod
    def soft_shift(cls, domain=(0.0, math.inf)):
        """theta(t) = t + log(1 + t) on t >= 0."""
        if domain[0] < 0:
            raise ValueError("SoftShift is defined on t >= 0")
        return cls(WarpKind.SOFT_SHIFT, (), domain)

    @classmethod
    def exp_approach(cls, domain=(-math.inf, math.inf)):
        """theta(t) = t - exp(-t) + 1."""
        return cls(WarpKind.EXP_APPROACH, (), domain)

    @classmethod
    def tabulated(cls, nodes, values):
        """Piecewise-linear warping through ``(nodes, values)``.

        Nodes must be strictly increasing. Values are not checked here: a
        non-increasing table is constructible but fails :func:`validate`.
        """
        nodes = tuple(float(x) for x in nodes)
        values = tuple(float(x) for x in values)
        if len(nodes) != len(values):
            raise ValueError("nodes and values differ in length")
        if len(nodes) < 2:
            raise ValueError("a tabulated warping needs at least two nodes")
        if not all(np.isfinite(nodes)) or not all(np.isfinite(values)):
            raise ValueError("tabulated nodes and values must be finite")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ValueError("tabulated nodes must be strictly increasing")
        return cls(WarpKind.TABULATED, (nodes, values), (nodes[0], nodes[-1]))

    def restrict(self, lo, hi):
        """Same warping on the subinterval ``[lo, hi]`` of its domain."""
        if lo < self.domain[0] or hi > self.domain[1]:
            raise DomainError(f"[{lo}, {hi}] is not inside the domain {self.domain}")
        return replace(self, domain=(lo, hi))

    def to_dict(self):
        d = {"kind": self.kind.value, "domain": list(self.domain)}
        if self.kind is WarpKind.AFFINE:
            d["a"], d["b"] = self.params
        elif self.kind is WarpKind.TABULATED:
            d["nodes"], d["values"] = list(self.params[0]), list(self.params[1])
        return d

    @property
    def image(self):
        """Closed interval theta(domain); infinite ends map to infinite ends."""
        lo, hi = self.domain
        return (
            -math.inf if math.isinf(lo) else float(_theta(self, np.float64(lo))),
            math.inf if math.isinf(hi) else float(_theta(self, np.float64(hi))),
        )


def _theta(w, t):
    kind = w.kind
    if kind is WarpKind.IDENTITY:
        return t
    if kind is WarpKind.AFFINE:
        a, b = w.params
        return a * t + b
    if kind is WarpKind.SOFT_SHIFT:
        return t + np.log1p(t)
    if kind is WarpKind.EXP_APPROACH:
        return t - np.exp(-t) + 1.0
    nodes, values = w._arrays
    return np.interp(t, nodes, values)


def _segment_slopes(w):
    nodes, values = w._arrays
    return np.diff(values) / np.diff(nodes)


def theta(w, t):
    """Evaluate the warping at scalar or array ``t`` inside its domain."""
    t_arr = as_float_array(t, "t")
    _check_domain(w, t_arr)
    return scalar_or_array(_theta(w, t_arr), t)


def theta_dot(w, t):
    """Derivative of theta. For tables, the slope of the segment to the right of ``t``."""
    t_arr = as_float_array(t, "t")
    _check_domain(w, t_arr)
    kind = w.kind
    if kind is WarpKind.IDENTITY:
        d = np.ones_like(t_arr)
    elif kind is WarpKind.AFFINE:
        d = np.full_like(t_arr, w.params[0])
    elif kind is WarpKind.SOFT_SHIFT:
        d = 1.0 + 1.0 / (1.0 + t_arr)
    elif kind is WarpKind.EXP_APPROACH:
        d = 1.0 + np.exp(-t_arr)
    else:
        nodes, _ = w._arrays
        seg = np.clip(np.searchsorted(nodes, t_arr, side="right") - 1, 0, len(nodes) - 2)
        d = _segment_slopes(w)[seg]
    return scalar_or_array(d, t)


def theta_inverse(w, v):
    """Solve theta(t) = v.

    Closed form for Identity, Affine and Tabulated; vectorized bisection for
    the others, which converges because theta is strictly increasing.
    """
    v_arr = as_float_array(v, "v")
    lo_img, hi_img = w.image
    if np.any(v_arr < lo_img) or np.any(v_arr > hi_img):
        raise DomainError(f"value outside the image [{lo_img}, {hi_img}] of the warping")
    kind = w.kind
    if kind is WarpKind.IDENTITY:
        t = v_arr.copy()
    elif kind is WarpKind.AFFINE:
        a, b = w.params
        t = (v_arr - b) / a
    elif kind is WarpKind.TABULATED:
        nodes, values = w._arrays
        if np.any(np.diff(values) <= 0):
            raise DomainError("tabulated warping is not strictly increasing; it has no inverse")
        t = np.interp(v_arr, values, nodes)
    else:
        t = _bisect_inverse(w, v_arr)
    return scalar_or_array(t, v)


def _bisect_inverse(w, v):
    shape = np.shape(v)
    v = np.atleast_1d(v).astype(np.float64)
    dom_lo, dom_hi = w.domain
    # both built-in nonlinear kinds satisfy |theta(t) - t| <= 1 + |t|, theta' >= 1
    lo = np.maximum(np.minimum(v, 0.0) - 2.0, dom_lo)
    hi = np.minimum(np.maximum(v, 0.0) + 2.0, dom_hi)
    with np.errstate(over="ignore"):
        return _bisect(w, v, lo, hi, dom_lo, dom_hi).reshape(shape)


def _bisect(w, v, lo, hi, dom_lo, dom_hi):
    for _ in range(64):
        bad_lo = _theta(w, lo) > v
        bad_hi = _theta(w, hi) < v
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, np.maximum(2.0 * lo - hi, dom_lo), lo)
        hi = np.where(bad_hi, np.minimum(2.0 * hi - lo, dom_hi), hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = _theta(w, mid) < v
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all((hi - lo) <= 2.0 * np.spacing(np.maximum(np.abs(lo), np.abs(hi)))):
            break
    mid = 0.5 * (lo + hi)
    err_lo, err_mid, err_hi = (np.abs(_theta(w, x) - v) for x in (lo, mid, hi))
    best = np.where(err_lo < err_mid, lo, mid)
    return np.where(err_hi < np.minimum(err_lo, err_mid), hi, best)


def _check_domain(w, t):
    lo, hi = w.domain
    if np.any(t < lo) or np.any(t > hi):
        raise DomainError(f"t outside the warping domain [{lo}, {hi}]")


@dataclass
class ValidationReport:
    interval: tuple
    probe_count: int
    monotone: bool
    min_derivative: float
    max_derivative: float
    bounded_derivative: bool
    violations: list
    validated: bool
    warping: Warping = field(repr=False)

    def to_dict(self):
        return {
            "interval": list(self.interval),
            "probe_count": self.probe_count,
            "monotone": self.monotone,
            "min_derivative": self.min_derivative,
            "max_derivative": self.max_derivative,
            "bounded_derivative": self.bounded_derivative,
            "violations": [list(p) for p in self.violations],
            "validated": self.validated,
            "warping": self.warping.to_dict(),
        }


def validate(w, probe_count, interval=None):
    """Check strict monotonicity, positivity and boundedness of theta'.

    Failures are reported, never raised. ``report.warping`` is a copy of ``w``
    with ``validated`` set when every condition holds. ``interval`` defaults
    to the warping's domain, which then has to be finite.
    """
    probe_count = check_positive_int(probe_count, "probe_count", minimum=2)
    lo, hi = w.domain if interval is None else (float(interval[0]), float(interval[1]))
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValueError("validation needs a finite interval; pass one explicitly")
    if lo < w.domain[0] or hi > w.domain[1]:
        raise DomainError(f"interval [{lo}, {hi}] is not inside the domain {w.domain}")
    probes = np.linspace(lo, hi, probe_count)
    vals = _theta(w, probes)
    derivs = np.asarray(theta_dot(w, probes))
    violations = []
    if w.kind is WarpKind.TABULATED:
        nodes, values = w._arrays
        # exact for piecewise-linear tables: only knot pairs can fail
        inside = (nodes[1:] > lo) & (nodes[:-1] < hi)
        for i in np.flatnonzero(inside & (np.diff(values) <= 0)):
            violations.append((float(nodes[i]), float(nodes[i + 1])))
        slopes = _segment_slopes(w)[inside]
        derivs = np.concatenate([derivs, slopes])
    else:
        for i in np.flatnonzero(np.diff(vals) <= 0):
            violations.append((float(probes[i]), float(probes[i + 1])))
    min_d = float(np.min(derivs))
    max_d = float(np.max(derivs))
    bounded = bool(np.isfinite(max_d))
    monotone = not violations
    ok = monotone and min_d > 0 and bounded
    return ValidationReport(
        interval=(lo, hi),
        probe_count=probe_count,
        monotone=monotone,
        min_derivative=min_d,
        max_derivative=max_d,
        bounded_derivative=bounded,
        violations=violations,
        validated=ok,
        warping=replace(w, validated=ok),
    )


def read_tabulated_csv(path, strict=True):
    """Load a warping from a CSV file with header ``t,theta``.

    Non-numeric rows and non-increasing ``t`` always raise
    :class:`WarpingCSVError` with the offending line number. Non-increasing
    ``theta`` raises only when ``strict``; otherwise the table is returned so
    :func:`validate` can report the violating segments.
    """
    nodes, values = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "theta"]:
            raise WarpingCSVError("expected header 't,theta'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise WarpingCSVError(f"expected 2 columns, got {len(row)}", line=lineno)
            try:
                t, th = float(row[0]), float(row[1])
            except ValueError:
                raise WarpingCSVError(f"non-numeric row {row!r}", line=lineno) from None
            if not (math.isfinite(t) and math.isfinite(th)):
                raise WarpingCSVError(f"non-finite row {row!r}", line=lineno)
            if nodes and t <= nodes[-1]:
                raise WarpingCSVError("t is not strictly increasing", line=lineno)
            if strict and values and th <= values[-1]:
                raise WarpingCSVError("theta is not strictly increasing", line=lineno)
            nodes.append(t)
            values.append(th)
    if len(nodes) < 2:
        raise WarpingCSVError("need at least two data rows")
    return Warping.tabulated(nodes, values)


def from_dict(d, base_dir=None):
    """Build a warping from a config mapping such as ``{"kind": "Affine", "a": 2}``."""
    kind = WarpKind(d["kind"])
    domain = tuple(d["domain"]) if "domain" in d else None
    kw = {} if domain is None else {"domain": domain}
    if kind is WarpKind.IDENTITY:
        return Warping.identity(**kw)
    if kind is WarpKind.AFFINE:
        return Warping.affine(d["a"], d.get("b", 0.0), **kw)
    if kind is WarpKind.SOFT_SHIFT:
        return Warping.soft_shift(**kw)
    if kind is WarpKind.EXP_APPROACH:
        return Warping.exp_approach(**kw)
    if "csv" in d:
        path = d["csv"] if base_dir is None else os.path.join(base_dir, d["csv"])
        return read_tabulated_csv(path, strict=d.get("strict", True))
    return Warping.tabulated(d["nodes"], d["values"])
