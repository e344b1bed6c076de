"""Real-valued time profiles for the oscillator coefficient functions.

A :class:`ScalarProfile` is one of four kinds: constant, sinusoid
``amp*sin(freq*t + phase) + offset``, polynomial, or a linearly
interpolated table.  Tabulated profiles refuse extrapolation.  The
antiderivative is accumulated by composite Simpson quadrature on the run
grid (exact piecewise-linear integration for tabulated profiles, which
is the exact integral of the interpolant).
"""

from __future__ import annotations

import numpy as np

from .errors import ProfileDomain
from .numerics import DEFAULT_TOL, cumulative_simpson

__all__ = ["ScalarProfile"]


class ScalarProfile:
    """Real function of time with derivative and accumulated antiderivative."""

    def __init__(self, kind: str, **args):
        if kind not in ("constant", "sinusoid", "polynomial", "tabulated"):
            raise ValueError("unknown profile kind %r" % kind)
        self.kind = kind
        self.args = args
        if kind == "tabulated":
            t = np.asarray(args["times"], dtype=float)
            v = np.asarray(args["values"], dtype=float)
            if t.ndim != 1 or t.size < 2 or t.shape != v.shape:
                raise ValueError("tabulated profile needs matching 1-d times/values, >= 2 points")
            if np.any(np.diff(t) <= 0):
                raise ValueError("tabulated times must be strictly increasing")
            self._t, self._v = t, v

    # -- constructors ------------------------------------------------
    @classmethod
    def constant(cls, value: float) -> "ScalarProfile":
        return cls("constant", value=float(value))

    @classmethod
    def sinusoid(cls, amp: float, freq: float, phase: float = 0.0,
                 offset: float = 0.0) -> "ScalarProfile":
        return cls("sinusoid", amp=float(amp), freq=float(freq),
                   phase=float(phase), offset=float(offset))

    @classmethod
    def polynomial(cls, coeffs) -> "ScalarProfile":
        # coeffs[k] multiplies t**k
        return cls("polynomial", coeffs=[float(c) for c in coeffs])

    @classmethod
    def tabulated(cls, times, values) -> "ScalarProfile":
        return cls("tabulated", times=list(map(float, times)),
                   values=list(map(float, values)))

    @classmethod
    def from_config(cls, cfg) -> "ScalarProfile":
        """Build from a config mapping ({"kind": ..., ...}) or a bare number."""
        if isinstance(cfg, (int, float)):
            return cls.constant(cfg)
        kind = cfg.get("kind")
        args = {k: v for k, v in cfg.items() if k != "kind"}
        if kind == "constant":
            return cls.constant(args["value"])
        if kind == "sinusoid":
            return cls.sinusoid(args["amp"], args["freq"],
                                args.get("phase", 0.0), args.get("offset", 0.0))
        if kind == "polynomial":
            return cls.polynomial(args["coeffs"])
        if kind == "tabulated":
            return cls.tabulated(args["times"], args["values"])
        raise ValueError("unknown profile kind %r" % kind)

    def to_config(self):
        return {"kind": self.kind, **self.args}

    # -- evaluation --------------------------------------------------
    def _check_domain(self, t):
        if self.kind != "tabulated":
            return
        t = np.asarray(t, dtype=float)
        eps = 1e-12 * max(1.0, abs(self._t[0]), abs(self._t[-1]))
        if np.any(t < self._t[0] - eps) or np.any(t > self._t[-1] + eps):
            raise ProfileDomain(
                "t outside tabulated window [%g, %g]" % (self._t[0], self._t[-1])
            )

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full_like(t, self.args["value"], dtype=float) if t.ndim else float(self.args["value"])
        if self.kind == "sinusoid":
            s = self.args
            return s["amp"] * np.sin(s["freq"] * t + s["phase"]) + s["offset"]
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(t, self.args["coeffs"])
        self._check_domain(t)
        return np.interp(t, self._t, self._v)

    def derivative(self, t):
        """First derivative; analytic for closed-form kinds, piecewise slope for tables."""
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.zeros_like(t) if t.ndim else 0.0
        if self.kind == "sinusoid":
            s = self.args
            return s["amp"] * s["freq"] * np.cos(s["freq"] * t + s["phase"])
        if self.kind == "polynomial":
            c = self.args["coeffs"]
            dc = [k * c[k] for k in range(1, len(c))] or [0.0]
            return np.polynomial.polynomial.polyval(t, dc)
        self._check_domain(t)
        slopes = np.diff(self._v) / np.diff(self._t)
        idx = np.clip(np.searchsorted(self._t, t, side="right") - 1, 0, slopes.size - 1)
        return slopes[idx]

    def antiderivative(self, grid, tol: float = DEFAULT_TOL.quad_tol):
        """Cumulative integral on ``grid`` starting at 0 at ``grid[0]``.

        Composite Simpson with per-interval error estimate below ``tol``
        for the closed-form kinds; the exact integral of the interpolant
        for tabulated profiles.
        """
        grid = np.asarray(grid, dtype=float)
        if self.kind == "tabulated":
            self._check_domain(grid)
            # exact trapezoid of the piecewise-linear interpolant
            vals = self(grid)
            out = np.empty(grid.size)
            out[0] = 0.0
            np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(grid), out=out[1:])
            return out
        return cumulative_simpson(self, grid, tol=tol)
