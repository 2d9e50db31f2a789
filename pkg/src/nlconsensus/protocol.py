"""Scalar coupling functions ``h`` and sampled monotonicity certificates.

A protocol is a callable acting componentwise on arrays, with ``h(0) = 0``
and a closed-form (or quadrature) antiderivative ``integral(a)`` of ``h``
from 0 to ``a``. The antiderivative feeds the Lyapunov function.
"""

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import NonMonotone, ParseError

ZERO_TOL = 1e-12
DEFAULT_SAMPLES = 10_000


class Protocol:
    """Base class. Subclasses implement ``_h`` and ``_integral``."""

    declared_sector_bound = None

    def __call__(self, w):
        return self._h(np.asarray(w, dtype=float))

    def evaluate(self, w):
        return float(self._h(np.asarray(float(w))))

    def integral(self, a):
        """Antiderivative ``int_0^a h(s) ds``, elementwise."""
        return self._integral(np.asarray(a, dtype=float))

    def _check_zero(self):
        h0 = float(self._h(np.asarray(0.0)))
        if abs(h0) > ZERO_TOL:
            raise ValueError(f"protocol must satisfy h(0) = 0, got h(0) = {h0!r}")


@dataclass(frozen=True)
class Linear(Protocol):
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"Linear protocol needs alpha > 0, got {self.alpha}")
        self._check_zero()

    @property
    def declared_sector_bound(self):
        return float(self.alpha)

    def _h(self, w):
        return self.alpha * w

    def _integral(self, a):
        return 0.5 * self.alpha * a * a

    def spec(self):
        return f"linear:{self.alpha!r}"


@dataclass(frozen=True)
class LinearPlusSine(Protocol):
    """``h(w) = alpha * w + sin(w)``; strictly increasing iff ``alpha >= 1``."""

    alpha: float

    def __post_init__(self):
        self._check_zero()

    @property
    def declared_sector_bound(self):
        return float(self.alpha - 1.0) if self.alpha > 1 else None

    def _h(self, w):
        return self.alpha * w + np.sin(w)

    def _integral(self, a):
        return 0.5 * self.alpha * a * a + (1.0 - np.cos(a))

    def spec(self):
        return f"linsin:{self.alpha!r}"


@dataclass(frozen=True)
class PiecewisePowerRoot(Protocol):
    """Odd map: ``w**2`` beyond ``|w| > 1``, ``sqrt`` inside.

    Continuous at -1, 0 and 1 but not differentiable there. Every difference
    quotient is at least 1/2.
    """

    def __post_init__(self):
        self._check_zero()

    @property
    def declared_sector_bound(self):
        return 0.5

    def _h(self, w):
        u = np.abs(w)
        return np.sign(w) * np.where(u > 1.0, u * u, np.sqrt(u))

    def _integral(self, a):
        u = np.abs(a)
        inner = (2.0 / 3.0) * u * np.sqrt(u)
        outer = 2.0 / 3.0 + (u * u * u - 1.0) / 3.0
        return np.where(u > 1.0, outer, inner)

    def spec(self):
        return "piecewise"


@dataclass(frozen=True, eq=False)
class TableDefined(Protocol):
    """Piecewise-linear interpolation of a strictly increasing sample table.

    Outside the table the end segments are extended linearly, so the map
    stays strictly increasing on the whole line.
    """

    w: np.ndarray
    h: np.ndarray
    source: str = field(default="", compare=False)

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        h = np.array(self.h, dtype=float)
        if w.ndim != 1 or w.shape != h.shape or w.size < 2:
            raise ValueError("table needs at least two (w, h) pairs")
        if np.any(np.diff(w) <= 0) or np.any(np.diff(h) <= 0):
            raise ValueError("table columns must both be strictly increasing")
        w.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "h", h)
        self._check_zero()

    @property
    def declared_sector_bound(self):
        return float(np.min(np.diff(self.h) / np.diff(self.w)))

    def _h(self, x):
        w, h = self.w, self.h
        y = np.interp(x, w, h)
        below, above = x < w[0], x > w[-1]
        if np.any(below) or np.any(above):
            lo_slope = (h[1] - h[0]) / (w[1] - w[0])
            hi_slope = (h[-1] - h[-2]) / (w[-1] - w[-2])
            y = np.where(below, h[0] + lo_slope * (x - w[0]), y)
            y = np.where(above, h[-1] + hi_slope * (x - w[-1]), y)
        return y

    @cached_property
    def _knot_integrals(self):
        """``int_0^{w_k} h`` at every knot, by adaptive quadrature per segment.

        Within a segment ``h`` is affine, so ``_integral`` adds the exact
        trapezoid from the segment's left knot.
        """
        w = self.w
        seg = np.empty(len(w) - 1)
        for k in range(len(w) - 1):
            seg[k], _ = integrate.quad(lambda s: float(self._h(np.asarray(s))), w[k], w[k + 1],
                                       epsabs=0.0, epsrel=1e-10)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        k0, start = self._segment(0.0)
        return cum - (cum[k0] + self._partial(0.0, k0, start))

    def _segment(self, a):
        k = int(np.clip(np.searchsorted(self.w, a, side="right") - 1, 0, len(self.w) - 2))
        return k, self.w[k]

    def _partial(self, a, k, start):
        ha = float(self._h(np.asarray(a)))
        return 0.5 * (self.h[k] + ha) * (a - start)

    def _integral(self, a):
        flat = np.atleast_1d(a).ravel()
        cum = self._knot_integrals
        out = np.empty_like(flat)
        for i, upper in enumerate(flat):
            k, start = self._segment(upper)
            out[i] = cum[k] + self._partial(float(upper), k, start)
        return out.reshape(np.shape(a))

    def spec(self):
        return f"table:{self.source}"

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        pairs = []
        for lineno, raw in enumerate(path.read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ParseError("expected 'w h(w)' pair", lineno, 1, path)
            try:
                pairs.append((float(parts[0]), float(parts[1])))
            except ValueError:
                col = raw.find(parts[1] if _isfloat(parts[0]) else parts[0]) + 1
                raise ParseError("not a number", lineno, col, path) from None
        if not pairs:
            raise ParseError("empty protocol table", None, None, path)
        w, h = zip(*pairs)
        try:
            return cls(np.array(w), np.array(h), source=str(path))
        except ValueError as exc:
            raise ParseError(str(exc), None, None, path) from None


def _isfloat(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_protocol(spec, base_dir=None):
    """Build a protocol from ``linear:<a>``, ``linsin:<a>``, ``piecewise``
    or ``table:<path>``. Relative table paths resolve against ``base_dir``."""
    kind, _, arg = spec.strip().partition(":")
    kind = kind.strip().lower()
    if kind in ("linear", "linsin"):
        try:
            alpha = float(arg)
        except ValueError:
            raise ValueError(f"bad alpha in protocol spec {spec!r}") from None
        return Linear(alpha) if kind == "linear" else LinearPlusSine(alpha)
    if kind == "piecewise" and not arg:
        return PiecewisePowerRoot()
    if kind == "table" and arg:
        path = Path(arg)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return TableDefined.from_file(path)
    raise ValueError(f"unknown protocol spec {spec!r}")


@dataclass(frozen=True)
class MonotonicityReport:
    monotone_on_range: bool
    witness: tuple | None
    estimated_sector_bound: float


def _quotients(p, lo, hi, samples):
    if not lo < hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if samples < 2:
        raise ValueError("need at least two samples")
    grid = np.linspace(lo, hi, samples)
    mids = 0.5 * (grid[:-1] + grid[1:])
    pts = np.empty(2 * samples - 1)
    pts[0::2] = grid
    pts[1::2] = mids
    vals = p(pts)
    return pts, (vals[1:] - vals[:-1]) / (pts[1:] - pts[:-1])


def check_monotone(p, lo, hi, samples=DEFAULT_SAMPLES):
    """Sampled monotonicity check of ``p`` on ``[lo, hi]``.

    Difference quotients are taken between consecutive points of a uniform
    grid refined by its midpoints. This is evidence, not a proof.
    """
    pts, q = _quotients(p, lo, hi, samples)
    k = int(np.argmin(q))
    monotone = bool(q[k] > 0)
    witness = None if monotone else (float(pts[k]), float(pts[k + 1]))
    return MonotonicityReport(monotone, witness, float(q[k]))


def sector_bound(p, lo, hi, samples=DEFAULT_SAMPLES):
    """Smallest sampled difference quotient; raises ``NonMonotone`` if ``<= 0``."""
    report = check_monotone(p, lo, hi, samples)
    if not report.monotone_on_range:
        raise NonMonotone(
            f"protocol decreases between {report.witness[0]:.6g} and {report.witness[1]:.6g}")
    return report.estimated_sector_bound


def padded_hull(x, pad=0.1):
    """State interval ``[min x, max x]`` widened by ``pad`` of its width
    (of ``max(1, |x|)`` when the width is zero)."""
    x = np.asarray(x, dtype=float)
    lo, hi = float(x.min()), float(x.max())
    width = hi - lo
    if width == 0:
        width = max(1.0, abs(lo))
    return lo - pad * width, hi + pad * width
