"""Time scales as finite unions of closed intervals and isolated points.

A time scale is a nonempty closed subset of the real line.  This module
restricts attention to finite unions of closed pieces, which keeps the
jump operators exactly computable, and provides the structural
operations everything else builds on: forward and backward jumps,
graininess, point classification, truncation, restriction, and grid
sampling.

A scale commits to a numeric mode at construction.  Rational mode
stores endpoints as ``fractions.Fraction`` and compares exactly; float
mode stores binary floats and matches membership with an optional
absolute tolerance ``eps`` (default 0, exact comparison).
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DomainError, UnsupportedScaleError

Num = Union[Fraction, float]

RATIONAL = "rational"
FLOAT = "float"


def as_scalar(x, mode: str) -> Num:
    """Coerce ``x`` into the numeric mode, rejecting non-finite values."""
    if mode == RATIONAL:
        if isinstance(x, bool):
            raise DomainError("booleans are not scalars")
        try:
            return Fraction(x)
        except (ValueError, OverflowError, TypeError) as exc:
            raise DomainError(f"cannot interpret {x!r} as a rational scalar") from exc
    if mode == FLOAT:
        if isinstance(x, bool):
            raise DomainError("booleans are not scalars")
        try:
            value = float(x)
        except (ValueError, OverflowError, TypeError) as exc:
            raise DomainError(f"cannot interpret {x!r} as a float scalar") from exc
        if not math.isfinite(value):
            raise DomainError(f"non-finite scalar {x!r} rejected")
        return value
    raise ValueError(f"unknown numeric mode {mode!r}")


def _reject_constant(name: str):
    raise DomainError(f"non-finite JSON constant {name!r} rejected")


def json_loads_strict(text: str):
    """``json.loads`` that refuses NaN and infinity literals."""
    return json.loads(text, parse_constant=_reject_constant)


def scalar_from_json(v, mode: str) -> Num:
    """Parse one scalar from its JSON form for the given mode."""
    if isinstance(v, bool):
        raise DomainError("booleans are not scalars")
    if mode == RATIONAL:
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, str):
            try:
                return Fraction(v)
            except (ValueError, ZeroDivisionError) as exc:
                raise DomainError(f"bad rational literal {v!r}") from exc
        raise DomainError(
            f"rational-mode scalars must be integers or 'p/q' strings, got {v!r}"
        )
    if isinstance(v, (int, float)):
        return as_scalar(v, FLOAT)
    raise DomainError(f"float-mode scalars must be JSON numbers, got {v!r}")


def scalar_to_json(x: Num):
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def fmt_scalar(x) -> str:
    """Deterministic text rendering: fractions as p/q, floats via repr."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


@dataclass(frozen=True)
class PointClass:
    """Density classification of one point of a scale."""

    left_dense: bool
    right_dense: bool
    is_min: bool
    is_max: bool

    @property
    def left_scattered(self) -> bool:
        return not self.left_dense

    @property
    def right_scattered(self) -> bool:
        return not self.right_dense

    @property
    def isolated(self) -> bool:
        return self.left_scattered and self.right_scattered

    @property
    def breaks_sigma_continuity(self) -> bool:
        """True when the forward jump is discontinuous from the left here.

        That happens exactly at left-dense right-scattered points.  The
        minimum is excluded: it is left-dense only by the convention
        rho(min) = min, and the forward jump has no left limit there.
        """
        return self.left_dense and self.right_scattered and not self.is_min

    def label(self) -> str:
        side_l = "left-dense" if self.left_dense else "left-scattered"
        side_r = "right-dense" if self.right_dense else "right-scattered"
        flags = []
        if self.is_min:
            flags.append("min")
        if self.is_max:
            flags.append("max")
        suffix = f" ({', '.join(flags)})" if flags else ""
        return f"{side_l} {side_r}{suffix}"


def _canonical_pieces(pieces, mode: str):
    norm = []
    for p in pieces:
        if isinstance(p, (tuple, list)):
            if len(p) != 2:
                raise ValueError(f"piece {p!r} must be a point or a pair")
            lo = as_scalar(p[0], mode)
            hi = as_scalar(p[1], mode)
        else:
            lo = hi = as_scalar(p, mode)
        if lo > hi:
            raise ValueError(f"piece endpoints out of order: {p!r}")
        norm.append((lo, hi))
    if not norm:
        raise ValueError("a time scale must be nonempty")
    norm.sort()
    merged = [norm[0]]
    for lo, hi in norm[1:]:
        mlo, mhi = merged[-1]
        if lo <= mhi:
            if hi > mhi:
                merged[-1] = (mlo, hi)
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True)
class TimeScale:
    """Immutable finite-piece time scale.

    ``pieces`` is canonical after construction: sorted, pairwise
    disjoint, touching pieces merged, each piece a ``(lo, hi)`` pair
    with ``lo == hi`` marking an isolated point.
    """

    pieces: tuple
    mode: str = RATIONAL
    eps: float = 0.0

    def __post_init__(self):
        if self.mode not in (RATIONAL, FLOAT):
            raise ValueError(f"unknown numeric mode {self.mode!r}")
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")
        if self.eps and self.mode == RATIONAL:
            raise ValueError("eps-based membership applies to float mode only")
        object.__setattr__(self, "pieces", _canonical_pieces(self.pieces, self.mode))

    @classmethod
    def discrete(cls, points: Iterable, mode: str = RATIONAL, eps: float = 0.0) -> "TimeScale":
        return cls(tuple(points), mode, eps)

    @classmethod
    def interval(cls, lo, hi, mode: str = RATIONAL, eps: float = 0.0) -> "TimeScale":
        return cls(((lo, hi),), mode, eps)

    # -- basic queries ----------------------------------------------------

    @property
    def min(self) -> Num:
        return self.pieces[0][0]

    @property
    def max(self) -> Num:
        return self.pieces[-1][1]

    @property
    def is_discrete(self) -> bool:
        return all(lo == hi for lo, hi in self.pieces)

    def points(self) -> list:
        """All points of a purely discrete scale, ascending."""
        if not self.is_discrete:
            raise UnsupportedScaleError("scale has interval pieces, not purely discrete")
        return [lo for lo, _ in self.pieces]

    def _locate(self, t):
        """Piece index containing ``t`` (after eps snapping), or None."""
        lows = [lo for lo, _ in self.pieces]
        i = bisect_right(lows, t) - 1
        if i >= 0:
            lo, hi = self.pieces[i]
            if lo <= t <= hi:
                return i, t
        if self.eps:
            for j, (lo, hi) in enumerate(self.pieces):
                if lo - self.eps <= t <= hi + self.eps:
                    snapped = min(max(t, lo), hi)
                    return j, snapped
        return None

    def __contains__(self, t) -> bool:
        try:
            t = as_scalar(t, self.mode)
        except DomainError:
            return False
        return self._locate(t) is not None

    def require(self, t) -> Num:
        """Coerce and membership-check ``t``, returning the snapped scalar."""
        t = as_scalar(t, self.mode)
        hit = self._locate(t)
        if hit is None:
            raise DomainError(f"{fmt_scalar(t)} is not a point of the scale")
        return hit[1]

    # -- jump operators ---------------------------------------------------

    def sigma(self, t) -> Num:
        """Forward jump: inf of the scale points above ``t``, or ``t`` at the max."""
        t = self.require(t)
        i, t = self._locate(t)
        lo, hi = self.pieces[i]
        if t < hi:
            return t
        if i + 1 < len(self.pieces):
            return self.pieces[i + 1][0]
        return t

    def rho(self, t) -> Num:
        """Backward jump: sup of the scale points below ``t``, or ``t`` at the min."""
        t = self.require(t)
        i, t = self._locate(t)
        lo, hi = self.pieces[i]
        if t > lo:
            return t
        if i > 0:
            return self.pieces[i - 1][1]
        return t

    def mu(self, t) -> Num:
        """Forward graininess sigma(t) - t."""
        t = self.require(t)
        return self.sigma(t) - t

    def nu(self, t) -> Num:
        """Backward graininess t - rho(t)."""
        t = self.require(t)
        return t - self.rho(t)

    def classify(self, t) -> PointClass:
        t = self.require(t)
        return PointClass(
            left_dense=self.rho(t) == t,
            right_dense=self.sigma(t) == t,
            is_min=t == self.min,
            is_max=t == self.max,
        )

    # -- derived scales ---------------------------------------------------

    def truncate_k(self) -> "TimeScale":
        """Drop the maximum when it is left-scattered, else return self."""
        m = self.max
        if self.rho(m) < m:
            return TimeScale(self.pieces[:-1], self.mode, self.eps)
        return self

    def truncate_k2(self) -> "TimeScale":
        return self.truncate_k().truncate_k()

    def restrict(self, a, b) -> "TimeScale":
        """The sub-scale [a, b] intersected with this scale."""
        a = self.require(a)
        b = self.require(b)
        if a > b:
            raise DomainError("restriction endpoints out of order")
        out = []
        for lo, hi in self.pieces:
            c = max(lo, a)
            d = min(hi, b)
            if c <= d:
                out.append((c, d))
        return TimeScale(tuple(out), self.mode, self.eps)

    def grid(self, refinement: int = 0) -> list:
        """Isolated points, interval endpoints, and ``refinement`` equally
        spaced interior samples per interval piece, ascending."""
        if refinement < 0:
            raise ValueError("refinement must be nonnegative")
        pts = []
        for lo, hi in self.pieces:
            pts.append(lo)
            if lo == hi:
                continue
            width = hi - lo
            for k in range(1, refinement + 1):
                if self.mode == RATIONAL:
                    pts.append(lo + width * Fraction(k, refinement + 1))
                else:
                    pts.append(lo + width * k / (refinement + 1))
            pts.append(hi)
        return pts

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        pieces = []
        for lo, hi in self.pieces:
            if lo == hi:
                pieces.append({"point": scalar_to_json(lo)})
            else:
                pieces.append({"interval": [scalar_to_json(lo), scalar_to_json(hi)]})
        obj = {"mode": self.mode, "pieces": pieces}
        if self.eps:
            obj["eps"] = self.eps
        return obj

    @classmethod
    def from_json(cls, obj) -> "TimeScale":
        if not isinstance(obj, dict):
            raise DomainError("scale JSON must be an object")
        mode = obj.get("mode")
        if mode not in (RATIONAL, FLOAT):
            raise DomainError(f"scale mode must be 'rational' or 'float', got {mode!r}")
        raw = obj.get("pieces")
        if not isinstance(raw, list) or not raw:
            raise DomainError("scale JSON needs a nonempty 'pieces' list")
        pieces = []
        for entry in raw:
            if not isinstance(entry, dict) or len(entry) != 1:
                raise DomainError(f"bad piece entry {entry!r}")
            if "point" in entry:
                pieces.append(scalar_from_json(entry["point"], mode))
            elif "interval" in entry:
                iv = entry["interval"]
                if not isinstance(iv, list) or len(iv) != 2:
                    raise DomainError(f"bad interval entry {entry!r}")
                lo = scalar_from_json(iv[0], mode)
                hi = scalar_from_json(iv[1], mode)
                if lo > hi:
                    raise DomainError(f"interval endpoints out of order: {entry!r}")
                pieces.append((lo, hi))
            else:
                raise DomainError(f"piece entry must name 'point' or 'interval': {entry!r}")
        eps = obj.get("eps", 0.0)
        if not isinstance(eps, (int, float)) or isinstance(eps, bool):
            raise DomainError("eps must be a number")
        return cls(tuple(pieces), mode, float(eps))

    @classmethod
    def loads(cls, text: str) -> "TimeScale":
        return cls.from_json(json_loads_strict(text))

    @classmethod
    def load(cls, path) -> "TimeScale":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read())


def zero_of(scale: TimeScale) -> Num:
    """Additive zero in the scale's numeric mode."""
    return Fraction(0) if scale.mode == RATIONAL else 0.0
