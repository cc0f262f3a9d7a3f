"""Single-variable variational layer.

Covers the integral form of the stationarity condition (the velocity
partial along a candidate trajectory must equal the accumulated state
partial plus a constant), the definedness audit at a left-scattered
right endpoint, an exact fundamental-lemma kernel analyzer for finite
discrete scales, and a small coordinate-descent action minimizer used
as the oracle in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .calculus import ScaleFn, _classical_slope, _integrate
from .errors import ConvergenceError, PreconditionError, UnsupportedScaleError
from .polyfn import Poly
from .quadrature import LIMIT_TOL, QUAD_TOL
from .scales import Num, TimeScale, fmt_scalar, scalar_from_json, zero_of

FD_STEP = 1e-6

BUILTIN_LAGRANGIANS = {
    "v2": "v^2",
    "v2+y2": "v^2+y^2",
    "harmonic": "v^2-y^2",
}

_POLY_VARS = ("t", "y", "v")


def _fd_partial(L: Callable, index: int) -> Callable:
    """Central finite-difference partial of L(t, y, v) in one slot."""

    def partial(t, y, v):
        args = [float(t), float(y), float(v)]
        h = FD_STEP * max(1.0, abs(args[index]))
        hi = list(args)
        lo = list(args)
        hi[index] += h
        lo[index] -= h
        return (L(*hi) - L(*lo)) / (2.0 * h)

    return partial


def lagrangian_from_spec(spec) -> Poly:
    """Resolve a Lagrangian definition string to a polynomial in (t, y, v).

    Accepts ``builtin:<name>`` for the registered shapes and
    ``poly:<expression>`` for inline polynomial text.
    """
    if not isinstance(spec, str):
        raise ValueError(f"lagrangian spec must be a string, got {spec!r}")
    if spec.startswith("builtin:"):
        name = spec[len("builtin:"):]
        try:
            return Poly.parse(BUILTIN_LAGRANGIANS[name], _POLY_VARS)
        except KeyError:
            known = ", ".join(sorted(BUILTIN_LAGRANGIANS))
            raise ValueError(f"unknown builtin Lagrangian {name!r}; known: {known}") from None
    if spec.startswith("poly:"):
        return Poly.parse(spec[len("poly:"):], _POLY_VARS)
    raise ValueError(f"lagrangian spec must start with 'builtin:' or 'poly:', got {spec!r}")


@dataclass(frozen=True)
class VariationalProblem:
    """Fixed-endpoint problem: minimize the delta integral of
    L(t, y(sigma(t)), y_delta(t)) over [a, b] with y(a), y(b) given."""

    scale: TimeScale
    a: Num
    b: Num
    lagrangian: Callable
    d_y: Optional[Callable] = None
    d_v: Optional[Callable] = None
    ya: Optional[Num] = None
    yb: Optional[Num] = None
    describe: str = ""

    def __post_init__(self):
        object.__setattr__(self, "a", self.scale.require(self.a))
        object.__setattr__(self, "b", self.scale.require(self.b))
        if not self.a < self.b:
            raise PreconditionError("need a < b")

    @classmethod
    def from_poly(cls, scale: TimeScale, a, b, poly: Poly, ya=None, yb=None,
                  describe: str = "") -> "VariationalProblem":
        if poly.variables != _POLY_VARS:
            raise ValueError(f"expected a polynomial in {_POLY_VARS}")
        return cls(
            scale, a, b,
            lagrangian=poly,
            d_y=poly.diff("y"),
            d_v=poly.diff("v"),
            ya=ya, yb=yb,
            describe=describe,
        )

    @classmethod
    def from_json(cls, obj) -> "VariationalProblem":
        if not isinstance(obj, dict):
            raise ValueError("problem JSON must be an object")
        for key in ("scale", "a", "b", "lagrangian"):
            if key not in obj:
                raise ValueError(f"problem JSON missing {key!r}")
        scale = TimeScale.from_json(obj["scale"])
        a = scalar_from_json(obj["a"], scale.mode)
        b = scalar_from_json(obj["b"], scale.mode)
        poly = lagrangian_from_spec(obj["lagrangian"])
        boundary = obj.get("boundary") or {}
        ya = scalar_from_json(boundary["ya"], scale.mode) if "ya" in boundary else None
        yb = scalar_from_json(boundary["yb"], scale.mode) if "yb" in boundary else None
        return cls.from_poly(scale, a, b, poly, ya, yb, describe=str(obj["lagrangian"]))

    def partial_y(self, t, y, v):
        if self.d_y is not None:
            return self.d_y(t, y, v)
        return _fd_partial(self.lagrangian, 1)(t, y, v)

    def partial_v(self, t, y, v):
        if self.d_v is not None:
            return self.d_v(t, y, v)
        return _fd_partial(self.lagrangian, 2)(t, y, v)


@dataclass(frozen=True)
class ELReport:
    """Residuals of the integral-form stationarity condition."""

    residuals: tuple
    c_hat: Num
    max_abs_residual: Num
    definedness_findings: tuple

    @property
    def residual_fn(self) -> dict:
        return dict(self.residuals)


def definedness_audit(p: VariationalProblem) -> list:
    """Report whether the stationarity condition reaches the right endpoint."""
    world = p.scale.restrict(p.a, p.b)
    if world.classify(p.b).left_scattered:
        rb = world.rho(p.b)
        return [
            f"b={fmt_scalar(p.b)} is left-scattered: the velocity partial there "
            f"needs the delta derivative of y at b, which is undefined at a "
            f"left-scattered maximum; the integral-form condition holds only on "
            f"[{fmt_scalar(p.a)}, {fmt_scalar(rb)}]",
            "transversality-style conditions that evaluate the velocity partial "
            "at b are unsupported on this scale",
        ]
    return ["no gap"]


def _trajectory(world: TimeScale, y_hat):
    """Evaluator returning (y(sigma(t)), y_delta(t)) along the scale."""

    def traj(t):
        st = world.sigma(t)
        if st > t:
            ys = y_hat(st)
            return ys, (ys - y_hat(t)) / (st - t)
        piece = world.pieces[world._locate(t)[0]]
        slope, _ = _classical_slope(world, y_hat, t, piece, LIMIT_TOL)
        return y_hat(t), slope

    return traj


def el_residual(p: VariationalProblem, y_hat, dense_refinement: int = 32,
                tol: float = QUAD_TOL) -> ELReport:
    """Residual r(t) = L_v(t) - integral of L_y from a to t - c_hat.

    Evaluated on [a, rho(b)], with dense pieces grid-sampled; c_hat is
    the least-squares constant (the mean of the raw residuals)."""
    world = p.scale.restrict(p.a, p.b)
    rb = world.rho(p.b)
    traj = _trajectory(world, y_hat)

    def ly_point(tau):
        ys, yd = traj(tau)
        return p.partial_y(tau, ys, yd)

    def ly_dense(lo, hi):
        def f(x):
            ys, yd = traj(x)
            return float(p.partial_y(x, ys, yd))

        return f

    pts = world.restrict(p.a, rb).grid(dense_refinement)
    raw = []
    acc = zero_of(world)
    prev = pts[0]
    for t in pts:
        if t != prev:
            acc = acc + _integrate(world, prev, t, ly_point, ly_dense, tol)
            prev = t
        ys, yd = traj(t)
        raw.append((t, p.partial_v(t, ys, yd) - acc))

    c_hat = sum(r for _, r in raw) / len(raw)
    residuals = tuple((t, r - c_hat) for t, r in raw)
    max_abs = max(abs(r) for _, r in residuals)
    return ELReport(
        residuals=residuals,
        c_hat=c_hat,
        max_abs_residual=max_abs,
        definedness_findings=tuple(definedness_audit(p)),
    )


@dataclass(frozen=True)
class KernelReport:
    """Which points the all-variations orthogonality argument pins to zero."""

    variant: str
    a: Num
    b: Num
    evaluation_points: tuple
    constrained: tuple
    unconstrained: tuple
    claimed_domain: tuple
    claim_holds: bool
    rank: int


def _nullspace_support(rows, ncols: int):
    """Rank and nullspace support of an exact rational matrix.

    The support is the set of coordinates where some kernel vector is
    nonzero; its complement is the set of coordinates every kernel
    vector kills."""
    m = [list(r) for r in rows if any(r)]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in set(pivots)]
    support = set(free)
    for j, c in enumerate(pivots):
        if any(m[j][f] != 0 for f in free):
            support.add(c)
    return r, support


def fl_kernel(scale: TimeScale, variant: str, a=None, b=None) -> KernelReport:
    """Brute-force fundamental-lemma analysis on a finite discrete range.

    Treats the unknown M as one value per evaluation point and the test
    function as free values at interior points (zero at a and b), then
    reports which M-values orthogonality to every test function forces
    to zero.  The delta variant pairs M(t) with the test function at
    sigma(t) under weight mu(t) over [a, b); the nabla variant pairs
    M(t) with the test function at t under weight nu(t) over (a, b].
    """
    if variant not in ("delta", "nabla"):
        raise ValueError("variant must be 'delta' or 'nabla'")
    a = scale.require(a) if a is not None else scale.min
    b = scale.require(b) if b is not None else scale.max
    sub = scale.restrict(a, b)
    if not sub.is_discrete:
        raise UnsupportedScaleError("kernel analysis requires a purely discrete range")
    pts = sub.points()
    if len(pts) < 2:
        raise PreconditionError("need at least two points")
    interior = pts[1:-1]

    if variant == "delta":
        cols = [t for t in pts if t < b]
        claimed = sub.truncate_k2().points()
    else:
        cols = list(pts)
        claimed = list(pts)

    col_index = {t: i for i, t in enumerate(cols)}
    row_index = {s: i for i, s in enumerate(interior)}
    rows = [[Fraction(0)] * len(cols) for _ in interior]
    for t in cols:
        if variant == "delta":
            st = sub.sigma(t)
            if st in row_index:
                rows[row_index[st]][col_index[t]] += Fraction(sub.mu(t))
        else:
            if t > a and t in row_index:
                rows[row_index[t]][col_index[t]] += Fraction(sub.nu(t))

    rank, support = _nullspace_support(rows, len(cols))
    unconstrained = tuple(t for t in cols if col_index[t] in support)
    constrained = tuple(t for t in cols if col_index[t] not in support)
    assert rank == len(constrained), "pairing matrix lost its diagonal structure"
    return KernelReport(
        variant=variant,
        a=a,
        b=b,
        evaluation_points=tuple(cols),
        constrained=constrained,
        unconstrained=unconstrained,
        claimed_domain=tuple(claimed),
        claim_holds=set(claimed) <= set(constrained),
        rank=rank,
    )


def brute_force_minimizer(p: VariationalProblem, tol: float = 1e-12,
                          max_sweeps: int = 2000) -> ScaleFn:
    """Minimize the discrete action by coordinate descent with Newton steps.

    The action is the sum of mu(t) L(t, y(sigma(t)), y_delta(t)) over
    [a, b).  Interior values move one at a time; boundary values stay
    fixed.  Converges to max |gradient| <= tol, intended for convex L.
    """
    world = p.scale.restrict(p.a, p.b)
    if not world.is_discrete:
        raise UnsupportedScaleError("brute-force minimization requires a discrete range")
    pts = world.points()
    n = len(pts)
    if n > 12:
        raise PreconditionError(f"brute force capped at 12 points, got {n}")
    if p.ya is None or p.yb is None:
        raise PreconditionError("boundary values ya, yb are required")

    fl = [float(t) for t in pts]
    mu = [fl[i + 1] - fl[i] for i in range(n - 1)]
    ya, yb = float(p.ya), float(p.yb)
    y = [ya + (yb - ya) * (fl[i] - fl[0]) / (fl[-1] - fl[0]) for i in range(n)]
    y[0], y[-1] = ya, yb

    def grad(i):
        # Cells touching y[i]: the cell at rho (via the state and the
        # quotient) and the cell at t itself (via the quotient).
        q_prev = (y[i] - y[i - 1]) / mu[i - 1]
        g = mu[i - 1] * float(p.partial_y(fl[i - 1], y[i], q_prev))
        g += float(p.partial_v(fl[i - 1], y[i], q_prev))
        q_here = (y[i + 1] - y[i]) / mu[i]
        g -= float(p.partial_v(fl[i], y[i + 1], q_here))
        return g

    interior = range(1, n - 1)
    if not len(list(interior)):
        return ScaleFn.from_table(p.scale, dict(zip(pts, y)))

    best = (float("inf"), list(y))
    for _ in range(max_sweeps):
        for i in interior:
            g = grad(i)
            h = FD_STEP * max(1.0, abs(y[i]))
            saved = y[i]
            y[i] = saved + h
            g_hi = grad(i)
            y[i] = saved - h
            g_lo = grad(i)
            y[i] = saved
            curvature = (g_hi - g_lo) / (2.0 * h)
            if curvature > 1e-12:
                y[i] -= g / curvature
            else:
                y[i] -= g
        gmax = max(abs(grad(i)) for i in interior)
        if gmax < best[0]:
            best = (gmax, list(y))
        if gmax <= tol:
            return ScaleFn.from_table(p.scale, dict(zip(pts, y)))
    raise ConvergenceError(
        f"coordinate descent stalled at max |gradient| = {best[0]:.3e}",
        estimate=ScaleFn.from_table(p.scale, dict(zip(pts, best[1]))),
        error=best[0],
    )
