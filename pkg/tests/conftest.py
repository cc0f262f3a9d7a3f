"""Shared generators for randomized exactness tests.

Everything random is seeded by the caller, so failures replay
deterministically.
"""

from fractions import Fraction

from tsvar import Poly, ScaleFn, TimeScale


def rand_fraction(rng, lo=-9, hi=9, dmax=9) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, dmax))


def rand_discrete_scale(rng, npts, start_lo=-3, start_hi=3) -> TimeScale:
    """Ascending rational points with random uneven gaps."""
    t = Fraction(rng.randint(start_lo, start_hi))
    pts = [t]
    for _ in range(npts - 1):
        t = t + Fraction(rng.randint(1, 4), rng.randint(1, 3))
        pts.append(t)
    return TimeScale.discrete(pts)


def rand_poly1(rng, max_degree=3) -> Poly:
    """Random univariate polynomial with rational coefficients."""
    p = Poly.constant(("t",), 0)
    t = Poly.var(("t",), "t")
    power = Poly.constant(("t",), 1)
    for _ in range(max_degree + 1):
        p = p + Poly.constant(("t",), rand_fraction(rng, -4, 4, 4)) * power
        power = power * t
    return p


def rand_tabulation(rng, scale) -> ScaleFn:
    """Random rational values tabulated on a discrete scale."""
    values = {t: rand_fraction(rng) for t in scale.points()}
    return ScaleFn.from_table(scale, values)


_VARS2 = ("t1", "t2", "y0", "y1", "y2")


def rand_quadratic2(rng) -> Poly:
    """Random quadratic integrand in (t1, t2, y0, y1, y2)."""
    v = {name: Poly.var(_VARS2, name) for name in _VARS2}
    pool = [
        v["y0"] * v["y0"],
        v["y1"] * v["y1"],
        v["y2"] * v["y2"],
        v["y0"] * v["y1"],
        v["y0"] * v["y2"],
        v["y1"] * v["y2"],
        v["t1"] * v["y0"],
        v["t2"] * v["y1"],
        v["t1"] * v["y2"],
        v["t1"] * v["t2"],
        v["y0"],
        v["y1"],
        v["y2"],
    ]
    p = Poly.constant(_VARS2, 0)
    for mono in pool:
        p = p + Poly.constant(_VARS2, rand_fraction(rng, -4, 4, 4)) * mono
    return p
