import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rand_discrete_scale, rand_fraction
from tsvar import (
    FLOAT,
    Poly,
    PreconditionError,
    ScaleFn,
    TimeScale,
    UnsupportedScaleError,
    VariationalProblem,
    brute_force_minimizer,
    definedness_audit,
    el_residual,
    fl_kernel,
    lagrangian_from_spec,
)

Z6 = TimeScale.discrete(range(6))


def v2_problem(scale=Z6, a=0, b=5, **kw):
    return VariationalProblem.from_json(
        {"scale": scale.to_json(), "a": a, "b": b, "lagrangian": "builtin:v2", **kw}
    )


def discrete_action(p, y):
    """Independent action evaluation: sum of mu * L over [a, b)."""
    world = p.scale.restrict(p.a, p.b)
    total = Fraction(0)
    for t in world.points():
        st_ = world.sigma(t)
        if st_ == t:
            continue
        q = (y(st_) - y(t)) / (st_ - t)
        total += world.mu(t) * p.lagrangian(t, y(st_), q)
    return total


class TestProblemConstruction:
    def test_from_json_minimal(self):
        p = v2_problem()
        assert p.a == 0 and p.b == 5 and p.ya is None

    def test_from_json_with_boundary(self):
        p = v2_problem(boundary={"ya": 0, "yb": "7/2"})
        assert p.yb == Fraction(7, 2)

    def test_missing_key_rejected(self):
        with pytest.raises(ValueError):
            VariationalProblem.from_json({"scale": Z6.to_json(), "a": 0, "b": 5})

    def test_reversed_range_rejected(self):
        with pytest.raises(PreconditionError):
            v2_problem(a=5, b=0)

    def test_unknown_builtin_rejected(self):
        with pytest.raises(ValueError):
            lagrangian_from_spec("builtin:nope")
        with pytest.raises(ValueError):
            lagrangian_from_spec("v^2")

    def test_inline_poly_spec(self):
        poly = lagrangian_from_spec("poly:v^2 + t*y")
        assert poly(1, 2, 3) == 11

    def test_fd_partials_when_no_analytic_form(self):
        p = VariationalProblem(Z6, 0, 5, lagrangian=lambda t, y, v: v * v)
        assert p.partial_v(0.0, 0.0, 3.0) == pytest.approx(6.0, rel=1e-6)
        assert p.partial_y(0.0, 1.0, 3.0) == pytest.approx(0.0, abs=1e-6)


class TestDefinednessAudit:
    def test_left_scattered_endpoint_reported(self):
        findings = definedness_audit(v2_problem())
        assert len(findings) == 2
        assert "left-scattered" in findings[0]
        assert "[0, 4]" in findings[0]

    def test_left_dense_endpoint_clean(self):
        s = TimeScale.interval(0.0, 1.0, mode=FLOAT)
        p = VariationalProblem.from_json(
            {"scale": s.to_json(), "a": 0.0, "b": 1.0, "lagrangian": "builtin:v2"}
        )
        assert definedness_audit(p) == ["no gap"]


class TestELResidual:
    def test_linear_trajectory_is_stationary(self):
        rep = el_residual(v2_problem(), ScaleFn.from_callable(Z6, lambda t: t))
        assert rep.c_hat == 2
        assert rep.max_abs_residual == 0
        assert [t for t, _ in rep.residuals] == [Fraction(k) for k in range(5)]

    def test_square_trajectory_misses(self):
        rep = el_residual(v2_problem(), ScaleFn.from_callable(Z6, lambda t: t * t))
        assert rep.max_abs_residual == 8
        assert rep.residual_fn[Fraction(0)] == -8

    def test_exact_rational_arithmetic(self):
        rep = el_residual(v2_problem(), ScaleFn.from_callable(Z6, lambda t: t * t))
        assert all(isinstance(r, Fraction) for _, r in rep.residuals)

    def test_hybrid_scale_linear_trajectory(self):
        s = TimeScale(((0.0, 1.0), (2.0, 2.0)), mode=FLOAT)
        p = VariationalProblem.from_json(
            {"scale": s.to_json(), "a": 0.0, "b": 2.0, "lagrangian": "builtin:v2"}
        )
        y = ScaleFn.from_callable(s, lambda t: t, deriv=lambda t: 1.0, hint="c1")
        rep = el_residual(p, y)
        assert rep.max_abs_residual <= 1e-9

    def test_findings_travel_with_report(self):
        rep = el_residual(v2_problem(), ScaleFn.from_callable(Z6, lambda t: t))
        assert len(rep.definedness_findings) == 2


class TestKernel:
    def test_delta_kernel_on_z6(self):
        rep = fl_kernel(Z6, "delta", 0, 5)
        assert rep.unconstrained == (Fraction(4),)
        assert rep.constrained == tuple(Fraction(k) for k in range(4))
        assert rep.claimed_domain == tuple(Fraction(k) for k in range(4))
        assert rep.claim_holds and rep.rank == 4

    def test_nabla_kernel_misses_endpoints(self):
        s = TimeScale.discrete(range(1, 6))
        rep = fl_kernel(s, "nabla", 1, 5)
        assert rep.unconstrained == (Fraction(1), Fraction(5))
        assert rep.constrained == (Fraction(2), Fraction(3), Fraction(4))
        assert not rep.claim_holds and rep.rank == 3

    def test_two_point_delta_scale_constrains_nothing(self):
        rep = fl_kernel(TimeScale.discrete([0, 1]), "delta")
        assert rep.constrained == ()
        assert rep.unconstrained == (Fraction(0),)

    def test_variant_validated(self):
        with pytest.raises(ValueError):
            fl_kernel(Z6, "gamma")

    def test_requires_discrete_range(self):
        with pytest.raises(UnsupportedScaleError):
            fl_kernel(TimeScale.interval(0, 1), "delta")

    def test_relabeling_invariance(self):
        # mapping t -> 2t + 1 must map the kernel sets pointwise
        base = fl_kernel(Z6, "delta", 0, 5)
        mapped_scale = TimeScale.discrete([2 * k + 1 for k in range(6)])
        mapped = fl_kernel(mapped_scale, "delta", 1, 11)
        relabel = {t: 2 * t + 1 for t in Z6.points()}
        assert mapped.unconstrained == tuple(relabel[t] for t in base.unconstrained)
        assert mapped.constrained == tuple(relabel[t] for t in base.constrained)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10**6))
    def test_delta_kernel_always_frees_exactly_the_last_cell(self, seed):
        rng = random.Random(seed)
        s = rand_discrete_scale(rng, rng.randint(3, 9))
        rep = fl_kernel(s, "delta")
        pts = s.points()
        assert rep.unconstrained == (pts[-2],)
        assert rep.claim_holds


class TestMinimizer:
    def test_straight_line_for_kinetic_action(self):
        s = TimeScale.discrete(range(5))
        p = VariationalProblem.from_json(
            {"scale": s.to_json(), "a": 0, "b": 4, "lagrangian": "builtin:v2",
             "boundary": {"ya": 0, "yb": 4}}
        )
        y = brute_force_minimizer(p)
        for t in s.points():
            assert float(y(t)) == pytest.approx(float(t), abs=1e-9)

    def test_zero_for_symmetric_convex_action(self):
        s = TimeScale.discrete(range(-2, 3))
        p = VariationalProblem.from_json(
            {"scale": s.to_json(), "a": -2, "b": 2, "lagrangian": "builtin:v2+y2",
             "boundary": {"ya": 0, "yb": 0}}
        )
        y = brute_force_minimizer(p)
        for t in s.points():
            assert abs(float(y(t))) <= 1e-9

    def test_minimizer_satisfies_stationarity(self):
        s = TimeScale.discrete(range(5))
        p = VariationalProblem.from_json(
            {"scale": s.to_json(), "a": 0, "b": 4, "lagrangian": "builtin:v2+y2",
             "boundary": {"ya": 0, "yb": 4}}
        )
        y = brute_force_minimizer(p)
        rep = el_residual(p, y)
        assert float(rep.max_abs_residual) <= 1e-9

    def test_minimizer_beats_random_perturbations(self):
        rng = random.Random(7)
        s = TimeScale.discrete(range(5))
        poly = Poly.parse("v^2 + y^2 + t*y", ("t", "y", "v"))
        p = VariationalProblem.from_poly(s, 0, 4, poly, ya=Fraction(0), yb=Fraction(2))
        y = brute_force_minimizer(p)
        base = discrete_action(p, lambda t: Fraction(y(t)))
        pts = s.points()
        for _ in range(10):
            bump = {t: Fraction(0) for t in pts}
            for t in pts[1:-1]:
                bump[t] = rand_fraction(rng, -2, 2, 1000)
            perturbed = discrete_action(
                p, lambda t: Fraction(y(t)) + bump[t] / 1000
            )
            assert perturbed >= base - Fraction(1, 10**18)

    def test_boundary_values_required(self):
        with pytest.raises(PreconditionError):
            brute_force_minimizer(v2_problem())

    def test_size_cap(self):
        s = TimeScale.discrete(range(13))
        p = VariationalProblem.from_json(
            {"scale": s.to_json(), "a": 0, "b": 12, "lagrangian": "builtin:v2",
             "boundary": {"ya": 0, "yb": 1}}
        )
        with pytest.raises(PreconditionError):
            brute_force_minimizer(p)
