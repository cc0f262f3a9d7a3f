import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rand_discrete_scale
from tsvar import FLOAT, RATIONAL, DomainError, TimeScale, UnsupportedScaleError


class TestCanonicalization:
    def test_merges_touching_and_overlapping_pieces(self):
        s = TimeScale(((0, 2), (2, 3), (5, 7), (6, 6)))
        assert s.pieces == ((Fraction(0), Fraction(3)), (Fraction(5), Fraction(7)))

    def test_sorts_pieces(self):
        s = TimeScale((5, (0, 1), 3))
        assert s.pieces == (
            (Fraction(0), Fraction(1)),
            (Fraction(3), Fraction(3)),
            (Fraction(5), Fraction(5)),
        )

    def test_duplicate_points_collapse(self):
        s = TimeScale.discrete([1, 1, 2])
        assert s.points() == [Fraction(1), Fraction(2)]

    def test_reversed_piece_rejected(self):
        with pytest.raises(ValueError):
            TimeScale(((2, 1),))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            TimeScale(())

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            TimeScale(((0.0, float("inf")),), mode=FLOAT)

    def test_rational_eps_rejected(self):
        with pytest.raises(ValueError):
            TimeScale.discrete([0, 1], mode=RATIONAL, eps=1e-9)


class TestJumpOperators:
    def setup_method(self):
        self.s = TimeScale(((0, 1), (2, 2), (3, 4)))

    def test_sigma_inside_interval_is_identity(self):
        assert self.s.sigma(Fraction(1, 2)) == Fraction(1, 2)

    def test_sigma_jumps_at_piece_top(self):
        assert self.s.sigma(1) == 2
        assert self.s.sigma(2) == 3

    def test_sigma_fixes_max(self):
        assert self.s.sigma(4) == 4

    def test_rho_jumps_at_piece_bottom(self):
        assert self.s.rho(2) == 1
        assert self.s.rho(3) == 2

    def test_rho_fixes_min(self):
        assert self.s.rho(0) == 0

    def test_graininess(self):
        assert self.s.mu(1) == 1
        assert self.s.mu(Fraction(1, 2)) == 0
        assert self.s.nu(3) == 1
        assert self.s.nu(4) == 0

    def test_off_scale_rejected(self):
        with pytest.raises(DomainError):
            self.s.sigma(Fraction(3, 2))


class TestClassify:
    def test_isolated_point(self):
        s = TimeScale(((0, 1), (2, 2), (3, 4)))
        c = s.classify(2)
        assert c.isolated and c.left_scattered and c.right_scattered
        assert c.label() == "left-scattered right-scattered"

    def test_interval_interior(self):
        s = TimeScale.interval(0, 1)
        c = s.classify(Fraction(1, 2))
        assert c.left_dense and c.right_dense and not c.isolated

    def test_breaks_sigma_continuity_at_piece_top(self):
        s = TimeScale(((0.0, 1.0), (1.5, 1.5)), mode=FLOAT)
        assert s.classify(1.0).breaks_sigma_continuity
        assert not s.classify(0.5).breaks_sigma_continuity
        assert not s.classify(1.5).breaks_sigma_continuity

    def test_min_never_breaks_sigma_continuity(self):
        s = TimeScale.discrete([0, 1, 2])
        assert not s.classify(0).breaks_sigma_continuity
        assert s.classify(0).label() == "left-dense right-scattered (min)"


class TestDerivedScales:
    def test_truncate_k_drops_left_scattered_max(self):
        s = TimeScale.discrete(range(4))
        assert s.truncate_k().points() == [Fraction(k) for k in range(3)]
        assert s.truncate_k2().points() == [Fraction(k) for k in range(2)]

    def test_truncate_k_keeps_left_dense_max(self):
        s = TimeScale.interval(0, 1)
        assert s.truncate_k() is s

    def test_restrict_clips_intervals(self):
        s = TimeScale(((0, 4), (6, 6)))
        r = s.restrict(1, 3)
        assert r.pieces == ((Fraction(1), Fraction(3)),)
        with pytest.raises(DomainError):
            s.restrict(3, 1)

    def test_points_requires_discrete(self):
        with pytest.raises(UnsupportedScaleError):
            TimeScale.interval(0, 1).points()

    def test_grid_refinement(self):
        s = TimeScale(((0, 1), (2, 2)))
        g = s.grid(3)
        assert g == [0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1, 2]
        assert all(x in s for x in g)


class TestMembership:
    def test_eps_snapping(self):
        s = TimeScale.discrete([0.0, 1.0], mode=FLOAT, eps=1e-9)
        assert s.require(1.0 + 1e-10) == 1.0
        with pytest.raises(DomainError):
            s.require(1.0 + 1e-6)

    def test_exact_float_membership_without_eps(self):
        s = TimeScale.discrete([0.0, 1.0], mode=FLOAT)
        assert 1.0 in s
        assert 1.0 + 1e-12 not in s

    def test_contains_handles_garbage(self):
        s = TimeScale.discrete([0, 1])
        assert "pear" not in s


class TestSerialization:
    def test_round_trip_rational(self):
        s = TimeScale(((Fraction(1, 3), Fraction(2)), (Fraction(7, 2), Fraction(7, 2))))
        again = TimeScale.from_json(s.to_json())
        assert again == s

    def test_round_trip_float_with_eps(self):
        s = TimeScale(((0.0, 1.0),), mode=FLOAT, eps=1e-9)
        again = TimeScale.loads(json.dumps(s.to_json()))
        assert again.pieces == s.pieces and again.eps == s.eps

    def test_rational_mode_rejects_json_floats(self):
        with pytest.raises(DomainError):
            TimeScale.from_json({"mode": "rational", "pieces": [{"point": 0.5}]})

    def test_nan_literal_rejected(self):
        with pytest.raises(DomainError):
            TimeScale.loads('{"mode": "float", "pieces": [{"point": NaN}]}')

    def test_bad_schema_rejected(self):
        for obj in (
            [],
            {"mode": "rational"},
            {"mode": "decimal", "pieces": [{"point": 0}]},
            {"mode": "rational", "pieces": [{"pt": 0}]},
            {"mode": "rational", "pieces": [{"interval": ["2", "1"]}]},
        ):
            with pytest.raises(DomainError):
                TimeScale.from_json(obj)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), npts=st.integers(2, 9))
def test_jump_operator_properties(seed, npts):
    rng = random.Random(seed)
    s = rand_discrete_scale(rng, npts)
    for t in s.points():
        assert s.sigma(t) >= t
        assert s.rho(t) <= t
        assert s.mu(t) >= 0 and s.nu(t) >= 0
        if s.sigma(t) > t:
            assert s.rho(s.sigma(t)) == t
        if s.rho(t) < t:
            assert s.sigma(s.rho(t)) == t
