"""
Tests for the classical_limit module.
"""
import pytest

from app.classical_limit import (
    ClassicalParams,
    build_delta_r,
    build_r0,
    check_bd,
    check_cybe,
    compare_up_to_flip,
    linearized_constraints,
    r_from_R_jet,
)
from app.deformations import DeformationSpec
from app.errors import ConstraintError, FormatError, ShapeError, SpecError
from app.tensorspace import PairOp, flip_conjugate, flip_transpose

SPEC = DeformationSpec.principal(1, 2, 3)
BD_P = {(2, 4): 1, (3, 4): -1}


class TestClassicalParams:
    """Test classical parameter handling."""

    def test_antisymmetric_extension(self):
        """Test p^{ji} = -p^{ij} and p^{ii} = 0."""
        cp = ClassicalParams(3, {(1, 2): 3})
        assert cp.pv(2, 1) == -3
        assert cp.pv(2, 2) == 0
        assert cp.pv(1, 3) == 0

    def test_from_json(self):
        """Test the classical parameter file format."""
        cp = ClassicalParams.from_json({"n": 2, "p": [{"i": 1, "j": 2, "val": [3, 2]}], "epsilon": [1, 1]})
        assert cp.p[(1, 2)] * 2 == 3
        assert cp.epsilon == 1

    def test_from_json_rejects_cyclotomic(self):
        """Test p values must be rational."""
        with pytest.raises(FormatError):
            ClassicalParams.from_json({"n": 2, "p": [{"i": 1, "j": 2, "val": "w"}]})


class TestRFromRJet:
    """Test jet extraction of r."""

    def test_n2_p0(self):
        """Test the N=2 expansion at p=0."""
        r = r_from_R_jet(ClassicalParams(2))
        assert r.entries == {((1, 2), (2, 1)): 1, ((2, 1), (2, 1)): -1}

    def test_n2_p(self):
        """Test the N=2 expansion with p=3."""
        r = r_from_R_jet(ClassicalParams(2, {(1, 2): 3}))
        assert r.entries == {((1, 2), (2, 1)): 1, ((1, 2), (1, 2)): 3, ((2, 1), (2, 1)): -4}

    def test_epsilon_zero_ignores_spec(self):
        """Test epsilon=0 gives no delta r part."""
        cp = ClassicalParams(4, BD_P)
        assert r_from_R_jet(cp, SPEC) == r_from_R_jet(cp)

    def test_matches_r0_after_flip(self, rng):
        """Test extraction agrees with r0 up to the flip-transpose frame."""
        for n in (2, 3, 4):
            p = {(i, j): rng.randint(-3, 3) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
            cp = ClassicalParams(n, p)
            comparison = compare_up_to_flip(r_from_R_jet(cp), build_r0(cp))
            assert comparison.verdict == "equal_after_flip"
            assert comparison.frame == "transpose"

    def test_delta_r_shift(self):
        """Test the deformed r is r0 + epsilon delta r in the matrix-unit frame."""
        cp = ClassicalParams(4, BD_P, 2)
        expected = build_r0(cp) + build_delta_r(SPEC, 4).scale(2)
        assert flip_transpose(r_from_R_jet(cp, SPEC)) == expected

    def test_constraint_violation(self):
        """Test BD-violating p with a spec raises ConstraintError."""
        with pytest.raises(ConstraintError):
            r_from_R_jet(ClassicalParams(4, {}, 1), SPEC)


class TestR0AndDeltaR:
    """Test the direct constructions."""

    def test_r0_n2(self):
        """Test r0 at N=2 for p=0 and p=3."""
        assert build_r0(ClassicalParams(2)).entries == {((1, 2), (2, 1)): 1, ((1, 2), (1, 2)): -1}
        assert build_r0(ClassicalParams(2, {(1, 2): 3})).entries == {
            ((1, 2), (2, 1)): 1, ((2, 1), (2, 1)): 3, ((1, 2), (1, 2)): -4,
        }

    def test_r0_count(self):
        """Test N=3 has 3 off-diagonal and 6 diagonal entries."""
        assert len(build_r0(ClassicalParams(3, {(1, 2): 1, (1, 3): 2, (2, 3): 5}))) == 9

    def test_delta_r(self):
        """Test the elementary shift for (k, i, j, l) = (1, 2, 3, 4)."""
        delta = build_delta_r(SPEC)
        assert delta.entries == {((2, 3), (1, 4)): 1, ((3, 2), (4, 1)): -1}
        assert (delta + flip_conjugate(delta)).is_zero()

    def test_delta_r_exceptional(self):
        """Test exceptional specs are refused."""
        with pytest.raises(SpecError):
            build_delta_r(DeformationSpec.exceptional("upper", 1, 3))


class TestBelavinDrinfeld:
    """Test the BD condition."""

    def test_passes(self):
        """Test p24=1, p34=-1."""
        assert check_bd(ClassicalParams(4, BD_P), SPEC).passed

    def test_fails(self):
        """Test p24=0 fails at m=2 and m=4."""
        report = check_bd(ClassicalParams(4, {(3, 4): -1}), SPEC)
        assert not report.passed
        assert report.failed == [2, 4]

    def test_matches_linearized_constraints(self, rng):
        """Test BD agrees with the order-h constraints on random integer p."""
        for spec in (SPEC, DeformationSpec.principal(2, 1, 4)):
            for _ in range(20):
                p = {(i, j): rng.randint(-1, 1) for i in range(1, 5) for j in range(i + 1, 5)}
                cp = ClassicalParams(4, p)
                assert check_bd(cp, spec).passed == linearized_constraints(cp, spec).passed


class TestCybe:
    """Test the classical Yang-Baxter check."""

    @pytest.mark.parametrize("p", [0, 3])
    def test_r0(self, p):
        """Test r0 at N=2."""
        assert check_cybe(build_r0(ClassicalParams(2, {(1, 2): p}))).passed

    def test_deformed(self):
        """Test the deformed r on BD-satisfying p."""
        assert check_cybe(r_from_R_jet(ClassicalParams(4, BD_P, 1), SPEC)).passed

    def test_perturbed_fails(self):
        """Test removing the diagonal entry of r0 breaks the equation."""
        r = PairOp(2, {((1, 2), (2, 1)): 1})
        report = check_cybe(r)
        assert not report.passed
        assert report.residual.entries


class TestCompare:
    """Test comparison up to the flip."""

    def test_equal(self):
        """Test identical operators."""
        a = PairOp(2, {((1, 2), (2, 2)): 1})
        assert compare_up_to_flip(a, a).verdict == "equal"

    def test_flip(self):
        """Test a flip-conjugated single entry."""
        a = PairOp(3, {((1, 2), (3, 3)): 1})
        comparison = compare_up_to_flip(flip_conjugate(a), a)
        assert comparison.verdict == "equal_after_flip"
        assert comparison.frame == "conjugate"

    def test_different(self):
        """Test unrelated operators."""
        a = PairOp(2, {((1, 2), (2, 2)): 1})
        b = PairOp(2, {((1, 1), (2, 2)): 1})
        assert compare_up_to_flip(a, b).verdict == "different"

    def test_dimension_mismatch(self):
        """Test dimension mismatch raises ShapeError."""
        with pytest.raises(ShapeError):
            compare_up_to_flip(PairOp(2), PairOp(3))
