"""
Tests for the standard_p module.
"""
import pytest

from app.errors import FormatError, ParamError
from app.scalars import CycScalar, rational
from app.standard_p import (
    ParamSet,
    build_standard_P,
    check_braid,
    check_hecke,
    check_sl_condition,
    check_theorem2,
    convert_P_R,
    random_params,
)
from app.tensorspace import PairOp, compose, flip_op, identity_op, unit_op


class TestParamSet:
    """Test parameter set validation."""

    def test_missing_pairs_default_to_one(self):
        """Test unspecified q's are 1 and reciprocals are derived."""
        params = ParamSet(3, 2, {(1, 2): 5})
        assert params.qv(1, 3) == 1
        assert params.qv(2, 1) == rational(1, 5)
        assert params.qv(2, 2) == 1

    def test_hat_q_and_r(self):
        """Test the derived accessors."""
        params = ParamSet(2, 3, {(1, 2): 2})
        assert params.hat_q(1, 2) == 2
        assert params.hat_q(2, 1) == rational(1, 6)
        assert params.r(1, 2) == 6

    @pytest.mark.parametrize("a", [0, -1])
    def test_forbidden_a(self, a):
        """Test a = 0 and a = -1 are rejected."""
        with pytest.raises(ParamError):
            ParamSet(2, a)

    def test_bad_q_index(self):
        """Test q keys must satisfy i < j."""
        with pytest.raises(ParamError):
            ParamSet(2, 3, {(2, 1): 2})

    def test_zero_q(self):
        """Test q values must be nonzero."""
        with pytest.raises(ParamError):
            ParamSet(2, 3, {(1, 2): 0})

    def test_from_json(self, n2_params):
        """Test reading the parameter file format."""
        assert ParamSet.from_json(n2_params.to_json()).q == n2_params.q

    def test_from_json_pointer(self):
        """Test malformed entries are located by pointer."""
        with pytest.raises(FormatError) as exc:
            ParamSet.from_json({"n": 2, "a": 3, "q": [{"i": 1, "j": 2, "val": "x"}]}, "p.json")
        assert "/q/0" in str(exc.value)

    def test_from_json_missing_field(self):
        """Test a missing a is reported."""
        with pytest.raises(FormatError):
            ParamSet.from_json({"n": 2})


class TestBuildStandardP:
    """Test the closed form of the standard P."""

    def test_classical_point_is_flip(self):
        """Test q = 1, a = 1 gives the flip."""
        assert build_standard_P(ParamSet(2, 1)) == flip_op(2)

    def test_n2_entries(self, n2_params):
        """Test N=2, q=2, a=3 entries."""
        P = build_standard_P(n2_params)
        assert P.entries == {
            ((1, 1), (1, 1)): 1,
            ((2, 2), (2, 2)): 1,
            ((1, 2), (1, 2)): -2,
            ((1, 2), (2, 1)): rational(1, 2),
            ((2, 1), (1, 2)): 6,
        }

    def test_entry_count(self, rng):
        """Test N=3 has N^2 + N(N-1)/2 entries."""
        assert len(build_standard_P(random_params(3, rng))) == 12

    def test_square_is_hecke_combination(self, n2_params):
        """Test P^2 = (1 - a) P + a."""
        P = build_standard_P(n2_params)
        assert compose(P, P) == P.scale(-2) + identity_op(2).scale(3)

    def test_block_trace_and_determinant(self, rng):
        """Test each 2x2 block has trace 1 - a and determinant -a."""
        params = random_params(3, rng)
        P = build_standard_P(params)
        a = params.a
        for i, j in params.pairs():
            block = [[P.get((i, j), (i, j)), P.get((i, j), (j, i))],
                     [P.get((j, i), (i, j)), P.get((j, i), (j, i))]]
            assert block[0][0] + block[1][1] == 1 - a
            assert block[0][0] * block[1][1] - block[0][1] * block[1][0] == -a


class TestChecks:
    """Test the Hecke, braid and theorem2 checks."""

    def test_flip_passes(self):
        """Test the flip satisfies Hecke at a=1 and braid."""
        assert check_hecke(flip_op(3), 1).passed
        assert check_braid(flip_op(3)).passed

    def test_random_hecke(self, rng):
        """Test random N=4 parameters with a=5."""
        params = random_params(4, rng, a=5)
        report = check_hecke(build_standard_P(params), params.a)
        assert report.passed
        assert report.residual.is_zero()

    @pytest.mark.slow
    def test_random_braid_n5(self, rng):
        """Test the braid relation for the standard P at N=5."""
        assert check_braid(build_standard_P(random_params(5, rng))).passed

    def test_perturbed_hecke_fails(self, n2_params):
        """Test adding 1 to an entry breaks Hecke."""
        P = build_standard_P(n2_params) + unit_op(2, (1, 2), (1, 2))
        report = check_hecke(P, n2_params.a)
        assert not report.passed
        assert len(report.residual) > 0

    def test_hecke_rejects_minus_one(self):
        """Test a = -1 is outside the precondition."""
        with pytest.raises(ParamError):
            check_hecke(flip_op(2), -1)

    def test_qybe_form(self, rng):
        """Test the converted R satisfies the quantum Yang-Baxter equation."""
        P = build_standard_P(random_params(3, rng))
        assert check_braid(convert_P_R(P), form="qybe").passed

    def test_theorem2_standard(self, rng):
        """Test both residuals vanish for a standard P."""
        params = random_params(3, rng)
        report = check_theorem2(build_standard_P(params), params.a)
        assert report.passed
        assert report.minus_one_residual.is_zero()
        assert report.plus_a_residual.is_zero()

    def test_theorem2_flip(self):
        """Test the flip at a=2."""
        assert check_theorem2(flip_op(2), 2).passed

    def test_theorem2_matches_braid(self, rng):
        """Test the theorem2 verdict equals the braid verdict on corrupted operators."""
        for _ in range(10):
            params = random_params(2, rng)
            P = build_standard_P(params)
            slot = ((rng.randint(1, 2), rng.randint(1, 2)), (rng.randint(1, 2), rng.randint(1, 2)))
            corrupted = P + PairOp(2, {slot: rng.randint(1, 3)})
            for op in (P, corrupted):
                assert check_theorem2(op, params.a).passed == check_braid(op).passed


class TestConvert:
    """Test the P <-> R conversion."""

    def test_flip_and_identity(self):
        """Test convert swaps the flip and the identity."""
        assert convert_P_R(flip_op(3)) == identity_op(3)
        assert convert_P_R(identity_op(3), "r_to_p") == flip_op(3)

    def test_involution(self, rng):
        """Test converting twice is the identity map."""
        P = build_standard_P(random_params(3, rng))
        assert convert_P_R(convert_P_R(P)) == P

    def test_bad_direction(self):
        """Test unknown directions are rejected."""
        with pytest.raises(ParamError):
            convert_P_R(flip_op(2), "sideways")


class TestSlCondition:
    """Test the squared sl condition."""

    def test_classical_point(self):
        """Test q = 1, a = 1 passes every j."""
        assert check_sl_condition(ParamSet(3, 1)).passed

    def test_n2_solution(self):
        """Test a=4, q12=1/2 passes."""
        report = check_sl_condition(ParamSet(2, 4, {(1, 2): rational(1, 2)}))
        assert report.passed
        assert report.to_dict()["per_j"][0]["pass"]

    def test_esoteric_gl3_fails(self):
        """Test the esoteric gl(3) parameters fail at j=1 with ratio 4."""
        params = ParamSet(3, 4, {(1, 2): rational(1, 2), (2, 3): rational(1, 2), (1, 3): rational(1, 4)})
        report = check_sl_condition(params)
        assert not report.passed
        assert report.ratios[1] == CycScalar(4)
