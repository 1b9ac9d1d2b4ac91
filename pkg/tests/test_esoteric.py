"""
Tests for the esoteric module.
"""
import pytest

from app.errors import FormatError, ParamError, SpecError
from app.esoteric import (
    EsotericSpec,
    build_esoteric_R,
    build_esoteric_R0,
    build_esoteric_R1,
    check_esoteric,
    esoteric_coeffs,
    esoteric_params,
    esoteric_relations,
    expected_cross_block,
    expected_relations,
)
from app.relations import (
    antiplane_relations,
    cross_relations,
    degree3_dims,
    parse_relation,
    plane_relations,
    relation_in_span,
    same_relation_span,
)
from app.scalars import rational
from app.standard_p import build_standard_P, convert_P_R

GL3 = EsotericSpec(2, 2, (1,))
GL5 = EsotericSpec(3, 2, (1, 1))


class TestEsotericSpec:
    """Test esoteric spec validation."""

    def test_zero_prefix(self):
        """Test zeros after a nonzero mu are rejected."""
        with pytest.raises(SpecError):
            EsotericSpec(3, 2, (1, 0))
        assert EsotericSpec(3, 2, (0, 1)).cutoff == 1

    def test_mu_length(self):
        """Test n-1 mu values are required."""
        with pytest.raises(SpecError):
            EsotericSpec(3, 2, (1,))

    @pytest.mark.parametrize("q", [0, 1, -1])
    def test_bad_q(self, q):
        """Test q = 0 and q^4 = 1 are rejected."""
        with pytest.raises(ParamError):
            EsotericSpec(2, q, (1,))

    def test_from_json(self):
        """Test the esoteric spec file format."""
        spec = EsotericSpec.from_json({"n": 3, "q": [2, 1], "mu": [1, 1]})
        assert spec == GL5
        with pytest.raises(FormatError):
            EsotericSpec.from_json({"n": 3, "q": 2, "mu": [1, 0]})

    def test_params(self):
        """Test the parameter point for gl(3)."""
        params = esoteric_params(GL3)
        assert params.n == 3
        assert params.a == 4
        assert params.qv(1, 2) == rational(1, 2)
        assert params.qv(1, 3) == rational(1, 4)


class TestCoefficients:
    """Test the coefficient recursion."""

    def test_gl5(self):
        """Test n=3, q=2, mu=(1,1)."""
        coeffs = esoteric_coeffs(GL5)
        assert coeffs.mu_prime == [rational(-1, 16), rational(-1, 4)]
        assert coeffs.lam == {(1, 2): rational(-3, 4)}
        assert coeffs.lam_prime == {(1, 2): 3}

    def test_gl3(self):
        """Test n=2 has no lambdas."""
        mu_prime, lam, lam_prime = esoteric_coeffs(GL3)
        assert mu_prime == [rational(-1, 4)]
        assert lam == {} and lam_prime == {}

    def test_scaling(self):
        """Test rescaling mu leaves the lambdas unchanged."""
        scaled = EsotericSpec(3, 2, (5, 5))
        assert esoteric_coeffs(scaled).lam == esoteric_coeffs(GL5).lam
        assert esoteric_coeffs(scaled).mu_prime[0] == rational(-5, 16)


class TestBuildR:
    """Test the R-matrix assembly."""

    def test_gl3_deformation_entries(self):
        """Test R1 for gl(3) has the mu and mu' entries."""
        R1 = build_esoteric_R1(GL3)
        assert R1.entries == {((1, 3), (2, 2)): 1, ((3, 1), (2, 2)): rational(-1, 4)}

    def test_gl5_entry_count(self):
        """Test 4 mu entries and 2 lambda entries."""
        assert len(build_esoteric_R1(GL5)) == 6

    def test_undeformed_is_standard(self):
        """Test mu = 0 reproduces the standard P on the parameter point."""
        spec = EsotericSpec(3, 3, (0, 0))
        assert build_esoteric_R(spec) == build_esoteric_R0(spec)
        assert convert_P_R(build_esoteric_R0(spec)) == build_standard_P(esoteric_params(spec))

    def test_bad_override(self):
        """Test overrides outside the lambda range are rejected."""
        with pytest.raises(SpecError):
            build_esoteric_R(GL3, overrides={"lambda": {(1, 2): 1}})


class TestCheckEsoteric:
    """Test exactness of the esoteric deformation."""

    @pytest.mark.parametrize("spec", [
        GL3,
        GL5,
        EsotericSpec(2, rational(5, 7), (3,)),
        EsotericSpec(3, rational(5, 7), (1, 2)),
        EsotericSpec(3, 3, (0, 1)),
    ])
    def test_passes(self, spec):
        """Test braid and Hecke hold with a = q^2."""
        report = check_esoteric(spec)
        assert report.passed
        assert report.to_dict()["pass"]

    @pytest.mark.slow
    def test_gl7(self):
        """Test n=4."""
        assert check_esoteric(EsotericSpec(4, 2, (1, 2, 3))).passed

    def test_override_fails(self):
        """Test a wrong lambda breaks the deformation."""
        assert not check_esoteric(GL5, overrides={"lambda": {(1, 2): 1}}).passed

    def test_printed_placement(self, caplog):
        """Test the printed lambda normalization is reported as failing for gl(5)."""
        assert check_esoteric(GL3, lambda_placement="printed").passed
        report = check_esoteric(GL5, lambda_placement="printed")
        assert not report.passed
        assert "printed lambda normalization" in caplog.text


class TestEsotericRelations:
    """Test the relation cross-check."""

    def test_gl3_examples(self):
        """Test the top anti-plane relation and the anti-diagonal plane relation."""
        P = convert_P_R(build_esoteric_R(GL3))
        antiplane = antiplane_relations(P, 4)
        plane = plane_relations(P)
        assert relation_in_span(parse_relation("t2*t2 - (1/4)*t3*t1 = 0"), antiplane)
        assert relation_in_span(parse_relation("x1*x3 - (1/4)*x3*x1 = 0"), plane)

    def test_expected_counts(self):
        """Test N(N-1)/2 plane and N(N+1)/2 anti-plane relations."""
        plane, antiplane = expected_relations(GL5)
        assert len(plane) == 10
        assert len(antiplane) == 15

    @pytest.mark.parametrize("spec", [GL3, GL5, EsotericSpec(3, 2, (0, 0))])
    def test_match(self, spec):
        """Test extracted relations span the closed-form list."""
        report = esoteric_relations(spec)
        assert report.passed
        assert all(ok for _, ok in report.per_relation)

    @pytest.mark.parametrize("spec", [GL3, GL5, EsotericSpec(3, 3, (0, 2))])
    def test_anti_diagonal_cross_block(self, spec):
        """Test the mixed relations on x^i θ^{i'} span the closed-form block."""
        report = esoteric_relations(spec)
        assert report.cross_block_match
        assert report.cross_match
        assert report.to_dict()["cross_block_match"]

    def test_cross_block_depends_on_mu(self):
        """Test the anti-diagonal block tells mu = 1 from mu = 3."""
        P = convert_P_R(build_esoteric_R(GL3))
        relations = cross_relations(P, 4)
        block = [relations[(i - 1) * 3 + (4 - i) - 1] for i in range(1, 4)]
        assert len(expected_cross_block(GL3)) == 3
        assert same_relation_span(block, expected_cross_block(GL3))
        assert not same_relation_span(block, expected_cross_block(EsotericSpec(2, 2, (3,))))

    def test_degree3(self):
        """Test the gl(3) algebras are flat in degree 3."""
        P = convert_P_R(build_esoteric_R(GL3))
        assert degree3_dims(P, 4) == (10, 1)
