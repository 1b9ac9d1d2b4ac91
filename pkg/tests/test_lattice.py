"""
Tests for the lattice module.
"""
import pytest
from sympy import Matrix

from app.errors import Infeasible
from app.lattice import (
    column_echelon,
    coordinate_parametrization,
    integer_kernel,
    integer_solution,
    modular_solution,
    torsion_factors,
)


class TestColumnEchelon:
    """Test column Hermite reduction."""

    def test_transform_is_unimodular(self):
        """Test A U = H with det U = +-1."""
        a = Matrix([[4, 0, 0, -4, 3], [0, -5, 4, 0, -2], [0, -3, 7, 0, 0]])
        h, u, pivots = column_echelon(a)
        assert a * u == h
        assert abs(u.det()) == 1
        assert len(pivots) == 3

    def test_kernel_is_saturated(self):
        """Test the kernel of (2, 4) is generated by (-2, 1)."""
        kernel = integer_kernel(Matrix([[2, 4]]))
        assert kernel.shape == (2, 1)
        assert Matrix([[2, 4]]) * kernel == Matrix([[0]])
        assert abs(kernel[1, 0]) == 1

    def test_coprime_row_reduces_to_gcd(self):
        """Test a coprime row (6, 10, 15) reduces to a single pivot 1."""
        h, u, pivots = column_echelon(Matrix([[6, 10, 15]]))
        assert pivots == [(0, 0)]
        assert h[0, 0] == 1
        assert h[0, 1] == h[0, 2] == 0
        assert abs(u.det()) == 1


class TestSolutions:
    """Test particular solutions over Z and Z/3."""

    def test_integer_solution(self):
        """Test a solvable integer system."""
        a = Matrix([[1, 1, 0], [0, 1, 1]])
        e = integer_solution(a, [1, -1])
        assert a * e == Matrix([1, -1])

    def test_integer_infeasible(self):
        """Test 2e = 1 has no integer solution."""
        with pytest.raises(Infeasible):
            integer_solution(Matrix([[2]]), [1])

    def test_integer_inconsistent(self):
        """Test contradictory rows raise Infeasible."""
        with pytest.raises(Infeasible):
            integer_solution(Matrix([[1], [1]]), [1, 2])

    def test_modular_solution(self):
        """Test 2e = 1 is solvable modulo 3."""
        e = modular_solution(Matrix([[2]]), [1])
        assert e[0] == 2

    def test_modular_inconsistent(self):
        """Test contradictory congruences raise Infeasible."""
        with pytest.raises(Infeasible):
            modular_solution(Matrix([[1], [1]]), [0, 1])


class TestCoordinateParametrization:
    """Test re-choosing generators as coordinates."""

    def test_coordinates_become_generators(self):
        """Test selected coordinates equal single generators."""
        # e = (t1, t1 + t2, t2): coordinates 0 and 1 can be free.
        kernel = Matrix([[1, 0], [1, 1], [0, 1]])
        offset = Matrix([2, 3, 1])
        k, off, selected = coordinate_parametrization(kernel, offset)
        assert sorted(selected) == [0, 1]
        for coord, gen in selected.items():
            assert off[coord] == 0
            row = list(k.row(coord))
            assert row[gen] == 1 and sum(abs(x) for x in row) == 1
        assert off[2] == 0
        assert list(k.row(2)) in ([-1, 1], [1, -1])

    def test_non_unit_coordinate_skipped(self):
        """Test a coordinate with gcd 2 is not selected."""
        kernel = Matrix([[2], [1]])
        k, off, selected = coordinate_parametrization(kernel, Matrix([0, 0]))
        assert selected == {1: 0}
        assert abs(k[0, 0]) == 2


class TestTorsion:
    """Test invariant factor detection."""

    def test_saturated(self):
        """Test a unimodular-equivalent matrix has no torsion."""
        assert torsion_factors(Matrix([[1, 1, 0], [0, 1, 1]])) == []

    def test_square_constraint(self):
        """Test q^2 = 1 style rows report the factor 2."""
        assert torsion_factors(Matrix([[2, 0], [0, 1]])) == [2]

    def test_empty(self):
        """Test an empty system."""
        assert torsion_factors(Matrix.zeros(0, 3)) == []
