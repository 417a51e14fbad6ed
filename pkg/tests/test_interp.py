import random

import pytest
from hypothesis import given

from gen import families, rand_invertible_family, rand_poly
from quatherm.chains import ChainFamily, SphericalChain
from quatherm.interp import (InterpolationProblem, kernel_basis, reduce_congruence, solve,
                             solve_right, verify)
from quatherm.qpoly import QPolynomial, rho
from quatherm.scalar import Quaternion

one, i, j, k = (Quaternion(1, 0, 0, 0), Quaternion(0, 1, 0, 0),
                Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1))
z = QPolynomial.z()


def test_two_nodes_interpolate_z():
    sol = solve(InterpolationProblem(ChainFamily([[i], [j]]), [[i], [j]]))
    assert sol.solvable and sol.particular == z and sol.modulus == z ** 2 + 1


def test_polynomial_targets_on_three_equivalent_nodes():
    fam = ChainFamily([[i], [j], [k]])
    f0 = z ** 2 + z
    sol = solve(InterpolationProblem.from_polynomial(fam, f0))
    assert sol.solvable and sol.particular.degree < 2
    assert sol.particular == z - 1
    assert verify(InterpolationProblem.from_polynomial(fam, f0), sol.particular)["all_match"]


def test_inconsistent_targets():
    sol = solve(InterpolationProblem(ChainFamily([[i], [j], [k]]), [[1], [1], [0]]))
    assert not sol.solvable
    assert sol.rank_report == (2, 3)
    with pytest.raises(ValueError):
        sol.general(z)


def test_reduce_congruence_examples():
    assert reduce_congruence([i, j], z) == (i, one)
    r = Quaternion(2)
    assert reduce_congruence([r, r], z) == (r, one)
    assert reduce_congruence([i, j, k], QPolynomial([k])) == (k, 0, 0)


def test_reduce_congruence_degree_guard():
    # z^2 on a repeated real node gives value and derivative, but is not a reduced remainder
    r = Quaternion(2)
    from quatherm.divdiff import divided_difference_left
    assert divided_difference_left([r, r], z ** 2).values == (r * r, 2 * r)
    with pytest.raises(ValueError):
        reduce_congruence([r, r], z ** 2)
    with pytest.raises(ValueError):
        reduce_congruence([i, j], z ** 2)


def test_perturbation_is_reported():
    fam = ChainFamily([[i, j], [Quaternion(2)]])
    prob = InterpolationProblem.from_polynomial(fam, z ** 3 + z)
    sol = solve(prob)
    rep = verify(prob, sol.particular + rho(Quaternion(5)))
    assert not rep["all_match"] and rep["mismatches"]


def test_kernel_examples():
    rep = kernel_basis(ChainFamily([[i], [j]]), 3)
    assert rep["modulus"] == z ** 2 + 1 and rep["dimension"] == 1
    assert rep["consistent"] and rep["basis_in_kernel"]
    assert kernel_basis(ChainFamily([[i, j], [i, k]]), 3)["elimination_nullity"] == 0
    assert kernel_basis(ChainFamily([[i, j], [i, k]]), 2)["dimension"] == 0


@given(families())
def test_kernel_dimension_matches_elimination(fam):
    for m in (1, 3, 7):
        assert kernel_basis(fam, m)["consistent"]


@pytest.mark.parametrize("seed", range(25))
def test_round_trip(seed):
    rng = random.Random(seed)
    fam = rand_invertible_family(rng)
    n = fam.total_length
    f = rand_poly(rng, n - 1)
    sol = solve(InterpolationProblem.from_polynomial(fam, f))
    assert sol.method == "square" and sol.particular == f


@given(families())
def test_polynomial_targets_always_solvable(fam):
    rng = random.Random(len(fam))
    f = rand_poly(rng, rng.randint(0, 6))
    prob = InterpolationProblem.from_polynomial(fam, f)
    sol = solve(prob)
    assert sol.solvable and verify(prob, sol.particular)["all_match"]
    g = sol.general(rand_poly(rng, 2))
    assert verify(prob, g)["all_match"]


@given(families())
def test_right_problems(fam):
    rng = random.Random(fam.total_length)
    from quatherm.divdiff import divided_difference_right
    f = rand_poly(rng, 4)
    prob = InterpolationProblem(fam, [divided_difference_right(c, f).values for c in fam.chains])
    sol = solve_right(prob)
    assert sol.solvable and verify(prob, sol.particular, side="right")["all_match"]
    assert verify(prob, sol.general(rand_poly(rng, 1)), side="right")["all_match"]


def test_float_solve():
    fam = ChainFamily([[i, j], [-i]]).to_backend("float")
    f = QPolynomial([one, i, k]).to_backend("float")
    prob = InterpolationProblem.from_polynomial(fam, f)
    sol = solve(prob)
    rep = verify(prob, sol.particular)
    assert rep["all_match"] and rep["max_deviation"] < 1e-12


def test_problem_shape_checks():
    with pytest.raises(ValueError):
        InterpolationProblem(ChainFamily([[i, j]]), [[1]])
    with pytest.raises(ValueError):
        InterpolationProblem(ChainFamily([[i]]), [[1], [2]])
