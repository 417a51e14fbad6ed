import random

import pytest
from hypothesis import given

from gen import BASES, chains, families, rand_chain, rand_equivalent
from quatherm.chains import (ChainFamily, ConjugateAdjacency, EmptyChain, EquivalenceBroken,
                             MixedClassError, SphericalChain, chain_to_poly, glcd, kappa,
                             kappa_report, lrcm, lrcm_closed_form, lrcm_family, mu_of_class,
                             prefix_len, validate)
from quatherm.qpoly import QPolynomial, divide_left, product, rho
from quatherm.scalar import Quaternion

one, i, j, k = (Quaternion(1, 0, 0, 0), Quaternion(0, 1, 0, 0),
                Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1))
z = QPolynomial.z()


def test_validate_examples():
    assert len(validate([i, j, k])) == 3
    with pytest.raises(EmptyChain):
        validate([])
    with pytest.raises(EquivalenceBroken) as err:
        validate([i, 2 * j])
    assert err.value.index == 1
    with pytest.raises(ConjugateAdjacency) as err:
        validate([j, i, -i])
    assert str(err.value) == "ConjugateAdjacency(2)"


def test_repeated_real_node_is_a_chain():
    c = SphericalChain([Quaternion(3), Quaternion(3)])
    assert chain_to_poly(c) == rho(Quaternion(3)) ** 2


def test_chain_polynomial_example():
    assert chain_to_poly([i, j]) == z ** 2 - z * QPolynomial([i + j]) + QPolynomial([k])


def test_glcd_examples():
    assert glcd(chain_to_poly([i, j]), chain_to_poly([i, k])) == rho(i)
    assert glcd(chain_to_poly([i]), chain_to_poly([j])) == QPolynomial([1])


def test_lrcm_examples():
    assert lrcm(rho(i), rho(j)) == z ** 2 + 1
    two = Quaternion(2)
    assert lrcm(rho(i), rho(two)) == rho(i) * rho(two)
    assert lrcm_family([rho(i), rho(j), rho(k)]) == z ** 2 + 1
    assert lrcm_family([chain_to_poly([i, j]), chain_to_poly([i, k])]).degree == 3


def test_mu_and_kappa_examples():
    assert mu_of_class([SphericalChain([i, j])]) == 2
    assert mu_of_class([SphericalChain([i]), SphericalChain([j]), SphericalChain([k])]) == 2
    assert mu_of_class([SphericalChain([i, j]), SphericalChain([i, k])]) == 3
    assert kappa(ChainFamily([[i], [j], [k]])) == 2
    assert kappa(ChainFamily([[i, j], [i, k], [Quaternion(3)]])) == 4
    with pytest.raises(MixedClassError):
        mu_of_class([SphericalChain([i]), SphericalChain([Quaternion(3)])])


def test_kappa_report_breakdown():
    rep = kappa_report(ChainFamily([[i, j], [i, k], [Quaternion(3)]]))
    assert rep["kappa"] == 4 and rep["consistent"]
    assert sorted(c["mu"] for c in rep["classes"]) == [1, 3]


@given(chains())
def test_chain_polynomial_vanishes_at_first_node(c):
    p = chain_to_poly(c)
    assert p.eval_left(c.nodes[0]) == 0
    assert p.eval_right(c.nodes[-1]) == 0
    assert p.is_monic() and p.degree == len(c)


@given(chains())
def test_conjugate_chain_is_a_chain(c):
    assert len(c.conj()) == len(c)
    # conjugating coefficients reverses the factor order
    reversed_conj = SphericalChain([a.conj() for a in reversed(c.nodes)])
    assert chain_to_poly(reversed_conj) == chain_to_poly(c).conj_sharp()


def _same_class_pair(seed):
    rng = random.Random(seed)
    base = rng.choice(BASES)
    pool = [base] + [rand_equivalent(rng, base) for _ in range(2)]
    a = rand_chain(rng, base, rng.randint(1, 4), pool)
    if rng.random() < 0.5:
        cut = rng.randint(0, len(a))
        tail = [x for x in rand_chain(rng, base, 3, pool).nodes]
        nodes = list(a.nodes[:cut])
        for x in tail:
            if nodes and x == nodes[-1].conj():
                continue
            nodes.append(x)
        b = SphericalChain(nodes[:4])
    else:
        b = rand_chain(rng, base, rng.randint(1, 4), pool)
    return a, b


@pytest.mark.parametrize("seed", range(40))
def test_glcd_is_prefix_product(seed):
    a, b = _same_class_pair(seed)
    nu = prefix_len(a, b)
    assert glcd(chain_to_poly(a), chain_to_poly(b)) == product(rho(x) for x in a.nodes[:nu])


@pytest.mark.parametrize("seed", range(40))
def test_lrcm_closed_form_and_degrees(seed):
    a, b = _same_class_pair(seed)
    pa, pb = chain_to_poly(a), chain_to_poly(b)
    h = lrcm(pa, pb)
    d = glcd(pa, pb)
    assert h == lrcm_closed_form([a, b])
    assert pa.degree + pb.degree == d.degree + h.degree
    # h lies in both right ideals
    assert divide_left(h, pa)[1].is_zero() and divide_left(h, pb)[1].is_zero()
    # d divides both on the left
    assert divide_left(pa, d)[1].is_zero() and divide_left(pb, d)[1].is_zero()


@given(families())
def test_kappa_is_lrcm_degree(fam):
    assert kappa_report(fam)["consistent"]


def test_float_chain_validation():
    c = SphericalChain([i.to_backend("float"), Quaternion(0, 0.6, 0.8 + 1e-15, 0)])
    assert len(c) == 2
    fam = ChainFamily([[Quaternion(0, 0.6, 0.8, 0)], [Quaternion(0, 0.8, 0.6, 0)]])
    assert kappa(fam) == 2
