"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import random
import time
from fractions import Fraction

from gen import (BASES, SMALL_BASES, rand_chain, rand_equivalent, rand_family,
                 rand_invertible_family, rand_nonzero_q, rand_poly, rand_q)
from quatherm.chains import (ChainFamily, SphericalChain, chain_to_poly, glcd, kappa, lrcm,
                             lrcm_closed_form, prefix_len)
from quatherm.divdiff import (check_representation, closed_form_equivalent,
                              closed_form_nonequivalent, divided_difference_left, rep_matrices,
                              rep_matrices_equal_length)
from quatherm.interp import InterpolationProblem, solve, verify
from quatherm.qmatrix import QMatrix
from quatherm.qpoly import QPolynomial, product, rho
from quatherm.scalar import Quaternion, equivalent
from quatherm.series import (gram_comparison, gram_factorization_check, gram_matrix,
                             minimal_norm_solve, orthogonality_check)
from quatherm.vandermonde import build_left, build_right, invertibility_check, stein_residual

one, i, j, k = (Quaternion(1, 0, 0, 0), Quaternion(0, 1, 0, 0),
                Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1))
z = QPolynomial.z()
NONREAL = [b for b in BASES if not b.is_real()]


def report(n, title, ok, detail, start):
    status = "PASS" if ok else "FAIL"
    print(f"\n[{status}] criterion {n:2d}: {title} ({detail}; {time.perf_counter() - start:.1f}s)")
    assert ok, detail


def three_equivalent(rng):
    base = rng.choice(NONREAL)
    nodes = [base]
    while len(nodes) < 3:
        a = rand_equivalent(rng, base)
        if a not in nodes:
            nodes.append(a)
    return nodes


def test_criterion_01_vandermonde_rank():
    start = time.perf_counter()
    rng = random.Random(101)
    bad = []
    for t in range(200):
        fam = rand_family(rng, max_chains=5, max_len=4, max_classes=3)
        m = rng.randint(1, 12)
        got, want = build_left(fam, m).matrix.rank(), min(m, kappa(fam))
        if got != want:
            bad.append((t, got, want))
    singular = build_left(ChainFamily([[i], [j], [k]]), 3).matrix.rank()
    report(1, "elimination rank equals min(m, kappa)", not bad and singular == 2,
           f"200 families, {len(bad)} mismatches, (i),(j),(k) rank {singular}", start)


def test_criterion_02_stein_characterization():
    start = time.perf_counter()
    rng = random.Random(202)
    nonzero, witnessed = 0, 0
    for _ in range(100):
        c = rand_chain(rng, rng.choice(BASES), rng.randint(1, 4))
        m = rng.randint(1, 10)
        v = build_left([c], m).matrix
        if not stein_residual(v, [c]).is_zero():
            nonzero += 1
        rows = [list(r) for r in v.rows]
        r, col = rng.randrange(v.nrows), rng.randrange(v.ncols)
        rows[r][col] = rows[r][col] + rand_nonzero_q(rng)
        if not stein_residual(QMatrix(rows, m), [c]).is_zero():
            witnessed += 1
    report(2, "Stein residual zero, perturbations detected", nonzero == 0 and witnessed == 100,
           f"100 chains, {nonzero} nonzero residuals, {witnessed}/100 perturbations caught", start)


def test_criterion_03_duality():
    start = time.perf_counter()
    rng = random.Random(303)
    bad = 0
    for _ in range(100):
        fam = rand_family(rng, max_chains=5, max_len=4, max_classes=3)
        m = rng.randint(1, 12)
        if build_left(fam, m).matrix != build_right(fam.conj(), m).matrix.H:
            bad += 1
    left = build_left([[i, j]], 4).matrix
    plain = left != build_right([[i, j]], 4).matrix.T
    report(3, "left matrix is adjoint of right matrix on conjugate nodes", bad == 0 and plain,
           f"100 families, {bad} mismatches, plain transpose differs: {plain}", start)


def test_criterion_04_round_trip():
    start = time.perf_counter()
    rng = random.Random(404)
    recovered, kept = 0, []
    for t in range(200):
        fam = rand_invertible_family(rng, max_chains=4, max_len=3)
        n = fam.total_length
        f = rand_poly(rng, rng.randint(0, n - 1))
        prob = InterpolationProblem.from_polynomial(fam, f)
        sol = solve(prob)
        if sol.solvable and sol.particular == f:
            recovered += 1
        if t < 100:
            kept.append((prob, sol, n))
    general_ok = 0
    for prob, sol, n in kept:
        h = rand_poly(rng, rng.randint(0, 3))
        g = sol.general(h)
        if verify(prob, g)["all_match"] and g.degree >= n:
            general_ok += 1
    report(4, "solve recovers f; particular + G h interpolates with degree >= N",
           recovered == 200 and general_ok == 100,
           f"{recovered}/200 recovered, {general_ok}/100 general solutions", start)


def test_criterion_05_consistency_law():
    start = time.perf_counter()
    rng = random.Random(505)
    rejected, accepted, oracle_ok = 0, 0, 0
    for _ in range(100):
        a1, a2, a3 = three_equivalent(rng)
        fam = ChainFamily([[a1], [a2], [a3]])
        inv = (a1 - a2).inverse()
        A, B = (a3 - a2) * inv, (a1 - a3) * inv
        t1, t2 = rand_q(rng), rand_q(rng)
        t3 = A * t1 + B * t2 + rand_nonzero_q(rng)
        if not solve(InterpolationProblem(fam, [[t1], [t2], [t3]])).solvable:
            rejected += 1
        f = rand_poly(rng, rng.randint(0, 5))
        prob = InterpolationProblem.from_polynomial(fam, f)
        sol = solve(prob)
        if sol.solvable and verify(prob, sol.particular)["all_match"]:
            accepted += 1
        v1, v2, v3 = (f.eval_left(a) for a in (a1, a2, a3))
        if v3 == A * v1 + B * v2:
            oracle_ok += 1
    report(5, "three equivalent nodes: violating targets rejected, polynomial targets accepted",
           rejected == 100 and accepted == 100 and oracle_ok == 100,
           f"{rejected}/100 rejected, {accepted}/100 accepted, relation held {oracle_ok}/100", start)


def _triple(rng, equal):
    base = rng.choice(NONREAL)
    pool = [base] + [rand_equivalent(rng, base) for _ in range(3)]
    k1 = rng.randint(1, 4) if not equal else rng.randint(1, 3)
    a1 = rand_chain(rng, base, k1, pool)
    while True:
        a2 = rand_chain(rng, base, k1 if equal else rng.randint(1, k1), pool)
        if a2.nodes[0] != a1.nodes[0]:
            break
    a3 = rand_chain(rng, base, k1 if equal else rng.randint(1, len(a2)), pool)
    return a1, a2, a3


def test_criterion_06_representation_formulas():
    start = time.perf_counter()
    rng = random.Random(606)
    agree, identity, general = 0, 0, 0
    for _ in range(50):
        a1, a2, a3 = _triple(rng, equal=True)
        rep = rep_matrices(a1, a2, a3)
        closed = rep_matrices_equal_length(a1, a2, a3)
        if (rep.A, rep.B) == (closed.A, closed.B):
            agree += 1
        fs = [rand_poly(rng, rng.randint(0, 8)) for _ in range(20)]
        if all(check_representation(rep, f).is_zero() and check_representation(closed, f).is_zero()
               for f in fs):
            identity += 1
        b1, b2, b3 = _triple(rng, equal=False)
        grep = rep_matrices(b1, b2, b3)
        if all(check_representation(grep, rand_poly(rng, rng.randint(0, 8))).is_zero()
               for _ in range(20)):
            general += 1
    k1 = 0
    for _ in range(20):
        a1, a2, a3 = three_equivalent(rng)
        rep = rep_matrices([a1], [a2], [a3])
        inv = (a1 - a2).inverse()
        if rep.A[0, 0] == (a3 - a2) * inv and rep.B[0, 0] == (a1 - a3) * inv:
            k1 += 1
    # double nodes at i and j with target chain (i, j); the lower right entry of A is
    # (j - conj j)^-1 (j - conj i), the value the identity forces
    rep = rep_matrices([i, i], [j, j], [i, j])
    want_a = QMatrix([[1, 0], [(j.conj() - j).inverse(), (j - j.conj()).inverse() * (j - i.conj())]])
    want_b = QMatrix([[0, 0], [(j - j.conj()).inverse(), 0]])
    worked = rep.A == want_a and rep.B == want_b
    ok = agree == identity == general == 50 and k1 == 20 and worked
    report(6, "representation matrices: two constructions, identity, single-node and worked cases",
           ok, f"agree {agree}/50, identity {identity}/50 x20 f, general {general}/50 x20 f, "
               f"single-node {k1}/20, worked example {worked}", start)


def test_criterion_07_closed_forms():
    start = time.perf_counter()
    rng = random.Random(707)
    non, eq = 0, 0
    for _ in range(200):
        while True:
            a1, a2 = rand_q(rng), rand_q(rng)
            if not equivalent(a1, a2) and not (a2 - a1.conj()).is_zero():
                break
        f = rand_poly(rng, rng.randint(0, 6))
        if closed_form_nonequivalent(a1, a2, f) == divided_difference_left([a1, a2], f).values[1]:
            non += 1
    for _ in range(200):
        base = rng.choice(NONREAL)
        while True:
            a1, a2 = rand_equivalent(rng, base), rand_equivalent(rng, base)
            if a2 != a1.conj():
                break
        f = rand_poly(rng, rng.randint(0, 6))
        if closed_form_equivalent(a1, a2, f) == divided_difference_left([a1, a2], f).values[1]:
            eq += 1
    worked = closed_form_equivalent(i, j, z ** 2) == i + j
    report(7, "two-node closed forms match the definition", non == 200 and eq == 200 and worked,
           f"non-equivalent {non}/200, equivalent {eq}/200, [i,j;z^2]=i+j {worked}", start)


def test_criterion_08_glcd_lrcm():
    start = time.perf_counter()
    rng = random.Random(808)
    prefix_ok, closed_ok, degree_ok = 0, 0, 0
    for _ in range(100):
        base = rng.choice(BASES)
        pool = [base] + [rand_equivalent(rng, base) for _ in range(2)]
        a = rand_chain(rng, base, rng.randint(1, 4), pool)
        cut = rng.randint(0, len(a))
        tail = rand_chain(rng, base, rng.randint(1, 4), pool).nodes
        nodes = list(a.nodes[:cut])
        for x in tail:
            if not nodes or x != nodes[-1].conj():
                nodes.append(x)
        b = SphericalChain(nodes[:4])
        pa, pb = chain_to_poly(a), chain_to_poly(b)
        d, h = glcd(pa, pb), lrcm(pa, pb)
        nu = prefix_len(a, b)
        if d == product(rho(x) for x in a.nodes[:nu]):
            prefix_ok += 1
        if h == lrcm_closed_form([a, b]):
            closed_ok += 1
        if pa.degree + pb.degree == d.degree + h.degree:
            degree_ok += 1
    generic = 0
    for _ in range(100):
        f = rand_poly(rng, rng.randint(1, 3))
        g = rand_poly(rng, rng.randint(1, 3))
        if f.is_zero() or g.is_zero():
            f, g = f + z, g + z
        if f.degree + g.degree == glcd(f, g).degree + lrcm(f, g).degree:
            generic += 1
    ok = prefix_ok == closed_ok == degree_ok == 100 and generic == 100
    report(8, "glcd is the shared prefix, lrcm has the closed form, degrees add up", ok,
           f"prefix {prefix_ok}/100, closed form {closed_ok}/100, degree identity "
           f"{degree_ok}/100 chains + {generic}/100 arbitrary pairs", start)


def test_criterion_09_gram():
    start = time.perf_counter()
    rng = random.Random(909)
    within, rank_ok, fact_ok = 0, 0, 0
    for _ in range(50):
        fam = rand_family(rng, max_chains=4, max_len=3, bases=SMALL_BASES, max_classes=3)
        assert all(a.norm2() <= Fraction(49, 100) for a in fam.nodes())
        if gram_comparison(fam, 64)["within_bound"]:
            within += 1
        if gram_matrix(fam).matrix.rank() == kappa(fam):
            rank_ok += 1
        if gram_factorization_check(fam, 40)["within_bound"]:
            fact_ok += 1
    singular = gram_matrix([[i / 2], [j / 2], [k / 2]]).matrix.rank()
    ok = within == rank_ok == fact_ok == 50 and singular == 2
    report(9, "Stein Gram vs truncated sum, rank equals kappa, factorization residual", ok,
           f"within bound {within}/50, rank {rank_ok}/50, factorization {fact_ok}/50, "
           f"(i/2),(j/2),(k/2) rank {singular}", start)


def test_criterion_10_minimal_norm():
    start = time.perf_counter()
    rng = random.Random(1010)
    exact_ok, float_ok, minimal, orthogonal, problems = 0, 0, 0, 0, 0
    worst_float = 0.0
    while problems < 20:
        fam = rand_invertible_family(rng, max_chains=3, max_len=2, bases=SMALL_BASES)
        problems += 1
        prob = InterpolationProblem.from_polynomial(fam, rand_poly(rng, rng.randint(0, 4)))
        sol = minimal_norm_solve(prob, order=64)
        trunc = sol.f_min.norm2_truncated()
        gap = sol.norm_sq - trunc
        if sol.extra["cstar_d"] == sol.extra["dstar_p_d"] and 0 <= gap <= sol.f_min.tail_bound:
            exact_ok += 1
        fprob = InterpolationProblem(fam.to_backend("float"),
                                     [[t.to_backend("float") for t in ts] for ts in prob.targets])
        fsol = minimal_norm_solve(fprob)
        dev = abs(fsol.norm_sq - fsol.f_min.norm2_truncated())
        worst_float = max(worst_float, dev)
        if dev <= 1e-10:
            float_ok += 1
        part = solve(prob)
        for _ in range(5):
            p = part.general(rand_poly(rng, rng.randint(0, 3)))
            if sol.norm_sq <= p.norm2():
                minimal += 1
        val, bound = orthogonality_check(sol, rand_poly(rng, rng.randint(0, 3)))
        if val.norm2() <= bound ** 2:
            orthogonal += 1
    ok = exact_ok == float_ok == orthogonal == 20 and minimal == 100
    report(10, "minimal norm: quadratic form, minimality over samples, orthogonality", ok,
           f"exact {exact_ok}/20, float {float_ok}/20 (max gap {worst_float:.1e}), "
           f"minimal vs {minimal}/100 alternatives, orthogonal {orthogonal}/20", start)
