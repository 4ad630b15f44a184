from fractions import Fraction

import pytest

import oracle
from modgb import systems, verify
from modgb.poly import QQ, Polynomial, heap_divide, spoly
from modgb.reconstruct import candidate_from_basis

DET = [verify.INTEGER, verify.MODULAR]


def true_basis(name, n):
    gens = systems.by_name(name, n).integer_generators()
    ref = oracle.buchberger([g.to_dict() for g in gens], oracle.Rationals())
    nv = gens[0].nvars
    return gens, [Polynomial.from_dict(g, nv, QQ) for g in ref]


@pytest.fixture(scope="module")
def cyclic3():
    return true_basis("cyclic", 3)


@pytest.fixture(scope="module")
def cyclic4():
    return true_basis("cyclic", 4)


@pytest.fixture(scope="module")
def katsura3():
    return true_basis("katsura", 3)


def perturb(basis, k, t, delta=1):
    """Add ``delta`` to tail coefficient ``t`` of element ``k``."""
    f = basis[k]
    coeffs = list(f.coeffs)
    coeffs[t] += delta
    out = list(basis)
    out[k] = Polynomial(f.nvars, f.domain, f.monos, coeffs)
    return out


def test_inclusion_true_basis(cyclic3):
    gens, basis = cyclic3
    cand = candidate_from_basis(basis)
    for mode in ["rational", verify.INTEGER, verify.MODULAR]:
        assert verify.check_inclusion(gens, cand, mode).accepted
    rep = verify.check_inclusion(gens, cand, verify.PROBABILISTIC, [536870909])
    assert rep.result == verify.PROBABLE


def test_inclusion_perturbed(cyclic3):
    gens, basis = cyclic3
    bad = candidate_from_basis(perturb(basis, 1, 1))
    for mode in ["rational", verify.INTEGER, verify.MODULAR]:
        assert verify.check_inclusion(gens, bad, mode).result == verify.REJECTED


def test_inclusion_unit_candidate(cyclic3):
    gens, _ = cyclic3
    one = candidate_from_basis([Polynomial.constant(1, 3, QQ)])
    for mode in DET:
        assert verify.check_inclusion(gens, one, mode).accepted


def test_probabilistic_prime_counts(cyclic4):
    _, basis = cyclic4
    cand = candidate_from_basis(basis)
    r7 = verify.check_gb_probabilistic(cand, 1e-7)
    r16 = verify.check_gb_probabilistic(cand, 1e-16)
    assert len(r7.primes) == 1 and len(r16.primes) == 2
    assert r7.bound <= Fraction(1e-7) and r16.bound <= Fraction(1e-16)
    assert r7.result == r16.result == verify.PROBABLE


def test_probabilistic_rejects_perturbation(cyclic4):
    _, basis = cyclic4
    bad = candidate_from_basis(perturb(basis, 2, 1))
    assert verify.check_gb_probabilistic(bad, 1e-7).result == verify.REJECTED


def test_probabilistic_needs_positive_epsilon(cyclic4):
    with pytest.raises(ValueError):
        verify.check_gb_probabilistic(candidate_from_basis(cyclic4[1]), 0)


@pytest.mark.parametrize("which", ["cyclic3", "katsura3"])
def test_integer_certifies(which, request):
    _, basis = request.getfixturevalue(which)
    rep = verify.check_gb_deterministic_integer(candidate_from_basis(basis))
    assert rep.result == verify.CERTIFIED


def test_integer_rejects_deletion(katsura3):
    _, basis = katsura3
    missing = candidate_from_basis(basis[:2] + basis[3:])
    assert verify.check_gb_deterministic_integer(missing).result == verify.REJECTED


def test_modular_cyclic3_all_leads_coprime(cyclic3):
    _, basis = cyclic3
    rep = verify.check_gb_deterministic_modular(candidate_from_basis(basis))
    assert rep.result == verify.CERTIFIED
    assert rep.pairs_checked == 0 and rep.primes == []


def test_modular_certifies_and_matches_division(katsura3):
    _, basis = katsura3
    cand = candidate_from_basis(basis)
    rep = verify.check_gb_deterministic_modular(cand)
    assert rep.result == verify.CERTIFIED and rep.primes and rep.pairs_checked
    G = cand.integer_basis
    for i, j in verify.critical_pairs(G):
        s = spoly(G[i], G[j])
        # the modular route certifies exactly the identities that division over Q exhibits
        res = heap_divide(s.change_domain(QQ), [g.change_domain(QQ) for g in G])
        assert not res.remainder
        total = Polynomial.zero(G[0].nvars, QQ)
        for q, g in zip(res.quotients, G):
            total = total + q * g.change_domain(QQ)
        assert total == s.change_domain(QQ)


def test_modular_zero_spoly_trivial():
    rep = verify.CheckReport(verify.MODULAR, verify.CERTIFIED)
    assert verify._zero_reduction_certified(Polynomial.zero(2, QQ), [], rep)
    assert rep.primes == []


def test_modular_and_integer_agree_katsura4():
    gens, basis = true_basis("katsura", 4)
    cand = candidate_from_basis(basis)
    a = verify.certify(gens, cand, verify.INTEGER)
    b = verify.certify(gens, cand, verify.MODULAR)
    assert a.result == b.result == verify.CERTIFIED
    assert b.primes and b.pairs_checked == a.pairs_checked


def test_quotient_bound_is_rigorous():
    # s = 3x*y - 3 over basis [x*y - 1] with quotient 3
    s = Polynomial.from_dict({(1, 1): 3, (0, 0): -3}, 2, QQ)
    g = Polynomial.from_dict({(1, 1): 1, (0, 0): -1}, 2, QQ)
    q = Polynomial.from_dict({(0, 0): Fraction(3)}, 2, QQ)
    # |L*s| = 3, |L*q|_1 * |g|_inf = 3
    assert verify.quotient_bound(s, [q], [g]) == 6


@pytest.mark.parametrize("mode", DET)
def test_certify_rejects_perturbations_and_deletions(cyclic4, mode):
    gens, basis = cyclic4
    for k in range(len(basis)):
        if len(basis[k]) > 1:
            rep = verify.certify(gens, candidate_from_basis(perturb(basis, k, len(basis[k]) - 1)), mode)
            assert rep.result == verify.REJECTED
        rep = verify.certify(gens, candidate_from_basis(basis[:k] + basis[k + 1:]), mode)
        assert rep.result == verify.REJECTED


def test_certify_probabilistic(cyclic4):
    gens, basis = cyclic4
    rep = verify.certify(gens, candidate_from_basis(basis), verify.PROBABILISTIC, 1e-16)
    assert rep.result == verify.PROBABLE and len(rep.primes) == 2
    with pytest.raises(ValueError):
        verify.certify(gens, candidate_from_basis(basis), "bogus")
