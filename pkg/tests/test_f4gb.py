import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import oracle
from modgb import systems
from modgb.f4gb import (
    PLAIN,
    RECORD,
    REPLAY,
    CriticalPair,
    EmptyQueue,
    GBState,
    ReplayMismatch,
    _append,
    _closure,
    build_matrix,
    echelonize,
    gbasis_modp,
    normal_forms,
    reduce_batch,
    select_batch,
    symbolic_preprocess,
    update,
)
from modgb.monomial import key_from_exponents
from modgb.poly import GF, Polynomial, heap_divide, map_mod, spoly

P = 32003


def poly(d, nvars=2, p=P):
    return Polynomial.from_dict(d, nvars, GF(p))


def k(*e):
    return key_from_exponents(e)


def modp_system(name, n, p):
    return [map_mod(g, p)[0] for g in systems.by_name(name, n).integer_generators()]


def to_oracle(basis):
    return [oracle.as_sorted_terms(f.to_dict()) for f in basis]


# ---------------------------------------------------------------------------
# pair management


def test_update_coprime_pair_discarded():
    st_ = GBState(P, 2)
    update(st_, poly({(1, 0): 1, (0, 0): 1}))
    update(st_, poly({(0, 1): 1, (0, 0): 2}))
    assert st_.pairs == []


def test_update_chain_criterion():
    st_ = GBState(P, 2)
    update(st_, poly({(2, 0): 1, (0, 0): 1}))
    update(st_, poly({(1, 1): 1, (0, 0): 3}))
    assert [pr.ids for pr in st_.pairs] == [(0, 1)]
    update(st_, poly({(0, 2): 1, (0, 0): 5}))
    ids = {pr.ids for pr in st_.pairs}
    assert (0, 2) not in ids
    assert ids == {(0, 1), (1, 2)}


def test_update_marks_dead():
    st_ = GBState(P, 2)
    update(st_, poly({(2, 0): 1, (0, 1): 1}))
    update(st_, poly({(1, 0): 1, (0, 0): 1}))
    assert st_.alive == [False, True]


def test_update_requires_monic():
    with pytest.raises(ValueError):
        update(GBState(P, 2), poly({(1, 0): 2}))


def test_select_batch():
    st_ = GBState(P, 2)
    st_.pairs = [CriticalPair(4, k(2, 2), 0, 3), CriticalPair(3, k(2, 1), 0, 1), CriticalPair(3, k(1, 2), 1, 2)]
    batch = select_batch(st_)
    assert [pr.degree for pr in batch] == [3, 3]
    assert batch == sorted(batch)
    assert [pr.degree for pr in st_.pairs] == [4]
    assert select_batch(st_) == [CriticalPair(4, k(2, 2), 0, 3)]
    with pytest.raises(EmptyQueue):
        select_batch(st_)


# ---------------------------------------------------------------------------
# symbolic preprocessing and matrices


def test_symbolic_preprocess_example():
    st_ = GBState(P, 2)
    f = poly({(2, 0): 1, (0, 1): 1})
    g = poly({(1, 1): 1, (0, 0): 1})
    update(st_, f)
    update(st_, g)
    batch = select_batch(st_)
    layout = symbolic_preprocess(batch, st_, PLAIN)
    assert set(layout.monomials) == {k(0, 2), k(1, 0)}
    assert layout.reductors == []
    assert set(layout.remainder) == {k(0, 2), k(1, 0)}
    assert symbolic_preprocess([], st_, PLAIN).monomials == []


def test_build_matrix_sharing_and_order():
    st_ = GBState(P, 2)
    _append(st_, poly({(1, 1): 1, (0, 0): 1}))
    layout = _closure({k(2, 1), k(1, 2)}, st_)
    m = build_matrix(layout, st_, P)
    assert len(m) == 2
    assert m.coeffs[0] is m.coeffs[1]
    assert list(m.coeffs[0]) == [1]
    assert layout.monomials[m.leads[0]] == k(2, 1)
    empty = build_matrix(_closure({k(0, 0)}, st_), st_, P)
    assert len(empty) == 0


def test_reduce_batch_trivial_cases():
    st_ = GBState(P, 2)
    g = poly({(1, 1): 1, (0, 0): 1})
    _append(st_, g)
    irreducible = poly({(0, 2): 3, (1, 0): 5})
    row_equal = g.shift(k(1, 0))
    layout = _closure(set(irreducible.monos) | set(row_equal.monos), st_)
    m = build_matrix(layout, st_, P)
    dense = reduce_batch([irreducible, row_equal], m, layout, P)
    col = layout.columns
    expect = np.zeros(len(layout.monomials), dtype=np.int64)
    for mono, c in zip(irreducible.monos, irreducible.coeffs):
        expect[col[mono]] = c
    assert np.array_equal(dense[0], expect)
    assert not dense[1].any()


term_dict = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2), st.integers(0, 2)),
    st.integers(1, 100),
    min_size=1,
    max_size=5,
)


@settings(max_examples=80, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(term_dict, min_size=1, max_size=4), st.lists(term_dict, min_size=1, max_size=4))
def test_reduce_batch_matches_heap_divide(basis_terms, targets):
    p = 101
    basis = [poly(d, 4, p).monic() for d in basis_terms if poly(d, 4, p)]
    fs = [poly(d, 4, p) for d in targets]
    if not basis:
        return
    expected = [heap_divide(f, basis).remainder for f in fs]
    assert normal_forms(fs, basis, p) == expected


def test_echelonize_examples():
    out, zero = echelonize(np.array([[1, 2], [2, 4]]), [k(1, 0), k(0, 1)], 7, nvars=2)
    assert out == [poly({(1, 0): 1, (0, 1): 2}, p=7)]
    assert zero == [1]
    out, zero = echelonize(np.zeros((3, 2), dtype=np.int64), [k(1, 0), k(0, 1)], 7, nvars=2)
    assert out == [] and zero == [0, 1, 2]


def _naive_rank(rows, p):
    A = [list(r) for r in rows]
    rank = 0
    for c in range(len(A[0])):
        piv = next((i for i in range(rank, len(A)) if A[i][c] % p), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [x * inv % p for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank, A[:rank]


@pytest.mark.parametrize("keep_order", [True, False])
def test_echelonize_random_against_naive(keep_order):
    rng = np.random.default_rng(7)
    monos = [k(2, 0, 0), k(1, 1, 0), k(0, 1, 1), k(0, 0, 1), k(0, 0, 0)]
    for _ in range(50):
        n = int(rng.integers(1, 5))
        rows = rng.integers(0, 7, size=(n, len(monos)))
        rows[rng.random(rows.shape) < 0.4] = 0
        out, zero = echelonize(rows.copy(), monos, 7, keep_order=keep_order, nvars=3)
        rank, ref = _naive_rank(rows.tolist(), 7)
        assert len(out) == rank and len(zero) == n - rank
        got = [[dict(zip(f.monos, f.coeffs)).get(m, 0) for m in monos] for f in out]
        assert got == ref


def test_echelonize_full_rank_identity():
    rows = np.array([[1, 2, 3], [0, 1, 4], [2, 0, 1]])
    rank, _ = _naive_rank(rows.tolist(), 7)
    assert rank == 3
    out, zero = echelonize(rows, [k(2), k(1), k(0)], 7, nvars=1)
    assert [f.coeffs for f in out] == [(1,), (1,), (1,)]
    assert zero == []


def test_echelonize_keep_order_zero_rows_are_later_dependents():
    rows = np.array([[1, 1, 0], [0, 1, 1], [1, 2, 1], [0, 0, 1]])
    _, zero = echelonize(rows, [k(2), k(1), k(0)], 7, keep_order=True, nvars=1)
    assert zero == [2]


# ---------------------------------------------------------------------------
# whole runs


def test_cyclic3_mod7():
    basis = gbasis_modp(modp_system("cyclic", 3, 7), 7).basis
    x, y, z = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    expected = [
        poly({(0, 0, 3): 1, (0, 0, 0): 6}, 3, 7),
        poly({(0, 2, 0): 1, (0, 1, 1): 1, (0, 0, 2): 1}, 3, 7),
        poly({x: 1, y: 1, z: 1}, 3, 7),
    ]
    assert basis == expected


def test_unit_ideal():
    res = gbasis_modp([poly({(1, 0): 1, (0, 0): 1}), poly({(0, 0): 3})], P)
    assert res.basis == [poly({(0, 0): 1})]


def test_empty_generators():
    assert gbasis_modp([], P).basis == []


@pytest.mark.parametrize("p", [7, 32003, 16777213, 536870909, 2147483647])
@pytest.mark.parametrize("name,n", [("cyclic", 4), ("katsura", 3), ("katsura", 4)])
def test_matches_oracle(name, n, p):
    gens = modp_system(name, n, p)
    ours = gbasis_modp(gens, p).basis
    ref = oracle.buchberger([g.to_dict() for g in gens], oracle.ModP(p))
    assert to_oracle(ours) == [oracle.as_sorted_terms(g) for g in ref]


small_system = st.lists(
    st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
                    st.integers(0, 30), min_size=1, max_size=4),
    min_size=1, max_size=4,
)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_system, st.sampled_from([PLAIN, RECORD]))
def test_random_systems_match_oracle(system, mode):
    p = 31
    gens = [poly(d, 3, p) for d in system]
    ours = gbasis_modp(gens, p, mode).basis
    ref = oracle.buchberger([g.to_dict() for g in gens if g], oracle.ModP(p))
    assert to_oracle(ours) == [oracle.as_sorted_terms(g) for g in ref]


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _check_reduced(basis):
    """Monic, leads decreasing, no term divisible by another element's lead."""
    nv = basis[0].nvars
    leads = [f.lead_exponents() for f in basis]
    assert all(f.lc == 1 for f in basis)
    assert [f.lm for f in basis] == sorted((f.lm for f in basis), reverse=True)
    for i, f in enumerate(basis):
        for t, m in enumerate(f.monos):
            e = Polynomial(nv, f.domain, [m], [1]).lead_exponents()
            for j, l in enumerate(leads):
                if j == i and t == 0:
                    continue
                assert not _divides(l, e)


def test_reduced_and_gb_property_cyclic5():
    p = 536870909
    gens = modp_system("cyclic", 5, p)
    basis = gbasis_modp(gens, p).basis
    _check_reduced(basis)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            assert not heap_divide(spoly(basis[i], basis[j]), basis).remainder
    for g in gens:
        assert not heap_divide(g.monic(), basis).remainder


# ---------------------------------------------------------------------------
# learning


@pytest.mark.parametrize("name,n", [("cyclic", 5), ("katsura", 5)])
def test_replay_equals_plain(name, n):
    rec = gbasis_modp(modp_system(name, n, 2147483647), 2147483647, RECORD)
    assert rec.trace.frozen and rec.trace.zero_pair_count > 0
    for p in [536870909, 536870879, 536870869]:
        gens = modp_system(name, n, p)
        plain = gbasis_modp(gens, p, PLAIN)
        replay = gbasis_modp(gens, p, REPLAY, rec.trace)
        assert replay.basis == plain.basis
        assert replay.stats.pairs_reduced < rec.stats.pairs_reduced
        assert replay.stats.pairs_skipped == rec.trace.zero_pair_count


def test_replay_layout_is_identical():
    p = 2147483647
    rec = gbasis_modp(modp_system("cyclic", 4, p), p, RECORD)
    st_ = GBState(536870909, 4)
    for g in modp_system("cyclic", 4, 536870909):
        update(st_, g.monic())
    batch = select_batch(st_)
    layout = symbolic_preprocess(batch, st_, REPLAY, rec.trace)
    assert layout is rec.trace.iterations[0].layout


def test_replay_mismatch_on_different_system():
    p = 2147483647
    rec = gbasis_modp(modp_system("cyclic", 4, p), p, RECORD)
    with pytest.raises(ReplayMismatch):
        gbasis_modp(modp_system("katsura", 3, 536870909), 536870909, REPLAY, rec.trace)


def test_replay_mismatch_on_structural_change():
    # x^2 - a*y, x*y - 1 with a = 0 mod the second prime changes the run
    p1, p2 = 101, 7
    gens1 = [poly({(2, 0): 1, (0, 1): 100}, p=p1), poly({(1, 1): 1, (0, 0): 100}, p=p1),
             poly({(0, 3): 1, (1, 0): 14}, p=p1)]
    gens2 = [poly({(2, 0): 1, (0, 1): 6}, p=p2), poly({(1, 1): 1, (0, 0): 6}, p=p2),
             poly({(0, 3): 1}, p=p2)]
    rec = gbasis_modp(gens1, p1, RECORD)
    with pytest.raises(ReplayMismatch):
        gbasis_modp(gens2, p2, REPLAY, rec.trace)


def test_trace_is_immutable():
    rec = gbasis_modp(modp_system("cyclic", 3, P), P, RECORD)
    with pytest.raises(RuntimeError):
        rec.trace.append(rec.trace.iterations[0])


def test_replay_needs_trace():
    with pytest.raises(ValueError):
        gbasis_modp(modp_system("cyclic", 3, P), P, REPLAY)
