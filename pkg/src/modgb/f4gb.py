"""Groebner bases modulo a word-size prime.

Buchberger's algorithm with Gebauer-Moeller pair elimination, where every
iteration reduces all critical pairs of minimal degree at once with F4 style
linear algebra:

* symbolic preprocessing collects every monomial that can appear while
  reducing the batch, and one reductor (shifted basis element) per
  reducible monomial;
* the reductors form a sparse matrix sorted by decreasing leading monomial;
  the s-polynomials are dense rows reduced against it with delayed modular
  reduction;
* the reduced rows are put in reduced row echelon form; the non-zero rows
  join the basis.

A run can *record* a :class:`LearningTrace` (which pairs reduced to zero,
which monomial layouts were used) and later runs modulo other primes can
*replay* it, skipping those pairs and the symbolic preprocessing.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import arith
from .arith import DenseBlock
from .monomial import (
    bits_divides,
    bits_from_key,
    exponents_from_key,
    key_from_exponents,
    lcm_exponents,
)
from .poly import GF, Polynomial

log = logging.getLogger(__name__)

PLAIN = "plain"
RECORD = "record"
REPLAY = "replay"


class EmptyQueue(LookupError):
    pass


class ReplayMismatch(RuntimeError):
    """The current prime does not follow the recorded computation."""


@dataclass(frozen=True, order=True)
class CriticalPair:
    # field order gives the queue order: degree, then lcm, then indices
    degree: int
    lcm: int
    i: int
    j: int

    @property
    def ids(self) -> Tuple[int, int]:
        return (self.i, self.j)


@dataclass
class SymbolicLayout:
    monomials: List[int]
    remainder: List[int]
    reductors: List[Tuple[int, int]]  # (basis index, shift), leads descending

    @property
    def quotient_monomials(self) -> List[int]:
        return [s for _, s in self.reductors]

    @property
    def columns(self) -> Dict[int, int]:
        return {m: c for c, m in enumerate(self.monomials)}


@dataclass
class ReductorMatrix:
    leads: List[int]  # column index of each row's leading monomial
    cols: List[np.ndarray]  # tail column indices
    coeffs: List[np.ndarray]  # tail coefficients, shared between shifts
    ncols: int

    def __len__(self):
        return len(self.leads)


@dataclass(frozen=True)
class IterationRecord:
    pairs: Tuple[Tuple[int, int], ...]
    zero_pairs: frozenset
    layout: SymbolicLayout
    new_leads: Tuple[int, ...]


@dataclass
class LearningTrace:
    p: int
    generator_leads: Tuple[int, ...] = ()
    iterations: list = field(default_factory=list)
    final_layout: Optional[SymbolicLayout] = None
    frozen: bool = False

    def append(self, rec: IterationRecord) -> None:
        if self.frozen:
            raise RuntimeError("learning trace is immutable once recorded")
        self.iterations.append(rec)

    def freeze(self) -> "LearningTrace":
        self.iterations = tuple(self.iterations)
        self.frozen = True
        return self

    @property
    def zero_pair_count(self) -> int:
        return sum(len(r.zero_pairs) for r in self.iterations)


@dataclass
class RunStats:
    p: int
    mode: str
    iterations: int = 0
    pairs_reduced: int = 0
    zero_pairs: int = 0
    pairs_skipped: int = 0
    matrices: list = field(default_factory=list)  # (reductor rows, spoly rows, columns)


@dataclass
class GBResult:
    basis: List[Polynomial]
    trace: Optional[LearningTrace]
    stats: RunStats


# ---------------------------------------------------------------------------
# state


class GBState:
    def __init__(self, p: int, nvars: int):
        self.p = p
        self.nvars = nvars
        self.basis: List[Polynomial] = []
        self.alive: List[bool] = []
        self.pairs: List[CriticalPair] = []
        self.iteration = 0
        self.lead_bits: List[int] = []
        self.lead_exps: List[tuple] = []
        self.tail_coeffs: List[np.ndarray] = []
        self._reducer_cache: Dict[int, Tuple[int, int]] = {}

    def alive_indices(self) -> List[int]:
        return [i for i, a in enumerate(self.alive) if a]

    def find_reducer(self, m: int) -> int:
        """Index of the first alive element whose lead divides ``m``, or -1."""
        hit = self._reducer_cache.get(m)
        n = len(self.basis)
        if hit is not None:
            idx, scanned = hit
            if idx >= 0:
                if self.alive[idx]:
                    return idx
                start = 0
            else:
                start = scanned
        else:
            start = 0
        mb = bits_from_key(m)
        lead_bits, alive = self.lead_bits, self.alive
        found = -1
        for i in range(start, n):
            if alive[i] and bits_divides(lead_bits[i], mb):
                found = i
                break
        self._reducer_cache[m] = (found, n)
        return found


def _append(state: GBState, h: Polynomial) -> int:
    state.basis.append(h)
    state.alive.append(True)
    state.lead_bits.append(bits_from_key(h.lm))
    state.lead_exps.append(exponents_from_key(h.lm, state.nvars))
    state.tail_coeffs.append(np.array(h.coeffs[1:], dtype=np.int64))
    return len(state.basis) - 1


def update(state: GBState, candidate: Polynomial) -> GBState:
    """Insert a monic ``candidate`` and refresh the critical pairs.

    New pairs are dropped by Buchberger's coprime criterion and the
    Gebauer-Moeller chain criteria; old pairs whose lcm is a proper multiple
    of the new lead are dropped; alive elements whose lead is divisible by
    the new lead are marked dead.
    """
    if not candidate or candidate.lc != 1:
        raise ValueError("update expects a non-zero monic polynomial")
    h = _append(state, candidate)
    he = state.lead_exps[h]
    hb = state.lead_bits[h]
    hdeg = sum(he)
    exps = state.lead_exps

    new = []  # [g, lcm bits, lcm key, lcm degree, coprime]
    for g in range(h):
        if not state.alive[g]:
            continue
        le = lcm_exponents(exps[g], he)
        deg = sum(le)
        key = key_from_exponents(le)
        new.append([g, bits_from_key(key), key, deg, deg == hdeg + sum(exps[g])])

    # chain criterion among the new pairs
    kept = []
    for pos, item in enumerate(new):
        if item[4]:
            kept.append(item)
            continue
        lb = item[1]
        if any(bits_divides(o[1], lb) for o in new[pos + 1:]) or any(
            bits_divides(o[1], lb) for o in kept
        ):
            continue
        kept.append(item)

    # chain criterion on old pairs
    lcm_with_h = {}

    def lcm_key_with_h(g):
        k = lcm_with_h.get(g)
        if k is None:
            k = key_from_exponents(lcm_exponents(exps[g], he))
            lcm_with_h[g] = k
        return k

    survivors = []
    for pr in state.pairs:
        if bits_divides(hb, bits_from_key(pr.lcm)):
            if lcm_key_with_h(pr.i) != pr.lcm and lcm_key_with_h(pr.j) != pr.lcm:
                continue
        survivors.append(pr)
    for g, _, key, deg, coprime in kept:
        if not coprime:
            survivors.append(CriticalPair(deg, key, g, h))
    state.pairs = survivors

    for g in range(h):
        if state.alive[g] and bits_divides(hb, state.lead_bits[g]):
            state.alive[g] = False
    return state


def select_batch(state: GBState) -> List[CriticalPair]:
    """Remove and return every pair of minimal degree, in queue order."""
    if not state.pairs:
        raise EmptyQueue("no critical pairs left")
    dmin = min(pr.degree for pr in state.pairs)
    batch = sorted(pr for pr in state.pairs if pr.degree == dmin)
    state.pairs = [pr for pr in state.pairs if pr.degree != dmin]
    return batch


# ---------------------------------------------------------------------------
# symbolic preprocessing and matrices


def _closure(start, state: GBState, reducers=None) -> SymbolicLayout:
    """Close a set of monomials under reduction by the basis leads.

    ``reducers`` restricts the candidate reductors (default: alive elements
    through :meth:`GBState.find_reducer`).
    """
    seen = set(start)
    heap = [-m for m in seen]
    heapq.heapify(heap)
    monomials, remainder, reductors = [], [], []
    basis = state.basis
    if reducers is not None:
        rb = [(i, state.lead_bits[i]) for i in reducers]
    while heap:
        m = -heapq.heappop(heap)
        monomials.append(m)
        if reducers is None:
            g = state.find_reducer(m)
        else:
            mb = bits_from_key(m)
            g = next((i for i, b in rb if bits_divides(b, mb)), -1)
        if g < 0:
            remainder.append(m)
            continue
        shift = m - basis[g].lm
        reductors.append((g, shift))
        for t in basis[g].monos[1:]:
            k = t + shift
            if k not in seen:
                seen.add(k)
                heapq.heappush(heap, -k)
    return SymbolicLayout(monomials, remainder, reductors)


def _spoly_monomials(pr: CriticalPair, state: GBState):
    gi, gj = state.basis[pr.i], state.basis[pr.j]
    si, sj = pr.lcm - gi.lm, pr.lcm - gj.lm
    out = {m + si for m in gi.monos[1:]}
    out.update(m + sj for m in gj.monos[1:])
    return out


def symbolic_preprocess(
    batch: Sequence[CriticalPair],
    state: GBState,
    mode: str = PLAIN,
    trace: Optional[LearningTrace] = None,
) -> SymbolicLayout:
    if mode == REPLAY:
        try:
            layout = trace.iterations[state.iteration].layout
        except (AttributeError, IndexError):
            raise ReplayMismatch(f"no recorded layout for iteration {state.iteration}")
        n = len(state.basis)
        for g, _ in layout.reductors:
            if g >= n or not state.alive[g]:
                raise ReplayMismatch(f"recorded reductor {g} is not an alive basis element")
        return layout
    start = set()
    for pr in batch:
        start |= _spoly_monomials(pr, state)
    return _closure(start, state)


def build_matrix(layout: SymbolicLayout, state: GBState, p: int) -> ReductorMatrix:
    col = layout.columns
    leads, cols, coeffs = [], [], []
    # reductors are produced in decreasing lead order by the closure
    for g, shift in layout.reductors:
        elt = state.basis[g]
        leads.append(col[elt.lm + shift])
        cols.append(np.fromiter((col[m + shift] for m in elt.monos[1:]), dtype=np.intp,
                                count=len(elt.monos) - 1))
        coeffs.append(state.tail_coeffs[g])
    return ReductorMatrix(leads, cols, coeffs, len(layout.monomials))


def reduce_batch(
    spolys: Sequence[Polynomial], matrix: ReductorMatrix, layout: SymbolicLayout, p: int
) -> np.ndarray:
    """Reduce the s-polynomials against the reductor rows.

    Returns an ``len(spolys) x len(layout.monomials)`` array of canonical
    residues.  Columns of reductor leads are zero on output.
    """
    col = layout.columns
    block = DenseBlock(p, matrix.ncols, len(spolys))
    for r, s in enumerate(spolys):
        idx = [col[m] for m in s.monos]
        block.lo[idx, r] = s.coeffs
    for lead, cols, coeffs in zip(matrix.leads, matrix.cols, matrix.coeffs):
        f = block.column(lead)
        if not f.any():
            continue
        if len(cols):
            block.submul(cols, coeffs, f)
        block.clear(lead)
    return block.reduced().T


def echelonize(
    rows: np.ndarray, monomials: Sequence[int], p: int, keep_order: bool = True,
    nvars: int = 0,
) -> Tuple[List[Polynomial], List[int]]:
    """Reduced row echelon form of ``rows`` modulo ``p``.

    Returns the non-zero rows as monic polynomials (leading monomials
    decreasing) and the indices of the input rows that became zero.  With
    ``keep_order`` the pivot for a column is the first available row, so a
    row becomes zero exactly when it lies in the span of the rows before
    it; otherwise the sparsest candidate row is used.
    """
    nrows = rows.shape[0]
    if nrows == 0:
        return [], []
    nz = np.flatnonzero(rows.any(axis=0))
    A = np.ascontiguousarray(rows[:, nz]) % p
    used = np.zeros(nrows, dtype=bool)
    pivots = []
    ncols = A.shape[1]
    for c in range(ncols):
        mask = A[:, c] != 0
        cand = np.flatnonzero(mask & ~used)
        if not cand.size:
            continue
        if keep_order or cand.size == 1:
            r = int(cand[0])
        else:
            r = int(cand[np.argmin(np.count_nonzero(A[cand, c:], axis=1))])
        piv = A[r, c:]
        inv = arith.inv(int(piv[0]), p)
        if inv != 1:
            piv[:] = piv * inv % p
        mask[r] = False
        others = np.flatnonzero(mask)
        if others.size:
            sub = A[others, c:]
            A[others, c:] = (sub - np.multiply.outer(sub[:, 0], piv)) % p
        used[r] = True
        pivots.append(r)
    dom = GF(p)
    mono_arr = np.asarray(monomials, dtype=object)[nz]
    out = []
    for r in pivots:
        pos = np.flatnonzero(A[r])
        out.append(Polynomial(nvars, dom, mono_arr[pos].tolist(), A[r, pos].tolist()))
    zero = [i for i in range(nrows) if not used[i]]
    return out, zero


# ---------------------------------------------------------------------------
# main loop


def _spoly_modp(pr: CriticalPair, state: GBState) -> Polynomial:
    p = state.p
    gi, gj = state.basis[pr.i], state.basis[pr.j]
    si, sj = pr.lcm - gi.lm, pr.lcm - gj.lm
    acc = {}
    for m, c in zip(gi.monos[1:], gi.coeffs[1:]):
        acc[m + si] = c
    for m, c in zip(gj.monos[1:], gj.coeffs[1:]):
        k = m + sj
        acc[k] = (acc.get(k, 0) - c) % p
    monos = sorted((m for m, c in acc.items() if c), reverse=True)
    return Polynomial(state.nvars, GF(p), monos, [acc[m] for m in monos])


def _minimal_alive(state: GBState) -> List[int]:
    alive = state.alive_indices()
    keep = []
    for i in alive:
        bi = state.lead_bits[i]
        if any(
            bits_divides(state.lead_bits[j], bi)
            and (state.lead_bits[j] != bi or j < i)
            for j in alive
            if j != i
        ):
            continue
        keep.append(i)
    return keep


def _interreduce(state: GBState, mode: str, trace: Optional[LearningTrace]) -> List[Polynomial]:
    keep = _minimal_alive(state)
    p = state.p
    tails = [
        Polynomial(state.nvars, GF(p), state.basis[i].monos[1:], state.basis[i].coeffs[1:])
        for i in keep
    ]
    if mode == REPLAY:
        layout = trace.final_layout
        if layout is None:
            raise ReplayMismatch("no recorded final layout")
        n = len(state.basis)
        if any(g >= n or g not in keep for g, _ in layout.reductors):
            raise ReplayMismatch("recorded final reductors differ")
    else:
        start = set()
        for t in tails:
            start.update(t.monos)
        layout = _closure(start, state, reducers=keep)
        if mode == RECORD:
            trace.final_layout = layout
    if layout.reductors:
        try:
            matrix = build_matrix(layout, state, p)
            dense = reduce_batch(tails, matrix, layout, p)
        except KeyError as exc:
            raise ReplayMismatch("monomial outside the recorded final layout") from exc
        mono_arr = np.asarray(layout.monomials, dtype=object)
        out = []
        for i, row in zip(keep, dense):
            pos = np.flatnonzero(row)
            lead = state.basis[i]
            out.append(Polynomial(state.nvars, GF(p), (lead.lm,) + tuple(mono_arr[pos]),
                                  (1,) + tuple(row[pos].tolist())))
    else:
        out = [state.basis[i] for i in keep]
    out.sort(key=lambda f: f.lm, reverse=True)
    return out


def gbasis_modp(
    generators: Sequence[Polynomial],
    p: int,
    mode: str = PLAIN,
    trace: Optional[LearningTrace] = None,
) -> GBResult:
    """Reduced monic Groebner basis of ``generators`` modulo ``p``.

    ``mode`` is ``"plain"``, ``"record"`` (returns a fresh trace) or
    ``"replay"`` (follows ``trace``, raising :class:`ReplayMismatch` when the
    computation diverges from it).
    """
    if mode not in (PLAIN, RECORD, REPLAY):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == REPLAY and trace is None:
        raise ValueError("replay mode needs a trace")
    nvars = generators[0].nvars if generators else 0
    dom = GF(p)
    gens = []
    for g in generators:
        if g.domain != dom:
            g = g.change_domain(dom)
        if g:
            gens.append(g.monic())

    state = GBState(p, nvars)
    stats = RunStats(p, mode)
    lead_sig = tuple(g.lm for g in gens)
    if mode == RECORD:
        trace = LearningTrace(p, lead_sig)
    elif mode == REPLAY and trace.generator_leads != lead_sig:
        raise ReplayMismatch("generator leading monomials differ from the recorded run")

    for g in gens:
        update(state, g)

    while state.pairs:
        batch = select_batch(state)
        ids = tuple(pr.ids for pr in batch)
        if mode == REPLAY:
            if state.iteration >= len(trace.iterations):
                raise ReplayMismatch("more iterations than recorded")
            rec = trace.iterations[state.iteration]
            if rec.pairs != ids:
                raise ReplayMismatch(f"pair batch differs at iteration {state.iteration}")
            todo = [pr for pr in batch if pr.ids not in rec.zero_pairs]
            stats.pairs_skipped += len(batch) - len(todo)
        else:
            todo = batch
        layout = symbolic_preprocess(batch, state, mode, trace)
        spolys = [_spoly_modp(pr, state) for pr in todo]
        try:
            matrix = build_matrix(layout, state, p)
            dense = reduce_batch(spolys, matrix, layout, p)
        except KeyError as exc:
            # only a reused layout can miss a monomial
            raise ReplayMismatch(f"monomial outside the recorded layout at iteration "
                                 f"{state.iteration}") from exc
        new, zero_rows = echelonize(
            dense, layout.monomials, p, keep_order=mode != PLAIN, nvars=nvars
        )
        stats.pairs_reduced += len(todo)
        stats.zero_pairs += len(zero_rows)
        stats.matrices.append((len(matrix), len(todo), len(layout.monomials)))
        new_leads = tuple(h.lm for h in new)
        if mode == RECORD:
            trace.append(
                IterationRecord(ids, frozenset(todo[r].ids for r in zero_rows), layout, new_leads)
            )
        elif mode == REPLAY and new_leads != rec.new_leads:
            raise ReplayMismatch(f"new leading monomials differ at iteration {state.iteration}")
        for h in new:
            update(state, h)
        state.iteration += 1
        log.debug(
            "p=%d it=%d pairs=%d zero=%d matrix=%dx%d new=%d",
            p, state.iteration, len(todo), len(zero_rows), len(matrix), len(layout.monomials),
            len(new),
        )

    if mode == REPLAY and state.iteration != len(trace.iterations):
        raise ReplayMismatch("fewer iterations than recorded")
    stats.iterations = state.iteration
    basis = _interreduce(state, mode, trace)
    if mode == RECORD:
        trace.freeze()
    return GBResult(basis, trace if mode != PLAIN else None, stats)


def normal_forms(
    polys: Sequence[Polynomial], basis: Sequence[Polynomial], p: int, chunk: int = 256
) -> List[Polynomial]:
    """Fully reduce each of ``polys`` modulo ``basis`` (all over GF(p)).

    The basis need not be a Groebner basis; each monomial is reduced by the
    first element whose lead divides it.  Polynomials are processed in chunks
    of ``chunk`` dense rows.
    """
    if not polys:
        return []
    nvars = polys[0].nvars
    dom = GF(p)
    state = GBState(p, nvars)
    for g in basis:
        if g.domain != dom:
            g = g.change_domain(dom)
        _append(state, g.monic())
    out = []
    for lo in range(0, len(polys), chunk):
        part = [f if f.domain == dom else f.change_domain(dom) for f in polys[lo:lo + chunk]]
        start = set()
        for f in part:
            start.update(f.monos)
        layout = _closure(start, state)
        matrix = build_matrix(layout, state, p)
        dense = reduce_batch(part, matrix, layout, p)
        mono_arr = np.asarray(layout.monomials, dtype=object)
        for row in dense:
            pos = np.flatnonzero(row)
            out.append(Polynomial(nvars, dom, mono_arr[pos].tolist(), row[pos].tolist()))
    return out
