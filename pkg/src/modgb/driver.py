"""The multi-modular Groebner basis algorithm over Q.

1. Start with no reconstruction branches.
2. Compute the basis modulo a *learning* prime while recording a
   :class:`~modgb.f4gb.LearningTrace`.
3. Repeatedly compute bases modulo further primes (``workers`` at a time),
   replaying the trace of the leading branch.  Each result is CRT-combined
   into the branch with the same leading monomials, or opens a new branch.
4. When the candidate lifted from a branch before the newest prime agrees
   with the basis modulo that prime, check it; on success return it.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from . import arith, verify
from .f4gb import PLAIN, RECORD, REPLAY, ReplayMismatch, RunStats, gbasis_modp
from .ideal import IdealSpec
from .poly import Polynomial, map_mod, primitive_part
from .reconstruct import (
    RationalCandidate,
    ReconstructionBranch,
    absorb,
    lift_candidate,
    signature_of,
    stabilized,
)

log = logging.getLogger(__name__)


class PrimeSupplyExhausted(RuntimeError):
    pass


@dataclass
class RunConfig:
    """Options of :func:`modular_gbasis`.

    ``epsilon == 0`` asks for a certified basis (``check_mode`` ``"integer"``
    or ``"modular"``); ``epsilon > 0`` selects the probabilistic check,
    except that bases with at most ``small_basis_threshold`` elements are
    always certified.
    """

    epsilon: float = 0.0
    check_mode: Optional[str] = None
    prime_bits: int = 29
    learning_bits: int = 31
    workers: int = 1
    small_basis_threshold: int = 50
    learning: bool = True
    max_primes: int = 5000
    verbose: bool = False

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.check_mode is None:
            self.check_mode = verify.PROBABILISTIC if self.epsilon > 0 else verify.INTEGER
        if self.check_mode not in verify.MODES:
            raise ValueError(f"check mode must be one of {verify.MODES}")
        if self.epsilon == 0 and self.check_mode == verify.PROBABILISTIC:
            raise ValueError("epsilon = 0 requires a deterministic check mode")
        if self.epsilon > 0 and self.check_mode != verify.PROBABILISTIC:
            raise ValueError("epsilon > 0 requires the probabilistic check mode")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        arith.class_top(self.prime_bits)
        arith.class_top(self.learning_bits)

    @property
    def deterministic_mode(self) -> str:
        return self.check_mode if self.check_mode != verify.PROBABILISTIC else verify.INTEGER


@dataclass
class PrimeRun:
    p: int
    mode: str
    stats: RunStats
    branch: int = -1
    replay_failed: bool = False


@dataclass
class Statistics:
    learning_prime: int = 0
    runs: List[PrimeRun] = field(default_factory=list)
    skipped_primes: List[int] = field(default_factory=list)
    branches_opened: int = 0
    checks: int = 0
    seconds: float = 0.0

    @property
    def primes(self) -> List[int]:
        return [r.p for r in self.runs]

    def summary(self) -> str:
        lines = [f"learning prime {self.learning_prime}",
                 f"{len(self.runs)} primes, {len(self.skipped_primes)} skipped, "
                 f"{self.branches_opened} branches, {self.checks} checks, {self.seconds:.2f}s"]
        for r in self.runs:
            s = r.stats
            big = max(s.matrices, default=(0, 0, 0))
            lines.append(
                f"  p={r.p} {r.mode}{' (replay failed)' if r.replay_failed else ''}: "
                f"{s.iterations} iterations, {s.pairs_reduced} pairs reduced, "
                f"{s.zero_pairs} zero, {s.pairs_skipped} skipped, largest matrix "
                f"{big[0]}+{big[1]} x {big[2]}"
            )
        return "\n".join(lines)


def _modp_run(gens_Z, p, trace) -> Tuple[object, str, bool]:
    images = [map_mod(g, p)[0] for g in gens_Z]
    if trace is None:
        return gbasis_modp(images, p, RECORD), RECORD, False
    try:
        return gbasis_modp(images, p, REPLAY, trace), REPLAY, False
    except ReplayMismatch as exc:
        log.info("replay failed modulo %d (%s); rerunning plain", p, exc)
        return gbasis_modp(images, p, PLAIN), PLAIN, True


def _lucky_for_input(gens_Z, p) -> bool:
    return not any(map_mod(g, p)[1] for g in gens_Z)


def _prime_stream(bits: int, exclude) -> Iterator[int]:
    for p in arith.primes_below(arith.class_top(bits)):
        if p not in exclude:
            yield p


def _check(gens_Z, cand: RationalCandidate, config: RunConfig, used) -> verify.CheckReport:
    if config.epsilon > 0 and len(cand.basis) > config.small_basis_threshold:
        primes = (p for p in verify.default_primes() if p not in used)
        return verify.certify(gens_Z, cand, verify.PROBABILISTIC, config.epsilon, primes)
    return verify.certify(gens_Z, cand, config.deterministic_mode)


def modular_gbasis(
    ideal: IdealSpec, config: Optional[RunConfig] = None
) -> Tuple[List[Polynomial], verify.CheckReport, Statistics]:
    """Reduced Groebner basis of ``ideal`` over Q (monic, leads decreasing)."""
    config = config or RunConfig()
    t0 = time.perf_counter()
    stats = Statistics()
    gens_Z = ideal.integer_generators()
    if not gens_Z:
        return [], verify.CheckReport(config.deterministic_mode, verify.CERTIFIED), stats

    branches: List[ReconstructionBranch] = []
    used = set()
    rejected = set()  # (signature, modulus) pairs whose candidate failed the check

    learning = _prime_stream(config.learning_bits, used)
    p0 = next(p for p in learning if _lucky_for_input(gens_Z, p))
    stats.learning_prime = p0
    working = _prime_stream(config.prime_bits, used)

    def next_primes(k):
        out = []
        for p in working:
            if p in used:
                continue
            if not _lucky_for_input(gens_Z, p):
                stats.skipped_primes.append(p)
                continue
            out.append(p)
            if len(out) == k:
                break
        return out

    def handle(p, result, mode, replay_failed):
        used.add(p)
        run = PrimeRun(p, mode, result.stats, replay_failed=replay_failed)
        stats.runs.append(run)
        basis = result.basis
        sig = signature_of(basis)
        branch = next((b for b in branches if b.signature == sig), None)
        previous = None
        if branch is not None:
            if branch.candidate_modulus != branch.modulus:
                branch.candidate = lift_candidate(branch)
                branch.candidate_modulus = branch.modulus
            previous = branch.candidate
        stable = stabilized(branch, previous, basis, p)
        before = len(branches)
        _, idx = absorb(branches, basis, p)
        stats.branches_opened += len(branches) > before
        if idx >= 0:
            run.branch = idx
            if result.trace is not None and branches[idx].trace is None:
                branches[idx].trace = result.trace
        if stable and (sig, previous.modulus) not in rejected:
            stats.checks += 1
            report = _check(gens_Z, previous, config, used)
            log.info("check of %d-element candidate: %s", len(previous.basis), report.result)
            if report.accepted:
                return previous, report
            rejected.add((sig, previous.modulus))
        return None

    # learning prime
    res, mode, failed = _modp_run(gens_Z, p0, None) if config.learning else (
        gbasis_modp([map_mod(g, p0)[0] for g in gens_Z], p0, PLAIN), PLAIN, False)
    done = handle(p0, res, mode, failed)

    pool = ThreadPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        while done is None:
            if len(used) >= config.max_primes:
                raise PrimeSupplyExhausted(f"no certified basis after {len(used)} primes")
            batch = next_primes(config.workers)
            if not batch:
                raise PrimeSupplyExhausted("ran out of primes")
            trace = None
            if config.learning and branches:
                lead = max(branches, key=lambda b: b.prime_count)
                trace = lead.trace
            if pool is None:
                results = [_modp_run(gens_Z, p, trace) for p in batch]
            else:
                results = list(pool.map(lambda p: _modp_run(gens_Z, p, trace), batch))
            if not config.learning:
                results = [(r, PLAIN, f) for r, _, f in results]
            for p, (result, mode, failed) in zip(batch, results):
                done = handle(p, result, mode, failed)
                if done is not None:
                    break
    finally:
        if pool is not None:
            pool.shutdown()

    candidate, report = done
    stats.seconds = time.perf_counter() - t0
    if config.verbose:
        log.info("%s", stats.summary())
    return candidate.basis, report, stats


def integer_form(basis: List[Polynomial]) -> List[Polynomial]:
    """Primitive integer multiples with positive leading coefficients."""
    return [primitive_part(f) for f in basis]
