"""Exhaustive minimization over complexity-restricted effect candidates.

Every exact solver in this package reduces to the same sweep: walk all
circuits of at most r placed gates (depth-first, lexicographic), propagate a
few operators through each circuit, score all 2^n simple-effect masks from
the propagated diagonals, and keep the best candidate.  Ties break toward the
lexicographically smallest (circuit, mask) pair, which makes the result
independent of sharding.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceededError
from .gates import (
    Circuit,
    GateSet,
    enumeration_budget,
    mask_matrix,
    placed_alphabet,
)

ScoreFn = Callable[[list[np.ndarray]], np.ndarray]


@dataclass(frozen=True)
class BestCandidate:
    value: float
    ops: tuple[int, ...]
    mask_bits: int
    circuits_visited: int


def circuit_count(alphabet_size: int, r: int) -> int:
    return sum(alphabet_size ** k for k in range(r + 1))


def minimize_over_effects(
    gate_set: GateSet,
    n: int,
    r: int,
    operators: Sequence[np.ndarray],
    score_fn: ScoreFn,
    *,
    budget: int | None = None,
    threads: int = 1,
    early_stop: float | None = None,
) -> BestCandidate:
    """Minimize score_fn over all (circuit, mask) candidates.

    `score_fn` receives, per circuit, one array per input operator holding
    tr(P_m . circuit(op)) for every mask m, and returns an array of scores
    (np.inf marks infeasible masks).  `early_stop` must under-approximate the
    true minimum; reaching it ends the sweep early without changing the
    reported optimum beyond that threshold.
    """
    alphabet = placed_alphabet(gate_set, n)
    cap = enumeration_budget(budget)
    total = circuit_count(len(alphabet), r)
    if total > cap:
        raise BudgetExceededError(total, cap)
    mm = mask_matrix(n)

    def run_shard(shard_idx: int, shard_count: int) -> tuple[float, tuple[int, ...] | None, int]:
        best_val = math.inf
        best_key: tuple[tuple[int, ...], int] | None = None
        stop = False

        def consider(ops: tuple[int, ...], mats: list[np.ndarray]):
            nonlocal best_val, best_key, stop
            traces = [mm @ np.einsum("ii->i", m).real for m in mats]
            scores = score_fn(traces)
            i = int(np.argmin(scores))
            v = float(scores[i])
            if v < best_val or (v == best_val and best_key is not None and (ops, i) < best_key):
                best_val = v
                best_key = (ops, i)
                if early_stop is not None and best_val <= early_stop:
                    stop = True

        def descend(ops: tuple[int, ...], mats: list[np.ndarray]):
            if stop or len(ops) >= r:
                return
            for g in range(len(alphabet)):
                if not ops and g % shard_count != shard_idx:
                    continue
                pg = alphabet[g]
                child = [pg.apply_matrix(m) for m in mats]
                consider(ops + (g,), child)
                descend(ops + (g,), child)
                if stop:
                    return

        mats0 = [np.asarray(m, dtype=complex) for m in operators]
        if shard_idx == 0:
            consider((), mats0)
        if not stop:
            descend((), mats0)
        if best_key is None:
            return math.inf, None, total
        return best_val, best_key, total

    if threads <= 1 or not alphabet:
        val, key, _ = run_shard(0, 1)
    else:
        k = min(threads, max(len(alphabet), 1))
        with ThreadPoolExecutor(max_workers=k) as pool:
            results = list(pool.map(lambda i: run_shard(i, k), range(k)))
        val, key = math.inf, None
        for v, bk, _ in results:
            if bk is None:
                continue
            if v < val or (v == val and key is not None and bk < key):
                val, key = v, bk
    if key is None:
        raise RuntimeError("no candidate considered")
    return BestCandidate(val, key[0], key[1], total)


def candidate_circuit(gate_set: GateSet, n: int, ops: tuple[int, ...]) -> Circuit:
    alphabet = placed_alphabet(gate_set, n)
    return Circuit(n, tuple((alphabet[i].gate, alphabet[i].edge) for i in ops))
