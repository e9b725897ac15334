"""Two-level minimization of ``v <-> phi(x_1..x_k)`` by Quine-McCluskey.

Clauses use variables ``1..k`` for the table inputs and ``k+1`` for ``v``.
Bit ``r`` of the truth table is phi on the row where ``x_{i+1} = (r >> i) & 1``.
"""

from __future__ import annotations

from functools import lru_cache

MAX_MINIMIZE_ARITY = 12
MAX_TABLE_ARITY = 16

Implicant = tuple[int, int]  # (value, dont-care mask)


def _check(k: int, tt: int) -> None:
    if not 0 <= k <= MAX_TABLE_ARITY:
        raise ValueError(f"table arity {k} outside 0..{MAX_TABLE_ARITY}")
    if tt < 0 or tt >> (1 << k):
        raise ValueError("truth table longer than 2^k bits")


def prime_implicants(k: int, tt: int) -> list[Implicant]:
    """All prime implicants of the on-set of ``tt``, sorted."""
    level: dict[int, set[int]] = {0: {r for r in range(1 << k) if (tt >> r) & 1}}
    primes: list[Implicant] = []
    while level:
        nxt: dict[int, set[int]] = {}
        for mask, values in level.items():
            used: set[int] = set()
            for val in values:
                for i in range(k):
                    bit = 1 << i
                    if mask & bit or val & bit:
                        continue
                    if val | bit in values:
                        nxt.setdefault(mask | bit, set()).add(val)
                        used.add(val)
                        used.add(val | bit)
            primes.extend((val, mask) for val in values if val not in used)
        level = nxt
    return sorted(primes)


def _covers(imp: Implicant, row: int) -> bool:
    val, mask = imp
    return (row & ~mask) == val


def cover(k: int, tt: int, primes: list[Implicant]) -> list[Implicant]:
    """Essential primes first, then greedy by most newly covered minterms."""
    minterms = {r for r in range(1 << k) if (tt >> r) & 1}
    covered_by = {r: [p for p in primes if _covers(p, r)] for r in minterms}
    chosen: list[Implicant] = []
    for r in sorted(minterms):
        if len(covered_by[r]) == 1 and covered_by[r][0] not in chosen:
            chosen.append(covered_by[r][0])
    left = {r for r in minterms if not any(_covers(p, r) for p in chosen)}
    pool = [p for p in primes if p not in chosen]
    while left:
        # most uncovered minterms, then fewest literals, then stable order
        best = max(pool, key=lambda p: (sum(1 for r in left if _covers(p, r)), bin(p[1]).count("1")))
        chosen.append(best)
        pool.remove(best)
        left = {r for r in left if not _covers(best, r)}
    return sorted(chosen)


def _clause(k: int, imp: Implicant, v_lit: int) -> tuple[int, ...]:
    val, mask = imp
    lits = [-(i + 1) if (val >> i) & 1 else i + 1 for i in range(k) if not (mask >> i) & 1]
    return tuple(lits + [v_lit])


@lru_cache(maxsize=1 << 16)
def _minimize(k: int, tt: int) -> tuple[tuple[int, ...], ...]:
    full = (1 << (1 << k)) - 1
    v = k + 1
    on = cover(k, tt, prime_implicants(k, tt))
    off = cover(k, full ^ tt, prime_implicants(k, full ^ tt))
    # term -> v for the on-set, term -> not v for the off-set
    return tuple([_clause(k, p, v) for p in on] + [_clause(k, p, -v) for p in off])


def minimize_table(k: int, tt: int) -> list[tuple[int, ...]]:
    """CNF for ``v <-> phi``; minimized up to arity 12, one clause per row above that."""
    _check(k, tt)
    if k > MAX_MINIMIZE_ARITY:
        return naive_table(k, tt)
    return list(_minimize(k, tt))


def naive_table(k: int, tt: int) -> list[tuple[int, ...]]:
    """One clause per truth-table row."""
    _check(k, tt)
    v = k + 1
    return [_clause(k, (r, 0), v if (tt >> r) & 1 else -v) for r in range(1 << k)]
