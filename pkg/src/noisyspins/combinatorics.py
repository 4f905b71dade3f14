"""Exact integer sequences governing spectral multiplicities.

Catalan numbers count total-spin-zero states of 2N spin-1/2s; Riordan
numbers count total-spin-zero states of n spin-1s, which is also the
zero-mode multiplicity of the collective Liouvillian at equal detunings.
All arithmetic is exact (Python integers); these values feed hard
equality assertions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MultiplicityTable:
    """Multiplicities of total spin S in the n-fold product of spin-1s."""

    n: int
    by_spin: dict[int, int]

    def dimension(self) -> int:
        return sum((2 * S + 1) * m for S, m in self.by_spin.items())


def catalan(N: int) -> int:
    """C_N = binom(2N, N) / (N + 1), exactly."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    return math.comb(2 * N, N) // (N + 1)


def riordan(n: int) -> int:
    """R_n = sum_m (-1)^(n-m) binom(n, m) C_m, exactly."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return sum((-1) ** (n - m) * math.comb(n, m) * catalan(m) for m in range(n + 1))


def spin1_multiplicities(n: int) -> MultiplicityTable:
    """Total-spin content of n coupled spin-1s.

    Built from the triangle rule: adding one spin-1 sends S to
    S-1, S, S+1, except that S=0 only couples to S=1.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    table = {1: 1}
    for _ in range(n - 1):
        new: dict[int, int] = {}
        for S, m in table.items():
            for T in (S - 1, S, S + 1):
                if T < 0:
                    continue
                if S == 0 and T == 0:
                    continue
                new[T] = new.get(T, 0) + m
        table = new
    return MultiplicityTable(n=n, by_spin=dict(sorted(table.items())))
