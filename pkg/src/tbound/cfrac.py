"""Hirzebruch-Jung continued fractions and T-singularity parameters."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt
from typing import Sequence

Chain = tuple[int, ...]


def validate_chain(chain: Sequence[int]) -> Chain:
    """Return ``chain`` as a tuple, rejecting empty words and entries below 2."""
    word = tuple(int(b) for b in chain)
    if not word:
        raise ValueError("a chain needs at least one entry")
    if any(b < 2 for b in word):
        raise ValueError(f"chain entries must be >= 2, got {list(word)}")
    return word


def hj_expand(m: int, q: int) -> Chain:
    """Expand m/q = b1 - 1/(b2 - 1/(...)) with the ceiling-greedy rule."""
    if not 0 < q < m or gcd(m, q) != 1:
        raise ValueError(f"need 0 < q < m coprime, got m={m}, q={q}")
    out = []
    num, den = m, q
    while den:
        b = -(-num // den)
        out.append(b)
        num, den = den, b * den - num
    return tuple(out)


def hj_evaluate(chain: Sequence[int]) -> tuple[int, int]:
    """Evaluate a chain to the coprime pair (m, q) with m/q = [b1, ..., br]."""
    word = validate_chain(chain)
    # numerators and denominators stay coprime: each step has determinant 1
    num, den = word[-1], 1
    for b in reversed(word[:-1]):
        num, den = b * num - den, num
    return num, den


@dataclass(frozen=True)
class TParams:
    """Parameters of m/q = d n^2 / (d n a - 1)."""

    d: int
    n: int
    a: int

    @property
    def m(self) -> int:
        return self.d * self.n * self.n

    @property
    def q(self) -> int:
        return self.d * self.n * self.a - 1


def all_t_params(m: int, q: int) -> list[TParams]:
    """Every (d, n, a) presenting m/q as a T-singularity, sorted by d.

    d n divides both m = d n^2 and q + 1 = d n a, so it is enough to try the
    divisors e of gcd(m, q + 1), with n = m / e and d = e / n.
    """
    g = gcd(m, q + 1)
    found = []
    for e in _divisors(g):
        n = m // e
        if n < 2 or e % n:
            continue
        d = e // n
        a = (q + 1) // e
        if 0 < a < n and gcd(n, a) == 1:
            found.append(TParams(d, n, a))
    found.sort(key=lambda p: p.d)
    return found


def _divisors(g: int) -> list[int]:
    small = [k for k in range(1, isqrt(g) + 1) if g % k == 0]
    return sorted(set(small + [g // k for k in small]))


def t_params_from_fraction(m: int, q: int) -> TParams | None:
    """The T-parameters of m/q, or None when it is not of that form."""
    if not 0 < q < m or gcd(m, q) != 1:
        return None
    found = all_t_params(m, q)
    return found[0] if found else None
