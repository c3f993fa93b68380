"""Recognition, discrepancies and enumeration of T-chains.

A T-chain is the dual graph of the minimal resolution of a cyclic quotient
singularity 1/(d n^2)(1, d n a - 1).  Every such chain is reached from
[4] or [3, 2, ..., 2, 3] by repeatedly growing on the left or the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal, Sequence

from .cfrac import Chain, TParams, hj_evaluate, validate_chain

Side = Literal["left", "right"]


@dataclass(frozen=True)
class TChainData:
    """A recognised T-chain with its resolution data (positions are 1-based)."""

    chain: Chain
    params: TParams
    t_vector: tuple[int, ...]
    discrepancies: tuple[Fraction, ...]
    center: frozenset[int]
    moves: tuple[Side, ...]

    @property
    def length(self) -> int:
        return len(self.chain)

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def a(self) -> int:
        return self.params.a

    @property
    def r_minus_d(self) -> int:
        return len(self.chain) - self.params.d


def base_chain(d: int) -> Chain:
    """[4] for d = 1, otherwise [3, 2^(d-2), 3]."""
    if d < 1:
        raise ValueError("d must be positive")
    return (4,) if d == 1 else (3,) + (2,) * (d - 2) + (3,)


def grow(chain: Chain, t: tuple[int, ...], n: int, side: Side) -> tuple[Chain, tuple[int, ...], int]:
    """Apply one growth step to a chain together with its t-vector and index n."""
    if side == "left":
        return (2,) + chain[:-1] + (chain[-1] + 1,), (t[0] + t[-1],) + t, n + t[-1]
    if side == "right":
        return (chain[0] + 1,) + chain[1:] + (2,), t + (t[0] + t[-1],), n + t[0]
    raise ValueError(f"unknown side {side!r}")


def _undo(word: Chain) -> tuple[Chain, list[Side]] | None:
    """Peel growth steps off ``word`` until a base chain remains."""
    moves: list[Side] = []
    while True:
        if word == (4,) or (len(word) >= 2 and word[0] == word[-1] == 3 and all(b == 2 for b in word[1:-1])):
            moves.reverse()
            return word, moves
        if len(word) < 2:
            return None
        if word[0] == 2 and word[-1] >= 3:
            word = word[1:-1] + (word[-1] - 1,)
            moves.append("left")
        elif word[-1] == 2 and word[0] >= 3:
            word = (word[0] - 1,) + word[1:-1]
            moves.append("right")
        else:
            return None


def _build(base: Chain, moves: Sequence[Side]) -> TChainData:
    d = 1 if base == (4,) else len(base)
    word, t, n = base, (1,) * len(base), 2
    for side in moves:
        word, t, n = grow(word, t, n, side)
    m, q = hj_evaluate(word)
    if m != d * n * n or (q + 1) % (d * n):
        raise AssertionError(f"growth bookkeeping disagrees with m/q for {word}")
    params = TParams(d, n, (q + 1) // (d * n))
    delta = tuple(Fraction(ti, n) - 1 for ti in t)
    center = frozenset(i + 1 for i, ti in enumerate(t) if ti == 1)
    return TChainData(word, params, t, delta, center, tuple(moves))


def is_t_chain(chain: Sequence[int]) -> TChainData | None:
    """Recognise a T-chain; return its data or None."""
    try:
        word = validate_chain(chain)
    except ValueError:
        return None
    undone = _undo(word)
    if undone is None:
        return None
    base, moves = undone
    data = _build(base, moves)
    assert data.chain == word
    return data


def require_t_chain(chain: Sequence[int]) -> TChainData:
    data = is_t_chain(chain)
    if data is None:
        raise ValueError(f"{list(chain)} is not a T-chain")
    return data


def solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals for a nonsingular square system."""
    size = len(rhs)
    rows = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(matrix, rhs)]
    for col in range(size):
        pivot = next((i for i in range(col, size) if rows[i][col] != 0), None)
        if pivot is None:
            raise ValueError("singular system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        lead = rows[col][col]
        rows[col] = [v / lead for v in rows[col]]
        for i in range(size):
            if i != col and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[col])]
    return [rows[i][size] for i in range(size)]


def discrepancies_by_adjunction(chain: Sequence[int]) -> tuple[Fraction, ...]:
    """Discrepancies of any chain from sum_k delta_k (C_k . C_j) = b_j - 2."""
    word = validate_chain(chain)
    r = len(word)
    matrix = [[Fraction(0)] * r for _ in range(r)]
    for j, b in enumerate(word):
        matrix[j][j] = Fraction(-b)
        if j + 1 < r:
            matrix[j][j + 1] = matrix[j + 1][j] = Fraction(1)
    return tuple(solve_exact(matrix, [Fraction(b - 2) for b in word]))


def enumerate_t_chains(max_r: int, max_entry: int | None = None) -> list[TChainData]:
    """All T-chains of length <= max_r (and entries <= max_entry), sorted."""
    seen: dict[Chain, TChainData] = {}
    frontier = []
    for d in range(1, max_r + 1):
        base = base_chain(d)
        if len(base) <= max_r:
            frontier.append((base, ()))
    while frontier:
        nxt = []
        for base, moves in frontier:
            data = _build(base, moves)
            if max_entry is not None and max(data.chain) > max_entry:
                # entries only grow along a branch, so prune it
                continue
            seen.setdefault(data.chain, data)
            if data.length < max_r:
                nxt.extend((base, moves + (side,)) for side in ("left", "right"))
        frontier = nxt
    return sorted(seen.values(), key=lambda c: (c.length, c.chain))


def fibonacci_index_profile(max_rd: int) -> dict[int, tuple[int, Chain]]:
    """For each value k of r - d up to max_rd, the largest index n and a witness.

    r - d equals the number of growth steps, and n depends only on those steps,
    so it suffices to grow from [4].
    """
    best: dict[int, tuple[int, Chain]] = {}
    layer = [((4,), (1,), 2)]
    for k in range(max_rd + 1):
        for word, _t, n in layer:
            if k not in best or n > best[k][0] or (n == best[k][0] and word < best[k][1]):
                best[k] = (n, word)
        if k < max_rd:
            layer = [grow(w, t, n, side) for w, t, n in layer for side in ("left", "right")]
    return best


def iter_chain_orientations(data: TChainData) -> Iterator[Chain]:
    yield data.chain
    if data.chain[::-1] != data.chain:
        yield data.chain[::-1]
