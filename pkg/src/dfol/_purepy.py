"""Reference implementations of the enumeration kernels.

Preorders are given as row bitmasks: bit j of ``rows[i]`` is set iff i <= j.
"""

from __future__ import annotations


def is_preorder(rows: tuple[int, ...]) -> bool:
    n = len(rows)
    for i in range(n):
        if not (rows[i] >> i) & 1:
            return False
        r = rows[i]
        for j in range(n):
            # i <= j implies everything above j is above i
            if (r >> j) & 1 and rows[j] & ~r:
                return False
    return True


def enumerate_preorders(n: int) -> list[tuple[int, ...]]:
    """All preorders on n labelled points.

    Off-diagonal pairs (i, j), i != j, are numbered in row-major order and
    pattern bit k (least significant first) decides pair k.
    """
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for pattern in range(1 << len(pairs)):
        rows = [1 << i for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if (pattern >> k) & 1:
                rows[i] |= 1 << j
        t = tuple(rows)
        if is_preorder(t):
            out.append(t)
    return out


def monotone_maps(dom: tuple[int, ...], cod: tuple[int, ...], limit: int = -1) -> list[tuple[int, ...]]:
    """All monotone maps dom -> cod in lexicographic order of their tables."""
    n, m = len(dom), len(cod)
    out: list[tuple[int, ...]] = []
    table = [0] * n

    def ok(i: int, v: int) -> bool:
        for k in range(i):
            w = table[k]
            if (dom[k] >> i) & 1 and not (cod[w] >> v) & 1:
                return False
            if (dom[i] >> k) & 1 and not (cod[v] >> w) & 1:
                return False
        return True

    def go(i: int) -> bool:
        if i == n:
            out.append(tuple(table))
            return limit < 0 or len(out) <= limit
        for v in range(m):
            if ok(i, v):
                table[i] = v
                if not go(i + 1):
                    return False
        return True

    go(0)
    return out
