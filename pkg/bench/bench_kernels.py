"""Time the compiled kernels against the pure-Python reference.

    python bench/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

from dfol import _purepy

try:
    from dfol import _speedups
except ImportError:
    _speedups = None


def cases():
    pre3 = _purepy.enumerate_preorders(3)
    pre4 = _purepy.enumerate_preorders(4)
    chain4 = (0b1111, 0b1110, 0b1100, 0b1000)
    disc4 = (1, 2, 4, 8)
    return [
        ("enumerate preorders n=4", lambda m: m.enumerate_preorders(4)),
        ("enumerate preorders n=5", lambda m: m.enumerate_preorders(5)),
        ("transitivity check, all n=4", lambda m: [m.is_preorder(p) for p in pre4]),
        ("monotone maps 3-pre x 3-pre", lambda m: [m.monotone_maps(a, b) for a in pre3 for b in pre3]),
        ("monotone maps disc4 -> chain4", lambda m: m.monotone_maps(disc4, chain4)),
    ]


def _norm(out):
    return [tuple(x) if isinstance(x, (list, tuple)) else bool(x) for x in out]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2)
    args = ap.parse_args()
    if _speedups is None:
        print("compiled extension not built; only the Python backend is timed")
    print(f"{'kernel':34s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in cases():
        py = min(timeit.repeat(lambda: fn(_purepy), number=1, repeat=args.repeat))
        if _speedups is None:
            print(f"{name:34s} {py * 1e3:9.2f}ms")
            continue
        if _norm(fn(_speedups)) != _norm(fn(_purepy)):
            raise SystemExit(f"backends disagree on {name}")
        cy = min(timeit.repeat(lambda: fn(_speedups), number=1, repeat=args.repeat))
        print(f"{name:34s} {py * 1e3:9.2f}ms {cy * 1e3:9.2f}ms {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
