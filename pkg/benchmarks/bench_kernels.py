"""Time the numba and pure-numpy kernel variants on synthetic inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Numba timings exclude the first (compiling) call. With
PUNGEN_DISABLE_NUMBA=1 only the numpy column is measured.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pungen import _kernels as K


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(scale: float, rng: np.random.Generator):
    n_keys = int(2_000_000 * scale)
    keys = np.unique(rng.integers(0, 2**40, size=n_keys))
    values = rng.random(keys.size)
    queries = np.concatenate([rng.choice(keys, n_keys // 2), rng.integers(0, 2**40, size=n_keys // 2)])
    yield "sorted_lookup", K.numpy_sorted_lookup, K.numba_sorted_lookup, (keys, values, queries, 0.0)

    n_tok = int(500_000 * scale)
    toks = rng.integers(0, 20_000, size=n_tok).astype(np.int64)
    toks[rng.random(n_tok) < 0.05] = -1
    reduced = rng.integers(1, 6, size=n_tok)
    yield "skipgram_pairs", K.numpy_skipgram_pairs, K.numba_skipgram_pairs, (toks, reduced, 5)

    vocab, dim, n_pairs, batch = 20_000, 100, int(200_000 * scale), 16
    centers = rng.integers(0, vocab, size=n_pairs).astype(np.int64)
    contexts = rng.integers(0, vocab, size=n_pairs).astype(np.int64)
    negatives = rng.integers(0, vocab, size=(n_pairs, 5)).astype(np.int64)
    lrs = np.full((n_pairs + batch - 1) // batch, 0.025)
    w_in = ((rng.random((vocab, dim)) - 0.5) / dim).astype(np.float32)
    w_out = np.zeros((vocab, dim), dtype=np.float32)

    def sgns(fn):
        # fresh weights each call so repeats do equal work
        return lambda: fn(w_in.copy(), w_out.copy(), centers, contexts, negatives, lrs, batch)

    yield "sgns_train", sgns(K.numpy_sgns_train), sgns(K.numba_sgns_train), None


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"active backend: {K.backend_name()}")
    print(f"{'kernel':<16}{'numpy s':>10}{'numba s':>10}{'speedup':>10}")
    for name, np_fn, nb_fn, call_args in cases(args.scale, rng):
        run_np = (lambda f=np_fn, a=call_args: f(*a)) if call_args is not None else np_fn
        run_nb = (lambda f=nb_fn, a=call_args: f(*a)) if call_args is not None else nb_fn
        t_np = _best(run_np, args.repeat)
        if K.USE_NUMBA:
            run_nb()  # compile
            t_nb = _best(run_nb, args.repeat)
            print(f"{name:<16}{t_np:>10.4f}{t_nb:>10.4f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<16}{t_np:>10.4f}{'-':>10}{'-':>10}")


if __name__ == "__main__":
    main()
