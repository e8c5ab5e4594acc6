#!/usr/bin/env python3
"""Benchmark the compiled SGD kernels against the NumPy fallback.

Times one full epoch per family over a synthetic corpus and reports
documents/second for whichever backends are importable. Run:

    python benchmarks/bench_kernels.py [--docs 8000] [--vocab 20000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np


def synth_problem(n_docs: int, n_features: int, n_classes: int, avg_nnz: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    lengths = rng.poisson(avg_nnz, n_docs).clip(1, None)
    indptr = np.zeros(n_docs + 1, dtype=np.int32)
    np.cumsum(lengths, out=indptr[1:])
    total = int(indptr[-1])
    indices = np.empty(total, dtype=np.int32)
    for i in range(n_docs):
        lo, hi = indptr[i], indptr[i + 1]
        indices[lo:hi] = np.sort(rng.choice(n_features, size=hi - lo, replace=False))
    data = rng.integers(1, 4, size=total).astype(np.float64)
    labels = rng.integers(0, n_classes, size=n_docs).astype(np.int64)
    y_signs = np.where(np.arange(n_classes)[:, None] == labels[None, :], 1.0, -1.0)
    order = rng.permutation(n_docs).astype(np.int64)
    return data, indices, indptr, labels, y_signs, order


def time_hinge(impl, problem, n_features, repeat):
    data, indices, indptr, _, y_signs, order = problem
    n_classes = y_signs.shape[0]
    best = float("inf")
    for _ in range(repeat):
        v = np.zeros((n_classes, n_features))
        acc = np.zeros_like(v)
        bias = np.zeros(n_classes)
        bias_acc = np.zeros(n_classes)
        start = time.perf_counter()
        impl.hinge_epoch(
            data, indices, indptr, y_signs, order, v, acc, bias, bias_acc,
            1.0, 0.0, 0, 0.1, 1e-4, len(order),
        )
        best = min(best, time.perf_counter() - start)
    return best


def time_emb(impl, problem, n_features, dim, repeat):
    data, indices, indptr, labels, _, order = problem
    n_classes = int(labels.max()) + 1
    rng = np.random.default_rng(1)
    emb0 = rng.uniform(-1.0 / dim, 1.0 / dim, (n_features, dim))
    best = float("inf")
    for _ in range(repeat):
        emb = emb0.copy()
        out_w = np.zeros((n_classes, dim))
        out_b = np.zeros(n_classes)
        start = time.perf_counter()
        impl.emb_epoch(
            data, indices, indptr, labels, order, emb, out_w, out_b,
            0, 0.1, 1e-4, len(order),
        )
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=8000)
    parser.add_argument("--vocab", type=int, default=20000)
    parser.add_argument("--classes", type=int, default=20)
    parser.add_argument("--nnz", type=int, default=120, help="average tokens per document")
    parser.add_argument("--dim", type=int, default=100)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = {}
    for label, module in (("python", "smudge.models.kernels_py"), ("compiled", "smudge.models._kernels")):
        try:
            backends[label] = importlib.import_module(module)
        except ImportError:
            print(f"{label:>9}: not available")
    problem = synth_problem(args.docs, args.vocab, args.classes, args.nnz)

    print(
        f"\n{args.docs} docs, vocab {args.vocab}, {args.classes} classes, "
        f"~{args.nnz} tokens/doc, dim {args.dim} (best of {args.repeat})\n"
    )
    print(f"{'kernel':<14}{'backend':<11}{'epoch time':>12}{'docs/sec':>12}")
    times: dict[tuple[str, str], float] = {}
    for name in backends:
        t = time_hinge(backends[name], problem, args.vocab, args.repeat)
        times[("hinge", name)] = t
        print(f"{'hinge_epoch':<14}{name:<11}{t:>11.3f}s{args.docs / t:>12.0f}")
    for name in backends:
        t = time_emb(backends[name], problem, args.vocab, args.dim, args.repeat)
        times[("emb", name)] = t
        print(f"{'emb_epoch':<14}{name:<11}{t:>11.3f}s{args.docs / t:>12.0f}")

    if len(backends) == 2:
        print()
        for kernel in ("hinge", "emb"):
            speedup = times[(kernel, "python")] / times[(kernel, "compiled")]
            print(f"{kernel}_epoch: compiled is {speedup:.1f}x the NumPy fallback")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
