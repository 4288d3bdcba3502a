"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Times each kernel at the sizes the analysis actually uses, then a full
per-state deficit evaluation with each backend swapped in.
"""

import argparse
import timeit

import numpy as np

from markovscope import kernels
from markovscope.lab import evaluate_deficits
from markovscope.sampling import SampleConfig, sample_state


def _backends():
    out = [kernels.python_backend]
    if kernels.compiled_backend is not None:
        out.append(kernels.compiled_backend)
    return out


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in (4, 8, 18, 32):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = g + g.conj().T
        for be in _backends():
            t = min(timeit.repeat(lambda: be.eigh(h), number=200, repeat=repeat)) / 200
            rows.append(("eigh", n, be.NAME, t))
    a = rng.standard_normal((4, 4)) + 0j
    b = np.eye(2, dtype=np.complex128)
    for be in _backends():
        t = min(timeit.repeat(lambda: be.kron(a, b), number=2000, repeat=repeat)) / 2000
        rows.append(("kron", 8, be.NAME, t))
    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    for be in _backends():
        t = min(timeit.repeat(lambda: be.trace_out(m, 2, 2, 2), number=2000, repeat=repeat)) / 2000
        rows.append(("trace_out", 8, be.NAME, t))
    return rows


def bench_pipeline(repeat, count=200):
    cfg = SampleConfig(dims=(2, 2, 2), count=count, seed=1)
    states = [sample_state(cfg, i) for i in range(count)]
    rows = []
    saved = (kernels.eigh, kernels.kron, kernels.trace_out)
    try:
        for be in _backends():
            kernels.eigh, kernels.kron, kernels.trace_out = be.eigh, be.kron, be.trace_out

            def run():
                for s in states:
                    # fresh copies so cached marginals are recomputed with this backend
                    evaluate_deficits(type(s)(s.rho, s.dims, validate=False))

            t = min(timeit.repeat(run, number=1, repeat=repeat)) / count
            rows.append(("evaluate_deficits", 8, be.NAME, t))
    finally:
        kernels.eigh, kernels.kron, kernels.trace_out = saved
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = bench_kernels(args.repeat) + bench_pipeline(args.repeat)
    print(f"{'kernel':<20}{'dim':>5}  {'backend':<8}{'time/call':>14}")
    for name, n, be, t in rows:
        print(f"{name:<20}{n:>5}  {be:<8}{t * 1e6:>11.2f} us")


if __name__ == "__main__":
    main()
