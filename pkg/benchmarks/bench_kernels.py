"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from cgmalab import _accel, wedges


def _cases(rng: np.random.Generator):
    W = wedges.random_wedge(rng)
    pts = rng.normal(scale=4, size=(200_000, 4))
    contains = (pts, W.ell_plus, W.ell_minus, W.xi, False)
    true = rng.uniform(-1e4, 1e4, 401)
    L = 14
    phases = np.angle(np.exp(1j * true[None, :] / 2.0 ** np.arange(L + 1)[:, None]))
    return {
        "contains_points (200k points)": (_accel.contains_points_numpy, _accel.contains_points_numba, contains),
        "unwrap_doubling (401 x 15)": (_accel.unwrap_doubling_numpy, _accel.unwrap_doubling_numba, (phases,)),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    print(f"backend: {_accel.backend()}")
    for name, (f_np, f_nb, fargs) in _cases(np.random.default_rng(0)).items():
        t_np = min(timeit.repeat(lambda: f_np(*fargs), number=1, repeat=args.repeat))
        if f_nb is None:
            print(f"{name:32s} numpy {t_np * 1e3:8.3f} ms   numba unavailable")
            continue
        f_nb(*fargs)  # compile outside the timing
        t_nb = min(timeit.repeat(lambda: f_nb(*fargs), number=1, repeat=args.repeat))
        print(f"{name:32s} numpy {t_np * 1e3:8.3f} ms   numba {t_nb * 1e3:8.3f} ms   ratio {t_np / t_nb:6.2f}")


if __name__ == "__main__":
    main()
