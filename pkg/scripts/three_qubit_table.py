#!/usr/bin/env python3
"""τ3, τ2^(k) and S_k² for the four three-qubit classes, with the residual of τ3 + τ2 + S² = 1."""

import argparse

import numpy as np

from complementarity import measures as ms
from complementarity import states


def haar(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    a1, a2 = haar(2, rng)
    cases = {
        "product": states.product_state(rng.uniform(0, np.pi, 3)),
        "|0>(a1|00>+a2|11>)": states.bipartite_r_st(a1, a2, r=1),
        "W": states.w_state(haar(3, rng)),
        "GHZ": states.ghz_state(3, a1, a2),
    }
    print(f"{'class':22s} {'k':>2s} {'tau3':>10s} {'tau2':>10s} {'S^2':>10s} {'residual':>10s}")
    for name, psi in cases.items():
        for k in (1, 2, 3):
            p = ms.tangle_profile(psi, k)
            s2 = ms.single_particle_character(psi, k).character ** 2
            print(f"{name:22s} {k:2d} {p.three_tangle:10.6f} {p.pairwise_tangle:10.6f} {s2:10.6f} {p.three_tangle + p.pairwise_tangle + s2 - 1:10.1e}")


if __name__ == "__main__":
    main()
