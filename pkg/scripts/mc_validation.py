#!/usr/bin/env python3
"""Monte Carlo validation table at acceptance scale.

For each degree pair, estimates both spectral efficiencies from random
signature matrices and compares against the closed forms, then reports the
KS distance of the empirical spectrum.  Full scale takes a few minutes;
--quick shrinks the matrices for a smoke run.

Usage:
    python3 scripts/mc_validation.py --snr-db 10
    python3 scripts/mc_validation.py --quick --pairs 2,2 3,6
"""

import argparse
import time

import numpy as np

from sparse_noma import SystemConfig, spectral_density
from sparse_noma.capacity import capacity_lmmse, capacity_optimum
from sparse_noma.montecarlo import (
    empirical_capacity_lmmse,
    empirical_capacity_opt,
    empirical_spectrum,
    feasible_resources,
    generate_signature,
    ks_distance,
)
from sparse_noma.units import db_to_linear

DEFAULT_PAIRS = ["2,2", "3,2", "3,6", "10,10"]


def parse_pair(text: str) -> tuple[int, int]:
    d, bd = (int(tok) for tok in text.split(","))
    return d, bd


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--snr-db", type=float, default=10.0)
    ap.add_argument("--pairs", nargs="+", default=DEFAULT_PAIRS, metavar="D,BD")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="small matrices, fewer trials")
    args = ap.parse_args()

    snr = db_to_linear(args.snr_db)
    if args.quick:
        n_opt, t_opt, n_lm, t_lm = 200, 10, 300, 5
    else:
        n_opt, t_opt, n_lm, t_lm = 1200, 50, 2000, 20

    header = f"{'pair':>8} {'receiver':>8} {'closed':>10} {'estimate':>10} {'stderr':>9} {'dev':>9} {'ok':>3}"
    print(header)
    print("-" * len(header))
    all_ok = True
    t0 = time.perf_counter()
    for pair in args.pairs:
        d, bd = parse_pair(pair)
        cfg = SystemConfig(d, bd, snr)
        jobs = (
            ("opt", capacity_optimum(cfg).spectral_efficiency, empirical_capacity_opt, n_opt, t_opt),
            ("lmmse", capacity_lmmse(cfg).spectral_efficiency, empirical_capacity_lmmse, n_lm, t_lm),
        )
        for name, closed, runner, n, trials in jobs:
            n = feasible_resources(n, d, bd)
            est = runner(n, cfg, trials=trials, seed=args.seed)
            dev = abs(est.estimate - closed)
            ok = dev <= max(3.0 * est.stderr, 0.01 * closed)
            all_ok &= ok
            print(
                f"{pair:>8} {name:>8} {closed:10.5f} {est.estimate:10.5f}"
                f" {est.stderr:9.2e} {dev:9.2e} {'yes' if ok else 'NO':>3}"
            )
        n_ks = feasible_resources(n_lm, d, bd)
        rng = np.random.default_rng([args.seed, d, bd])
        sig = generate_signature(n_ks, d, bd, seed=rng)
        dist = ks_distance(empirical_spectrum(sig), spectral_density(cfg))
        print(f"{pair:>8} {'ks':>8} {'':>10} {dist:10.5f}")
    print(f"\n{'all receivers within tolerance' if all_ok else 'DEVIATIONS FOUND'}"
          f" ({time.perf_counter() - t0:.0f}s)")
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
