"""Run the positive even line schedule followed by its mirror and show where the state lands.

The walker and coin 1 return, but coin 2 keeps the flip applied at step 2
of the negative schedule; one extra X on coin 2 restores the initial state.
"""
import argparse

import numpy as np

from twocoin.hilbert import fidelity_up_to_phase, random_vector
from twocoin.operators import CoinOp, apply_coin
from twocoin.transfer import periodicity_state


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--x", type=int, nargs="+", default=[2, 4, 6, 8])
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    for x in args.x:
        init, final = periodicity_state(x, random_vector(2, rng))
        fixed = apply_coin(final, 2, CoinOp.x())
        print(f"x={x}: {4 * x} steps, fidelity {fidelity_up_to_phase(init, final):.3f}, "
              f"after X on coin 2 {fidelity_up_to_phase(init, fixed):.15f}")
        print("   final support:", final.support())


if __name__ == "__main__":
    main()
