"""Which cycle sizes admit the two-vertex teleportation form after d/2 steps."""
import argparse

from twocoin.errors import ParityError
from twocoin.hilbert import random_vector
from twocoin.teleport import plan_teleport_cycle, run_teleport

import numpy as np


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--d-max", type=int, default=24)
    args = p.parse_args()
    rng = np.random.default_rng(0)
    for d in range(4, args.d_max + 1, 2):
        try:
            rep = run_teleport(plan_teleport_cycle(d), random_vector(2, rng))
        except ParityError as exc:
            print(f"d={d:>3}: rejected ({exc})")
            continue
        print(f"d={d:>3}: {len(rep.branches)} branches, "
              f"min fidelity {min(b.fidelity for b in rep.branches):.15f}")


if __name__ == "__main__":
    main()
