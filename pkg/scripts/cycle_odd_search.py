"""Exhaustive search of single-X placements for odd targets on even cycles.

For each (d, x) every (step, coin) slot at lengths d-1, d and d+1 gets one
Pauli X; the dense oracle then tries to solve and certify a local recovery.
Prints the certified placements so the tabulated choice can be compared.
"""
import argparse

import numpy as np

from twocoin import oracle
from twocoin.errors import InfeasibleError
from twocoin.hilbert import GraphSpec, random_vector
from twocoin.operators import CoinOp
from twocoin.transfer import TransferPlan, build_schedule


def certified(d: int, x: int, n_steps: int, slot: int, seed: int = 0):
    arena = GraphSpec.cycle(d)
    draft = TransferPlan(arena, x, build_schedule(arena, n_steps, {slot: CoinOp.x()}),
                         (CoinOp.identity(2), CoinOp.identity(2)), "search")
    payload = random_vector(2, np.random.default_rng(seed))
    system = oracle.build_system(draft)
    final = system.state(oracle.dense_evolve(draft, payload, system=system))
    try:
        pos, _, _ = oracle.split_product(final)
        if pos != x:
            return None
        rec = oracle.solve_recovery(final, payload, draft.coin2_init)
    except InfeasibleError:
        return None
    plan = TransferPlan(arena, x, draft.steps, rec, "search")
    if oracle.certify_schedule(plan, seed=seed).passed:
        return rec
    return None


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--d", type=int, nargs="+", default=[4, 6, 8, 10])
    args = p.parse_args()
    for d in args.d:
        for x in range(1, d, 2):
            hits = []
            for n_steps in (d - 1, d, d + 1):
                for slot in range(1, n_steps + 1):
                    rec = certified(d, x, n_steps, slot)
                    if rec is not None:
                        coin = 1 if slot % 2 else 2
                        hits.append(f"{n_steps} steps, X@{slot} (coin {coin}) -> ({rec[0].name},{rec[1].name})")
            tab = "tabulated X@%d on coin 2 at d+1=%d steps" % (x + 1, d + 1)
            print(f"d={d} x={x}: {len(hits)} certified; {tab}")
            for h in hits:
                print("   ", h)


if __name__ == "__main__":
    main()
