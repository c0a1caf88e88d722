"""Sweep circulant graphs and report which targets the qudit schedule certifies for.

    python scripts/regular_feasibility.py --n-max 13 --json out.json
"""
import argparse
import json

from twocoin.transfer import regular_feasible_set


def sweep(n_max: int, trials: int, seed: int) -> dict:
    out = {}
    for n in range(3, n_max + 1):
        for d in range(2, n + 1):
            recs = regular_feasible_set(n, d, trials=trials, seed=seed)
            out[f"{n},{d}"] = {
                "feasible": [x for x, r in recs.items() if r.passed],
                "infeasible": [x for x, r in recs.items() if not r.passed],
                "min_fidelity": min(r.min_fidelity for r in recs.values()),
            }
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-max", type=int, default=11)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json")
    args = p.parse_args()
    res = sweep(args.n_max, args.trials, args.seed)
    for key, row in res.items():
        status = "all x" if not row["infeasible"] else f"infeasible {row['infeasible']}"
        print(f"n,d={key:>6}  {status:<20} min fidelity {row['min_fidelity']:.15f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(res, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
