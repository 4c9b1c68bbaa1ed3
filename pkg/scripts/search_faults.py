"""Search for single-check fault fixtures by mutating snapshots of real runs.

For every named check, keep the smallest mutated snapshot on which that check,
and only that check, fails.  Also tallies which failure sets occur, which is
how implications between checks show up.

    python scripts/search_faults.py --trials 40000 --out tests/fixtures/faults.json
"""

import argparse
import json
import random
from collections import Counter

from kgcode.core import Dyadic, parse_schedule
from kgcode.invariants import CHECKS, check_all
from kgcode.labelling import ConstructionTerminated, Snapshot, init
from kgcode.piclass import EnumeratedClass, generate_class


# Equivalent on snapshots that pass every structural check, so they can only
# fail together.
COUPLED = {"inactive-saturated-or-D", "active-frontier", "cover"}


def to_plain(snap: Snapshot) -> dict:
    return snap.to_dict()


def from_plain(d: dict) -> Snapshot:
    return Snapshot.from_dict(d)


def base_snapshots(seeds: int) -> list[dict]:
    out = []

    def collect(spec, cls, stages, check=True):
        st = init(parse_schedule(spec), cls, check=check)
        out.append(to_plain(st.snapshot()))
        for _ in range(stages):
            try:
                st.step()
            except ConstructionTerminated:
                out.append(to_plain(st.snapshot()))
                return
            out.append(to_plain(st.snapshot()))

    collect("geometric:2", EnumeratedClass.of([(1, "0000")]), 5)
    collect("geometric:2", EnumeratedClass(()), 3)
    collect("log:0,1", EnumeratedClass(()), 3, check=False)
    collect("log:0,1", EnumeratedClass.of([(1, "0"), (1, "1")]), 4, check=False)
    collect("log:1,1", EnumeratedClass.of([(1, "000"), (2, "0110")]), 6, check=False)
    for seed in range(seeds):
        cls = generate_class(seed, Dyadic(3, 3), 6, 3)
        collect("geometric:2", cls, 6)
        collect("log:2,3", cls, 6)
        collect("log:2,2", generate_class(seed, Dyadic(1, 3), 5, 3), 6)
    return out


def _rand_bits(rng, n):
    return "".join(rng.choice("01") for _ in range(n))


def mutate(d: dict, rng: random.Random) -> dict:
    d = json.loads(json.dumps(d))
    labelled = [s for s, _ in d["labels"]]
    op = rng.randrange(14)
    if op == 0 and labelled:  # drop a label everywhere
        s = rng.choice(labelled)
        d["labels"] = [x for x in d["labels"] if x[0] != s]
        d["history"] = [x for x in d["history"] if x[1] != s]
        d["active"] = [x for x in d["active"] if x != s]
    elif op == 1:  # new label on a fresh string
        n = rng.randrange(1, 9)
        s = _rand_bits(rng, n)
        sig = _rand_bits(rng, rng.randrange(0, 4))
        d["labels"].append([s, sig])
        if rng.random() < 0.7:
            d["history"].append([d["stage"], s, sig])
        if rng.random() < 0.7:
            d["active"].append(s)
    elif op == 2 and labelled:  # flip an active flag
        s = rng.choice(labelled)
        if s in d["active"]:
            d["active"].remove(s)
        else:
            d["active"].append(s)
    elif op == 3:  # activate an arbitrary string
        d["active"].append(_rand_bits(rng, rng.randrange(1, 9)))
    elif op == 4 and labelled:  # enumerate a labelled string into D
        d["D"].append([rng.randrange(0, d["stage"] + 2), rng.choice(labelled)])
    elif op == 5 and d["D"]:
        d["D"].pop(rng.randrange(len(d["D"])))
    elif op == 6:
        d["stage"] = max(0, d["stage"] + rng.choice([-2, -1, 1, 2]))
    elif op == 7:
        d["dvls"] = max(0, d["dvls"] + rng.choice([-1, 1, 2]))
    elif op == 8 and d["history"]:  # move a history entry to the end
        d["history"].append(d["history"].pop(rng.randrange(len(d["history"]))))
    elif op == 9 and len(d["labels"]) > 1:  # swap the labels of two strings
        i, j = rng.sample(range(len(d["labels"])), 2)
        a, b = d["labels"][i], d["labels"][j]
        a[1], b[1] = b[1], a[1]
        for h in d["history"]:
            if h[1] == a[0]:
                h[2] = a[1]
            elif h[1] == b[0]:
                h[2] = b[1]
    elif op == 10 and labelled:  # second label on an existing string
        s = rng.choice(labelled)
        d["labels"].append([s, _rand_bits(rng, rng.randrange(0, 3))])
    elif op == 11 and d["history"]:  # forget a history entry
        d["history"].pop(rng.randrange(len(d["history"])))
    elif op == 12 and d["stage"] > 0:  # rewind the stage counter consistently
        d["stage"] = rng.randrange(d["stage"])
        for h in d["history"]:
            h[0] = min(h[0], d["stage"])
        for e in d["D"]:
            e[0] = min(e[0], d["stage"])
    elif op == 13:  # move a label onto a fresh sibling and activate it there
        sched = parse_schedule(d["schedule"])
        cands = [(s, sig) for s, sig in d["labels"] if sig and len(s) == sched.level(len(sig))]
        if cands:
            s, sig = rng.choice(cands)
            parent = s[: sched.level(len(sig) - 1)]
            gap = len(s) - len(parent)
            free = [parent + format(v, f"0{gap}b") for v in range(1 << gap)]
            free = [f for f in free if f not in labelled]
            if free:
                t = rng.choice(free)
                d["labels"].append([t, sig])
                d["history"].append([d["stage"], t, sig])
                d["active"] = [a for a in d["active"] if a != s] + [t]
    return d


def size(d: dict) -> int:
    return len(d["labels"]) + len(d["D"]) + len(d["history"])


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=20000)
    p.add_argument("--seeds", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    args = p.parse_args(argv)
    rng = random.Random(args.seed)
    bases = base_snapshots(args.seeds)
    bases = [b for b in bases if check_all(from_plain(b)).ok or b["schedule"] == "log:0,1"]
    best: dict[str, dict] = {}
    sets = Counter()
    for _ in range(args.trials):
        d = rng.choice(bases)
        for _ in range(rng.randrange(1, 4)):
            d = mutate(d, rng)
        failed = tuple(check_all(from_plain(d)).failed_names())
        sets[failed] += 1
        names = failed if set(failed) == COUPLED else failed[:1] if len(failed) == 1 else ()
        for name in names:
            if name not in best or size(d) < size(best[name]):
                best[name] = dict(d, expected_failures=list(failed))
    for name in CHECKS:
        got = best[name]["expected_failures"] if name in best else "MISSING"
        print(f"{name:26s} {got}")
    print("most common failure sets:")
    for fs, n in sets.most_common(25):
        print(f"  {n:6d} {list(fs)}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({k: best[k] for k in CHECKS if k in best}, fh, indent=1, sort_keys=True)
            fh.write("\n")


if __name__ == "__main__":
    main()
