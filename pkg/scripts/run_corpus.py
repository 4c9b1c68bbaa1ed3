"""Run the acceptance corpus with every stage checked and print one row per run.

    python scripts/run_corpus.py --size 200 --dvls 10
"""

import argparse
import sys

from kgcode.corpus import CorpusSpec, run_checked


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=200)
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--measure-cap", default="3/8")
    ap.add_argument("--dvls", type=int, default=10)
    args = ap.parse_args(argv)

    spec = CorpusSpec(size=args.size, first_seed=args.first_seed, measure_cap=args.measure_cap)
    bad = 0
    print("seed\tschedule\tentries\tmax_len\tstages\tdvls\tadaptive\tstatus")
    for seed, cls in spec.classes():
        for schedule in spec.parsed_schedules():
            r = run_checked(seed, schedule, cls, dvls_goal=args.dvls)
            if r.terminated:
                status = "terminated"
            elif r.first_failure is not None:
                status = f"check:{r.first_failure.failed.check}@{r.first_failure.stage}"
            elif not r.reached:
                status = "cap"
            else:
                status = "ok"
            bad += status != "ok"
            print(f"{seed}\t{r.schedule}\t{len(cls)}\t{cls.max_len}\t{r.stages}\t{r.dvls}\t{r.kinds.get('Adaptive', 0)}\t{status}")
    print(f"{bad} bad runs", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
