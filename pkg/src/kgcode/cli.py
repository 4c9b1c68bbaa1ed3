"""Command-line front end.

Exit codes:
  0  success
  2  bad usage or unreadable input
  3  schedule/class fail the hypothesis sum 2**(i - l_i) < 1 - mu(Q)
  4  stage cap exhausted
  5  construction terminated
  6  invariant check failed
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from .baseline import kucera_levels
from .codec import OracleTape, decode_oracle, default_cap, encode
from .core import Dyadic, ONE, certified_sum, parse_schedule
from .invariants import check_all
from .labelling import (
    CapExhausted,
    ConstructionTerminated,
    HypothesisError,
    dumps_trace,
    init,
    loads_trace,
    replay,
    run_until,
)
from .piclass import EnumeratedClass, generate_class

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_HYPOTHESIS = 3
EXIT_CAP = 4
EXIT_TERMINATED = 5
EXIT_CHECK = 6


@dataclass
class RunConfig:
    command: str
    schedule: str = "geometric:2"
    class_path: Optional[str] = None
    cap: Optional[int] = None
    seed: int = 0
    out_trace: Optional[str] = None
    out_dot: Optional[str] = None
    out_csv: Optional[str] = None
    options: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _load_class(path: Optional[str]) -> EnumeratedClass:
    if path is None:
        return EnumeratedClass(())
    return EnumeratedClass.load(path)


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _hypothesis_message(schedule, cls, err: HypothesisError) -> str:
    total = certified_sum(schedule)
    return (
        f"refusing to run: {err}\n"
        f"  certified schedule sum: {total}\n"
        f"  mu(Q): {cls.measure}\n"
        f"  required: sum < 1 - mu(Q) = {ONE - cls.measure}\n"
    )


def cmd_run(cfg: RunConfig) -> int:
    schedule = parse_schedule(cfg.schedule)
    cls = _load_class(cfg.class_path)
    try:
        st = init(schedule, cls)
    except HypothesisError as err:
        sys.stderr.write(_hypothesis_message(schedule, cls, err))
        return EXIT_HYPOTHESIS
    stages = cfg.options.get("stages")
    target = cfg.options.get("dvls", 2)
    if stages is not None:
        predicate = lambda t: t.stage >= stages  # noqa: E731
        cap = cfg.cap if cfg.cap is not None else stages
    else:
        predicate = lambda t: t.dvls >= target  # noqa: E731
        cap = cfg.cap if cfg.cap is not None else default_cap(target, cls)
    code = EXIT_OK
    try:
        outcome = run_until(st, predicate, cap)
        if not outcome.satisfied:
            sys.stderr.write(f"stage cap {cap} exhausted at stage {outcome.stage} (dvls={st.dvls})\n")
            code = EXIT_CAP
    except ConstructionTerminated as err:
        sys.stderr.write(f"{err}\n")
        code = EXIT_TERMINATED
    _write(cfg.out_trace, dumps_trace(st.trace))
    if cfg.out_dot:
        _write(cfg.out_dot, st.to_dot())
    if cfg.options.get("out_config"):
        _write(cfg.options["out_config"], cfg.to_json() + "\n")
    return code


def cmd_encode(cfg: RunConfig, bits: str) -> int:
    schedule = parse_schedule(cfg.schedule)
    cls = _load_class(cfg.class_path)
    try:
        result = encode(bits, schedule, cls, cfg.cap)
    except HypothesisError as err:
        sys.stderr.write(_hypothesis_message(schedule, cls, err))
        return EXIT_HYPOTHESIS
    except CapExhausted as err:
        sys.stderr.write(f"{err}\n")
        return EXIT_CAP
    sys.stdout.write(result.code_prefix + "\n")
    sys.stdout.write(json.dumps(result.to_dict(), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_decode(cfg: RunConfig, bits: str) -> int:
    schedule = parse_schedule(cfg.schedule)
    cls = _load_class(cfg.class_path)
    n = schedule.index_of(len(bits))
    if n is None:
        sys.stderr.write(f"length {len(bits)} is not a schedule level\n")
        return EXIT_USAGE
    tape = OracleTape(bits)
    try:
        sigma = decode_oracle(tape, n, schedule, cls, cfg.cap)
    except HypothesisError as err:
        sys.stderr.write(_hypothesis_message(schedule, cls, err))
        return EXIT_HYPOTHESIS
    except CapExhausted as err:
        sys.stderr.write(f"{err}\n")
        return EXIT_CAP
    sys.stdout.write(sigma + "\n")
    sys.stdout.write(json.dumps({"code": bits, "decoded": sigma, "n": n, "oracle_bits_read": tape.reads}, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_check(cfg: RunConfig, trace_path: str) -> int:
    schedule = parse_schedule(cfg.schedule)
    cls = _load_class(cfg.class_path)
    with open(trace_path, encoding="utf-8") as fh:
        events = loads_trace(fh.read())
    out = io.StringIO()
    code = EXIT_OK
    for snap in replay(events, schedule, cls):
        report = check_all(snap)
        out.write(json.dumps(report.to_dict()) + "\n")
        if not report.ok:
            code = EXIT_CHECK
    _write(cfg.options.get("out"), out.getvalue())
    return code


CSV_HEADER = ["n", "ell_optimal", "ell_kucera", "redundancy_optimal", "redundancy_kucera"]


def bench_rows(schedule, cls: EnumeratedClass, n_max: int) -> list[list[int]]:
    kl = kucera_levels(cls, n_max)
    rows = []
    for n in range(n_max + 1):
        lo, lk = schedule.level(n), kl.levels[n]
        rows.append([n, lo, lk, lo - n, lk - n])
    return rows


def crossover(rows: list[list[int]]) -> Optional[int]:
    """Least ``n0`` with ``ell_kucera >= ell_optimal`` for every reported ``n >= n0``."""
    n0 = None
    for row in reversed(rows):
        if row[2] >= row[1]:
            n0 = row[0]
        else:
            break
    return n0


def cmd_bench(cfg: RunConfig) -> int:
    schedule = parse_schedule(cfg.schedule)
    n_max = cfg.options.get("n_max", 8)
    n_classes = cfg.options.get("classes")
    if cfg.class_path is not None or not n_classes:
        classes = [(None, _load_class(cfg.class_path))]
    else:
        cap = Dyadic.parse(cfg.options.get("measure_cap", "1/4"))
        depth = cfg.options.get("depth", 8)
        stages = cfg.options.get("stages", 4)
        classes = [(cfg.seed + k, generate_class(cfg.seed + k, cap, depth, stages)) for k in range(n_classes)]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    multi = classes[0][0] is not None
    writer.writerow(["class_seed", *CSV_HEADER] if multi else CSV_HEADER)
    for seed, cls in classes:
        try:
            init(schedule, cls)
        except HypothesisError as err:
            sys.stderr.write(_hypothesis_message(schedule, cls, err))
            return EXIT_HYPOTHESIS
        rows = bench_rows(schedule, cls, n_max)
        for row in rows:
            writer.writerow([seed, *row] if multi else row)
        label = f"seed={seed}" if multi else "class"
        sys.stderr.write(f"{label} n0={crossover(rows)}\n")
    _write(cfg.out_csv, out.getvalue())
    return EXIT_OK


def cmd_gen_class(cfg: RunConfig) -> int:
    cap = Dyadic.parse(cfg.options.get("measure_cap", "1/4"))
    cls = generate_class(cfg.seed, cap, cfg.options.get("depth", 8), cfg.options.get("stages", 4))
    _write(cfg.options.get("out"), cls.dumps())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--schedule", default="geometric:2", help="geometric:c | log:a,b | file:<path>")
    common.add_argument("--class", dest="class_path", help="class file (stage<TAB>bits per line); default empty")
    common.add_argument("--cap", type=int, help="stage cap")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="kgcode", description="Optimal-redundancy coding into finite classes.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="run the labelling construction and export its trace")
    r.add_argument("--out-trace")
    r.add_argument("--out-dot")
    r.add_argument("--out-config")
    r.add_argument("--dvls", type=int, default=2, help="stop once labels reach this length")
    r.add_argument("--stages", type=int, help="run exactly this many stages instead")

    e = sub.add_parser("encode", parents=[common], help="print the code of a bit string")
    e.add_argument("bits")
    d = sub.add_parser("decode", parents=[common], help="decode a code prefix")
    d.add_argument("bits")

    c = sub.add_parser("check", parents=[common], help="replay a JSONL trace and check every stage")
    c.add_argument("--trace", required=True)
    c.add_argument("--out")

    b = sub.add_parser("bench", parents=[common], help="CSV of optimal vs bit-by-bit oracle use")
    b.add_argument("--n-max", type=int, default=8)
    b.add_argument("--out-csv")
    b.add_argument("--classes", type=int, help="bench this many generated classes (seeds from --seed)")
    b.add_argument("--measure-cap", default="1/4")
    b.add_argument("--depth", type=int, default=8)
    b.add_argument("--stages", type=int, default=4)

    g = sub.add_parser("gen-class", parents=[common], help="write a pseudorandom class file")
    g.add_argument("--measure-cap", default="1/4")
    g.add_argument("--depth", type=int, default=8)
    g.add_argument("--stages", type=int, default=4)
    g.add_argument("--out")
    return p


_COMMON = {"command", "schedule", "class_path", "cap", "seed", "out_trace", "out_dot", "out_csv"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    ns = vars(args)
    options = {k: v for k, v in ns.items() if k not in _COMMON and k != "bits" and k != "trace" and v is not None}
    return RunConfig(
        command=args.command,
        schedule=args.schedule,
        class_path=args.class_path,
        cap=args.cap,
        seed=args.seed,
        out_trace=ns.get("out_trace"),
        out_dot=ns.get("out_dot"),
        out_csv=ns.get("out_csv"),
        options=options,
    )


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    try:
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "encode":
            return cmd_encode(cfg, args.bits)
        if args.command == "decode":
            return cmd_decode(cfg, args.bits)
        if args.command == "check":
            return cmd_check(cfg, args.trace)
        if args.command == "bench":
            return cmd_bench(cfg)
        if args.command == "gen-class":
            return cmd_gen_class(cfg)
    except (OSError, ValueError) as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_USAGE
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
