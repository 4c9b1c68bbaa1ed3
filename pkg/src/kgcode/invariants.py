"""Independent checker for the labelling construction.

Works on :class:`~kgcode.labelling.Snapshot` values, never on the engine's own
bookkeeping, and recomputes everything (leaves, saturation, active holders)
from the raw label list and placement history.

Each check only looks at entries that earlier structural checks accept
(labels on schedule levels, correctly layered, one per string), so an injected
fault is reported by the check that owns it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .core import EMPTY, Dyadic, ONE, ZERO, has_prefix_in, measure_of, weight
from .labelling import LabelledTree, Snapshot

CHECKS = (
    "restriction",
    "layering",
    "uniqueness",
    "completeness",
    "consistency",
    "finiteness",
    "persistence",
    "one-active-per-label",
    "active-is-last",
    "inactive-saturated-or-D",
    "no-labels-above-D",
    "D-subset-Q",
    "filtered-enumeration",
    "weight-bound",
    "weight-ceiling",
    "active-frontier",
    "escape",
    "cover",
    "leaf-level",
)


@dataclass(frozen=True)
class Failure:
    check: str
    witness: tuple[str, ...]
    expected: str = ""
    actual: str = ""

    def to_dict(self) -> dict:
        return {"check": self.check, "witness": list(self.witness), "expected": self.expected, "actual": self.actual}


@dataclass
class CheckReport:
    stage: int
    passed: list[str] = field(default_factory=list)
    failures: list[Failure] = field(default_factory=list)

    @property
    def failed(self) -> Optional[Failure]:
        return self.failures[0] if self.failures else None

    @property
    def ok(self) -> bool:
        return not self.failures

    def failed_names(self) -> list[str]:
        return [f.check for f in self.failures]

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "passed": list(self.passed),
            "failed": self.failed.to_dict() if self.failed else None,
            "failures": [f.to_dict() for f in self.failures],
        }


class _View:
    """Derived, checker-owned tables for one snapshot."""

    def __init__(self, snap: Snapshot):
        self.snap = snap
        sched = snap.schedule
        longest = max((len(s) for s, _ in snap.labels), default=0)
        self.levels: list[int] = []
        try:
            while not self.levels or self.levels[-1] <= longest:
                self.levels.append(sched.level(len(self.levels)))
        except (ValueError, IndexError):
            pass
        self.index = {li: i for i, li in enumerate(self.levels)}

        self.first: dict[str, str] = {}
        self.all_labels: dict[str, set[str]] = {}
        for s, sigma in snap.labels:
            self.all_labels.setdefault(s, set()).add(sigma)
            self.first.setdefault(s, sigma)
        # well-formed entries: on a level, layered, first occurrence
        self.wf: dict[str, str] = {}
        for s, sigma in self.first.items():
            k = self.index.get(len(s))
            if k is not None and len(sigma) == k:
                self.wf[s] = sigma
        self.sigmas = set(self.wf.values())
        self.d_list = [d for _, d in snap.D]
        self.d_set = set(self.d_list)
        self.active_wf = {s for s in snap.active if s in self.wf}
        self.internal = set()
        self.closure = {EMPTY}
        for s in self.wf:
            for k in range(len(s)):
                p = s[:k]
                self.closure.add(p)
                if p in self.wf:
                    self.internal.add(p)
            self.closure.add(s)
        self.leaf_len = max((len(s) for s in self.wf), default=0)
        self.children: dict[str, int] = {}
        for s in self.wf:
            k = self.index[len(s)]
            parent = EMPTY if k == 0 else s[: self.levels[k - 1]]
            self.children[parent] = self.children.get(parent, 0) + 1

    def next_level(self, s: str) -> Optional[int]:
        if s == EMPTY:
            return self.levels[0] if self.levels else None
        k = self.index.get(len(s))
        if k is None or k + 1 >= len(self.levels):
            return None
        return self.levels[k + 1]

    def saturated(self, s: str) -> bool:
        nl = self.next_level(s)
        if nl is None:
            return False
        return self.children.get(s, 0) == 1 << (nl - len(s))

    def level_sum(self, n: int) -> Dyadic:
        total = ZERO
        for i in range(n + 1):
            total += Dyadic.pow2(i - self.snap.schedule.level(i))
        return total


def _restriction(v: _View):
    bad = sorted({s for s, _ in v.snap.labels if len(s) not in v.index})
    if bad:
        return Failure("restriction", tuple(bad), "labels only on schedule levels", f"lengths {sorted({len(s) for s in bad})}")


def _layering(v: _View):
    bad = sorted(s for s, sigma in v.first.items() if len(s) in v.index and len(sigma) != v.index[len(s)])
    if bad:
        s = bad[0]
        return Failure("layering", tuple(bad), f"|sigma| = {v.index[len(s)]} on {s}", f"x_{v.first[s]!r}")


def _uniqueness(v: _View):
    bad = sorted(s for s, sig in v.all_labels.items() if len(sig) > 1)
    if bad:
        return Failure("uniqueness", tuple(bad), "one label per string", f"{sorted(v.all_labels[bad[0]])} on {bad[0]}")


def _completeness(v: _View):
    counts = Counter(len(sigma) for sigma in v.sigmas)
    top = max(counts, default=-1)
    for n in range(top + 1):
        if counts[n] != 1 << n:
            missing = [format(x, f"0{n}b") if n else "" for x in range(1 << n)]
            missing = tuple(m for m in missing if m not in v.sigmas)
            return Failure("completeness", missing, f"all 2^{n} labels of length {n}", f"{counts[n]} present")


def _consistency(v: _View):
    for s, sigma in v.wf.items():
        k = v.index[len(s)]
        for i in range(k):
            p = s[: v.levels[i]]
            if v.wf.get(p) != sigma[:i]:
                return Failure("consistency", (s, p), f"x_{sigma[:i]!r} on {p}", f"{v.wf.get(p)!r}")


def _finiteness(v: _View):
    try:
        bound = v.snap.schedule.level(v.snap.stage)
    except (ValueError, IndexError):
        return None
    bad = sorted(s for s in v.wf if len(s) > bound)
    if bad:
        return Failure("finiteness", tuple(bad), f"length <= l_{v.snap.stage} = {bound}", f"{len(bad[0])}")


def _persistence(v: _View):
    present = set(v.snap.labels)
    for stage, s, sigma in v.snap.history:
        if (s, sigma) not in present or stage > v.snap.stage:
            return Failure("persistence", (s,), f"x_{sigma!r} kept on {s} since stage {stage}", f"{sorted(v.all_labels.get(s, ()))}")


def _holders(v: _View) -> dict[str, list[str]]:
    holders: dict[str, list[str]] = {sigma: [] for sigma in v.sigmas}
    for s in sorted(v.active_wf):
        holders[v.wf[s]].append(s)
    return holders


def _one_active(v: _View):
    stray = sorted(s for s in v.snap.active if s not in v.first)
    if stray:
        return Failure("one-active-per-label", tuple(stray), "active strings are labelled", "unlabelled")
    for sigma, hs in sorted(_holders(v).items()):
        if len(hs) != 1:
            return Failure("one-active-per-label", tuple(hs) or (sigma,), f"one active x_{sigma!r}", f"{len(hs)} active")


def _active_is_last(v: _View):
    last: dict[str, str] = {}
    for _, s, sigma in v.snap.history:
        last[sigma] = s
    for sigma, hs in sorted(_holders(v).items()):
        if len(hs) == 1 and sigma in last and last[sigma] != hs[0]:
            return Failure("active-is-last", (hs[0], last[sigma]), f"active x_{sigma!r} on {last[sigma]}", hs[0])


def _inactive_sat_or_d(v: _View):
    for s in sorted(v.wf):
        if s not in v.snap.active and s not in v.d_set and not v.saturated(s):
            return Failure("inactive-saturated-or-D", (s,), "inactive strings saturated or in D", "unsaturated, not in D")


def _no_labels_above_d(v: _View):
    for s in sorted(v.wf):
        for k in range(len(s)):
            if s[:k] in v.d_set:
                return Failure("no-labels-above-D", (s[:k], s), f"nothing labelled above {s[:k]}", f"{s} labelled")


def _d_subset_q(v: _View):
    for stage, d in v.snap.D:
        q = v.snap.cls.strings_at(max(stage - 1, 0))
        if not has_prefix_in(d, q):
            return Failure("D-subset-Q", (d,), f"prefix in Q_{stage - 1}", "none")


def _filtered_enumeration(v: _View):
    seen: set[str] = set()
    stages: set[int] = set()
    for stage, d in v.snap.D:
        if d in seen or stage in stages or stage > v.snap.stage or stage < 1 or d not in v.wf:
            return Failure("filtered-enumeration", (d,), "distinct labelled strings, at most one per stage", f"stage {stage}")
        seen.add(d)
        stages.add(stage)


def _active_weight(v: _View) -> Dyadic:
    return weight(v.snap.active)


def _weight_bound(v: _View):
    w = _active_weight(v)
    md = measure_of(v.d_set)
    if not w + md < ONE:
        return Failure("weight-bound", tuple(sorted(v.snap.active)), "wgt(U) + mu(D) < 1", f"{w} + {md} = {w + md}")


def _weight_ceiling(v: _View):
    w = _active_weight(v)
    try:
        cap = v.level_sum(v.snap.dvls)
    except (ValueError, IndexError):
        return None
    if not w <= cap:
        return Failure("weight-ceiling", tuple(sorted(v.snap.active)), f"<= {cap}", f"{w}")


def _active_frontier(v: _View):
    depth = v.leaf_len
    stack = [(EMPTY, None)]
    while stack:
        node, longest = stack.pop()
        if node in v.d_set:
            continue
        if node in v.wf:
            longest = node
        if node not in v.closure or len(node) >= depth:
            if longest is not None and longest not in v.snap.active:
                return Failure("active-frontier", (node + "0" * (depth - len(node)), longest), "longest labelled prefix active", f"{longest} inactive")
            continue
        stack.append((node + "1", longest))
        stack.append((node + "0", longest))


def _escape(v: _View):
    reach: set[str] = set()
    for s in v.wf:
        if s not in v.internal and s not in v.d_set:
            for k in range(len(s) + 1):
                reach.add(s[:k])
    for s in sorted(v.active_wf):
        if s not in reach:
            return Failure("escape", (s,), "a leaf outside D above every active string", "none")


def _cover(v: _View):
    depth = v.leaf_len
    memo: dict[str, bool] = {}

    def covered(w: str) -> bool:
        if w in memo:
            return memo[w]
        if w in v.d_set or w in v.snap.active:
            r = True
        elif len(w) >= depth or w not in v.closure:
            r = False
        else:
            r = covered(w + "0") and covered(w + "1")
        memo[w] = r
        return r

    for nu in sorted(v.wf):
        if has_prefix_in(nu, v.d_set) or covered(nu):
            continue
        w = nu
        while w in v.closure and len(w) < depth:
            w = w + "0" if not covered(w + "0") else w + "1"
        return Failure("cover", (nu, w + "0" * (depth - len(w))), f"[[{nu}]] inside [[D]] and [[U({nu})]]", "uncovered")


def _leaf_level(v: _View):
    lens = {}
    for s in v.wf:
        if s not in v.internal and s not in v.d_set:
            lens.setdefault(len(s), s)
    if len(lens) > 1:
        return Failure("leaf-level", tuple(lens[k] for k in sorted(lens)), "leaves outside D on one level", f"lengths {sorted(lens)}")


_RUNNERS = {
    "restriction": _restriction,
    "layering": _layering,
    "uniqueness": _uniqueness,
    "completeness": _completeness,
    "consistency": _consistency,
    "finiteness": _finiteness,
    "persistence": _persistence,
    "one-active-per-label": _one_active,
    "active-is-last": _active_is_last,
    "inactive-saturated-or-D": _inactive_sat_or_d,
    "no-labels-above-D": _no_labels_above_d,
    "D-subset-Q": _d_subset_q,
    "filtered-enumeration": _filtered_enumeration,
    "weight-bound": _weight_bound,
    "weight-ceiling": _weight_ceiling,
    "active-frontier": _active_frontier,
    "escape": _escape,
    "cover": _cover,
    "leaf-level": _leaf_level,
}


def _as_snapshot(st: LabelledTree | Snapshot) -> Snapshot:
    return st.snapshot() if isinstance(st, LabelledTree) else st


def check_all(st: LabelledTree | Snapshot, cls=None) -> CheckReport:
    """Run every check; ``failed`` is the first failure in :data:`CHECKS` order.

    ``cls`` overrides the class stored in the snapshot.
    """
    snap = _as_snapshot(st)
    if cls is not None and cls is not snap.cls:
        from dataclasses import replace

        snap = replace(snap, cls=cls)
    v = _View(snap)
    report = CheckReport(stage=snap.stage)
    for name in CHECKS:
        failure = _RUNNERS[name](v)
        if failure is None:
            report.passed.append(name)
        else:
            report.failures.append(failure)
    return report


def weight_of_active(st: LabelledTree | Snapshot) -> Dyadic:
    return weight(_as_snapshot(st).active)


def check_weight_ceiling(st: LabelledTree | Snapshot) -> bool:
    """``wgt(U_s) <= sum_{n <= dvls} 2**(n - l_n)``."""
    snap = _as_snapshot(st)
    cap = ZERO
    for n in range(snap.dvls + 1):
        cap += Dyadic.pow2(n - snap.schedule.level(n))
    return weight_of_active(snap) <= cap
