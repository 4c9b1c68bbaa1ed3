"""Straight-line reference run of the labelling construction.

Deliberately naive: the state is just the list of placements, D and the set of
explicitly deactivated strings; leaves, saturation and active clones are
recomputed from scratch by enumeration every time.  Shares no code with the
engine beyond plain schedules and classes.
"""

from itertools import product


def _strings(n):
    return ["".join(p) for p in product("01", repeat=n)]


class ReferenceRun:
    def __init__(self, levels, q_at):
        self.levels = levels  # list of ints, long enough for the run
        self.q_at = q_at  # stage -> set of strings
        self.placements = []  # (stage, string, sigma)
        self.D = []
        self.stage = 0
        self.events = []
        root = "0" * levels[0]
        self.placements.append((0, root, ""))
        self.events.append({"kind": "Init", "stage": 0, "placements": [[root, ""]], "deactivations": [], "d_append": None})
        self.deactivated = set()

    def label(self, s):
        for _, t, sigma in self.placements:
            if t == s:
                return sigma
        return None

    def labelled(self):
        return [t for _, t, _ in self.placements]

    def active(self):
        last = {}
        for _, t, sigma in self.placements:
            last[sigma] = t
        return set(last.values())

    def leaves(self):
        lab = self.labelled()
        return sorted(t for t in lab if not any(u != t and u.startswith(t) for u in lab))

    def saturated(self, rho):
        if rho == "":
            nxt = self.levels[0]
        else:
            nxt = self.levels[self.levels.index(len(rho)) + 1]
        lab = set(self.labelled())
        return all(rho + e in lab for e in _strings(nxt - len(rho)))

    def active_clone(self, s):
        if s == "":
            return ""
        sigma = self.label(s)
        holder = None
        for _, t, lab in self.placements:
            if lab == sigma:
                holder = t
        return holder

    def step(self):
        q = self.q_at(self.stage)
        candidates = [leaf for leaf in self.leaves() if leaf not in self.D and any(leaf.startswith(x) for x in q)]
        self.stage += 1
        if not candidates:
            dv = max(len(sig) for _, _, sig in self.placements)
            target = self.levels[dv + 1]
            act = self.active()
            placed = []
            for rho in self.leaves():
                if rho in act:
                    sigma = self.label(rho)
                    placed.append([rho + "0" * (target - len(rho)), sigma + "0"])
                    placed.append([rho + "1" * (target - len(rho)), sigma + "1"])
            for s, sig in placed:
                self.placements.append((self.stage, s, sig))
            ev = {"kind": "Expansionary", "stage": self.stage, "placements": placed, "deactivations": [], "d_append": None}
            self.events.append(ev)
            return ev
        delta = min(candidates)
        self.D.append(delta)
        alphas = [""] + [delta[:li] for li in self.levels if li <= len(delta)]
        k = len(alphas) - 1
        betas = [self.active_clone(a) for a in alphas]
        j0 = None
        for j in range(k):
            if not self.saturated(betas[j]):
                j0 = j
        if j0 is None:
            ev = {"kind": "Terminated", "stage": self.stage, "placements": [], "deactivations": [], "d_append": delta}
            self.events.append(ev)
            return ev
        beta = betas[j0]
        nxt = self.levels[0] if beta == "" else self.levels[self.levels.index(len(beta)) + 1]
        lab = set(self.labelled())
        eta = None
        for e in _strings(len(delta) - len(beta)):
            cand = beta + e
            if cand[:nxt] not in lab:
                eta = cand
                break
        placed = []
        for li in self.levels:
            if len(beta) < li <= len(delta):
                placed.append([eta[:li], self.label(delta[:li])])
        for s, sig in placed:
            self.placements.append((self.stage, s, sig))
        ev = {"kind": "Adaptive", "stage": self.stage, "placements": placed, "deactivations": betas[j0 + 1 :], "d_append": delta}
        self.events.append(ev)
        return ev


def reference_trace(schedule, cls, stages):
    levels = [schedule.level(i) for i in range(stages + 2)]
    run = ReferenceRun(levels, cls.strings_at)
    for _ in range(stages):
        if run.step()["kind"] == "Terminated":
            break
    return run.events
