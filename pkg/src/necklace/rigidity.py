"""Dihedral relabelling, spec isomorphism and rigid homeomorphisms between necklaces.

A rigid map ``h: F -> G`` is described by one dihedral element per copy:
``h`` sends ``F_{w k}`` onto ``G_{h(w) sigma_w(k)}``.  Consistency is a
local condition.  Each copy carries pins: boundary points of ``F_w``
whose images in ``G_{h(w)}`` are already fixed by the ancestors.  A choice
``sigma_w`` is admissible when every pinned point, and every main node of
the copy, lands in exactly the image copies that contain its image.  Pins
are finite sets of main-node classes, so the reachable pin sets form a
finite automaton.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import prod

from .address import Address, GlueRule, NecklaceSpec, check_goodness, engine
from .errors import CapError

DEFAULT_RIGID_DEPTH = 6
MAX_STATES = 20_000


# --- the dihedral group ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class DihedralElement:
    """``s^reflected . tau^rotation`` acting on ``1..n``."""

    n: int
    reflected: bool
    rotation: int

    def __post_init__(self):
        object.__setattr__(self, "rotation", self.rotation % self.n)

    def __call__(self, k):
        k = (k - 1 + self.rotation) % self.n + 1
        return self.n - k + 1 if self.reflected else k

    @property
    def preserves_orientation(self):
        return not self.reflected

    def perm(self):
        return tuple(self(k) for k in range(1, self.n + 1))

    def compose(self, other):
        """``self . other`` (apply ``other`` first)."""
        return from_perm(self.n, tuple(self(other(k)) for k in range(1, self.n + 1)))

    def inverse(self):
        p = self.perm()
        inv = [0] * self.n
        for i, j in enumerate(p, start=1):
            inv[j - 1] = i
        return from_perm(self.n, tuple(inv))

    def index(self):
        return self.rotation + (self.n if self.reflected else 0)

    def name(self):
        if self.reflected:
            return "s" if self.rotation == 0 else f"s.tau^{self.rotation}"
        return "id" if self.rotation == 0 else f"tau^{self.rotation}"

    def __str__(self):
        return self.name()

    def to_json(self):
        return {"rotation": self.rotation, "reflected": self.reflected, "perm": list(self.perm())}


@lru_cache(maxsize=None)
def elements(n):
    """The 2n elements in canonical order: id, tau, ..., tau^{n-1}, s, s.tau, ..., s.tau^{n-1}."""
    return tuple(DihedralElement(n, refl, r) for refl in (False, True) for r in range(n))


@lru_cache(maxsize=None)
def _perm_table(n):
    return {g.perm(): g for g in elements(n)}


def from_perm(n, perm):
    g = _perm_table(n).get(tuple(perm))
    if g is None:
        raise ValueError(f"{perm} is not a dihedral permutation")
    return g


def identity(n):
    return elements(n)[0]


def tau(n):
    return elements(n)[1]


def reflection(n):
    return elements(n)[n]


# --- relabelling -----------------------------------------------------------------


def relabel_address(addr, perm):
    """Apply a symbol map (callable) to every symbol of an address."""
    return Address(tuple(perm(s) for s in addr.pre), tuple(perm(s) for s in addr.per))


def apply_sigma(spec, sigma):
    """The spec of the reordered NIFS ``g_k = f_{sigma(k)}``.

    Addresses are rewritten symbolwise by ``sigma^{-1}``; a reversing
    ``sigma`` swaps the roles of ``u`` and ``v``, because ``g_k`` and
    ``g_{k+1}`` then meet at ``z_{sigma(k)-1}``.
    """
    inv = sigma.inverse()
    glue = []
    for k in range(1, spec.n + 1):
        if sigma.preserves_orientation:
            r = spec.rule(sigma(k))
            u, v = r.u, r.v
        else:
            r = spec.rule(spec.pred(sigma(k)))
            u, v = r.v, r.u
        glue.append(GlueRule(k, relabel_address(u, inv), relabel_address(v, inv)))
    return NecklaceSpec(spec.n, tuple(glue), spec.label)


def _same_identifications(a, b):
    eng_a = engine(a)
    eng_b = engine(b)
    for k in range(1, a.n + 1):
        for x in b.node_addresses(k):
            if x not in eng_a.closure(a.node_addresses(k)[0]):
                return False
        for x in a.node_addresses(k):
            if x not in eng_b.closure(b.node_addresses(k)[0]):
                return False
    return True


def specs_equivalent(a, b):
    """Same glue table, or the same identifications with different representatives."""
    if a.n != b.n:
        return False
    return a.glue == b.glue or _same_identifications(a, b)


@dataclass
class IsomorphismResult:
    sigma: DihedralElement | None
    reason: str

    def __bool__(self):
        return self.sigma is not None

    def to_json(self):
        return {"isomorphic": self.sigma is not None,
                "sigma": self.sigma.to_json() if self.sigma else None,
                "reason": self.reason}


def all_isomorphisms(a, b):
    if a.n != b.n:
        return []
    return [g for g in elements(a.n) if specs_equivalent(apply_sigma(a, g), b)]


def spec_isomorphic(a, b):
    """Least dihedral ``sigma`` (canonical order) with ``apply_sigma(a, sigma) ~ b``."""
    if a.n != b.n:
        return IsomorphismResult(None, f"m=n fails: {a.n} != {b.n}")
    for g in elements(a.n):
        if specs_equivalent(apply_sigma(a, g), b):
            return IsomorphismResult(g, "found")
    return IsomorphismResult(None, "no dihedral relabelling matches")


# --- the rigid-map automaton -------------------------------------------------------


def _node_image(sigma, j, n):
    """Index of the G main node receiving z_j under a level-1 choice sigma."""
    return sigma(j) if sigma.preserves_orientation else (sigma(j) - 2) % n + 1


@dataclass
class RigidMapClosure:
    F: NecklaceSpec
    G: NecklaceSpec
    states: list
    transitions: dict
    live: set
    count: object
    depth: int
    reason: str = ""

    @property
    def closed(self):
        return self.count is not None

    @property
    def finite(self):
        return isinstance(self.count, int)

    def live_choices(self, s):
        return [g for g, kids in self.transitions.get(s, {}).items() if all(c in self.live for c in kids)]

    def to_json(self, with_maps=True):
        out = {
            "v": 1,
            "n": self.F.n,
            "root": 0,
            "states": [
                {"id": i, "pins": [[str(a), str(b)] for a, b in sorted(st)]} for i, st in enumerate(self.states)
            ],
            "transitions": [
                {"from": s, "sigma": g.name(), "children": list(kids)}
                for s in sorted(self.transitions)
                for g, kids in sorted(self.transitions[s].items(), key=lambda kv: kv[0].index())
            ],
            "accepting": sorted(self.live),
            "count": self.count,
            "depth": self.depth,
            "reason": self.reason,
        }
        if with_maps and self.finite:
            out["maps"] = [table_to_json(t) for t in self.map_tables(min(self.depth, 2))]
        return out

    def tables(self, depth, limit=10_000):
        """Distinct admissible choice tables on words shorter than ``depth``."""
        if not self.live or 0 not in self.live:
            return []
        n = self.F.n
        out = []

        def expand(frontier, table):
            # frontier: list of (word, state) still to assign
            if len(out) >= limit:
                return
            if not frontier:
                out.append(dict(table))
                return
            (w, s), rest = frontier[0], frontier[1:]
            for g in self.live_choices(s):
                table[w] = g
                kids = self.transitions[s][g]
                nxt = rest + ([(w + (k,), kids[k - 1]) for k in range(1, n + 1)] if len(w) + 1 < depth else [])
                expand(nxt, table)
                del table[w]

        if depth <= 0:
            return [{}]
        expand([((), 0)], {})
        return out

    def map_tables(self, depth):
        return self.tables(depth)

    def admits(self, table, depth=None):
        """Whether a per-copy choice table (word -> element) is consistent with the automaton."""
        if 0 not in self.live:
            return False
        depth = depth if depth is not None else 1 + max((len(w) for w in table), default=-1)
        stack = [((), 0)]
        while stack:
            w, s = stack.pop()
            if len(w) >= depth:
                continue
            g = table.get(w)
            if g is None or g not in self.transitions.get(s, {}) or g not in self.live_choices(s):
                return False
            for k, c in enumerate(self.transitions[s][g], start=1):
                stack.append((w + (k,), c))
        return True


def table_to_json(table):
    return {("".join(map(str, w)) or "e"): g.name() for w, g in sorted(table.items(), key=lambda kv: (len(kv[0]), kv[0]))}


def image_word(table, w):
    out = []
    for i in range(len(w)):
        out.append(table[w[:i]](w[i]))
    return tuple(out)


def compose_tables(t2, t1, depth):
    """Table of ``h2 . h1`` on words shorter than ``depth``."""
    out = {}
    n = next(iter(t1.values())).n
    for L in range(depth):
        for w in product(range(1, n + 1), repeat=L):
            out[w] = t2[image_word(t1, w)].compose(t1[w])
    return out


def invert_table(t, depth):
    out = {}
    n = next(iter(t.values())).n
    for L in range(depth):
        for w in product(range(1, n + 1), repeat=L):
            out[image_word(t, w)] = t[w].inverse()
    return out


def _firsts(cls):
    return frozenset(r.first for r in cls.representatives)


def rigid_maps(F, G, depth=DEFAULT_RIGID_DEPTH, max_states=MAX_STATES):
    """Build the rigid-map automaton from F to G and count the maps it admits.

    ``count`` is an int, ``"countably infinite"`` or ``"uncountable"``.
    """
    if F.n != G.n:
        return RigidMapClosure(F, G, [], {}, set(), 0, depth, f"m=n fails: {F.n} != {G.n}")
    n = F.n
    eng_f, eng_g = engine(F), engine(G)
    zf = [eng_f.closure(F.node_addresses(k)[0]) for k in range(1, n + 1)]
    zg = [eng_g.closure(G.node_addresses(k)[0]) for k in range(1, n + 1)]
    group = elements(n)

    states = [frozenset()]
    index = {frozenset(): 0}
    level = [0]
    transitions = {}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        pins = [(eng_f.closure(a), eng_g.closure(b)) for a, b in states[s]]
        moves = {}
        for g in group:
            full = pins + [(zf[j - 1], zg[_node_image(g, j, n) - 1]) for j in range(1, n + 1)]
            if any(frozenset(g(i) for i in _firsts(a)) != _firsts(b) for a, b in full):
                continue
            kids = []
            for k in range(1, n + 1):
                child = set()
                for a, b in full:
                    ta = eng_f.tail_class(a, k)
                    if ta is not None:
                        tb = eng_g.tail_class(b, g(k))
                        child.add((ta.canonical, tb.canonical))
                child = frozenset(child)
                if child not in index:
                    if len(states) >= max_states:
                        raise CapError(f"rigid-map automaton exceeds {max_states} states")
                    if level[s] + 1 > depth:
                        return RigidMapClosure(F, G, states, transitions, set(), None, depth,
                                               f"open at depth {depth}: new constraint contexts still appearing")
                    index[child] = len(states)
                    states.append(child)
                    level.append(level[s] + 1)
                    queue.append(index[child])
                kids.append(index[child])
            moves[g] = tuple(kids)
        transitions[s] = moves

    live = _greatest_live(transitions, len(states))
    count = _count_maps(transitions, live, len(states))
    return RigidMapClosure(F, G, states, transitions, live, count, depth, "closed")


def _greatest_live(transitions, size):
    live = set(range(size))
    changed = True
    while changed:
        changed = False
        for s in list(live):
            if not any(all(c in live for c in kids) for kids in transitions[s].values()):
                live.discard(s)
                changed = True
    return live


def _live_moves(transitions, live, s):
    return [(g, kids) for g, kids in transitions[s].items() if all(c in live for c in kids)]


def _reachable(transitions, live, start):
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for _, kids in _live_moves(transitions, live, s):
            for c in kids:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
    return seen


def _count_maps(transitions, live, size):
    if 0 not in live:
        return 0
    reach = _reachable(transitions, live, 0)
    if _has_perfect_kernel(transitions, live, reach):
        return "uncountable"
    counts = {s: 1 for s in reach}
    history = []
    for _ in range(2 * size + 4):
        counts = {s: sum(prod(counts[c] for c in kids) for _, kids in _live_moves(transitions, live, s)) for s in reach}
        history.append(counts[0])
        if len(history) >= size + 2 and len(set(history[-(size + 2):])) == 1:
            return history[-1]
    return history[-1] if len(set(history[-3:])) == 1 else "countably infinite"


def _has_perfect_kernel(transitions, live, reach):
    """True when some reachable state has two distinct partial maps both returning to it.

    Repeating the two alternatives independently at each return yields
    continuum many maps; without such a state the admitted set is countable.
    """
    down = {s: _reachable(transitions, live, s) for s in reach}

    def reaches(t, u):
        return t == u or u in down[t]

    multi = {s: any(len(_live_moves(transitions, live, t)) >= 2 for t in down[s] | {s}) for s in reach}
    for u in reach:
        # Q(t): two distinct partial maps from t, each with a frontier at u (least fixpoint)
        q = set()
        changed = True
        while changed:
            changed = False
            for t in down[u] | {u}:
                if t in q or u not in down[t] | {t}:
                    continue
                moves = _live_moves(transitions, live, t)
                hitting = [kids for _, kids in moves if any(reaches(c, u) for c in kids)]
                ok = len(hitting) >= 2
                if not ok:
                    for kids in hitting:
                        idx = [i for i, c in enumerate(kids) if reaches(c, u)]
                        if any(multi[c] for i, c in enumerate(kids) if any(j != i for j in idx)):
                            ok = True
                            break
                        if any(kids[i] in q for i in idx):
                            ok = True
                            break
                if ok:
                    q.add(t)
                    changed = True
        if u in q:
            return True
    return False


# --- whole-theorem checks ------------------------------------------------------------


def relabel_point(spec_to, cls, sigma):
    inv = sigma.inverse()
    return engine(spec_to).closure(relabel_address(cls.canonical, inv))


@dataclass
class UniquenessReport:
    label: str
    good: bool
    skipped: bool
    per_sigma: list

    @property
    def ok(self):
        return (not self.skipped) and all(r["passed"] for r in self.per_sigma)

    def to_json(self):
        out = {"v": 1, "label": self.label, "good": self.good, "skipped": self.skipped, "ok": self.ok,
               "per_sigma": self.per_sigma}
        if self.skipped:
            out["warning"] = "spec is not good; uniqueness hypothesis fails, suite skipped"
        return out


def verify_nifs_uniqueness(spec, L=2, window=2, max_level=10, force=False):
    """For each sigma: the relabelled spec is isomorphic, good, and has the relabelled survey."""
    from .cuts import survey_extremal

    good = check_goodness(spec).good
    if not good and not force:
        return UniquenessReport(spec.label, good, True, [])
    base = survey_extremal(spec, L, window, max_level)
    rows = []
    for g in elements(spec.n):
        other = apply_sigma(spec, g)
        iso = spec_isomorphic(other, spec)
        survey = survey_extremal(other, L, window, max_level)
        expected = sorted(tuple(sorted(relabel_point(other, p, g).canonical for p in r.points)) for r in base.extremal_cuts)
        same = survey.extremal_sets == expected and survey.N2 == base.N2
        g_good = check_goodness(other).good
        rows.append({
            "sigma": g.name(),
            "isomorphic": bool(iso),
            "good": g_good,
            "survey_matches": same,
            "N2": survey.N2,
            "passed": bool(iso) and g_good and same,
        })
    return UniquenessReport(spec.label, good, False, rows)


def embedding_image_copy_check(F, w, table, depth=4):
    """Image of ``f_w . h`` at every level up to ``depth`` is exactly the cylinder set of copy ``w``."""
    w = tuple(w)
    n = F.n
    levels = []
    for L in range(depth + 1):
        words = list(product(range(1, n + 1), repeat=L))
        image = {w + image_word(table, u) for u in words}
        expected = {w + u for u in words}
        levels.append({"level": len(w) + L, "ok": image == expected})
    return {"copy": "".join(map(str, w)) or "e", "ok": all(x["ok"] for x in levels), "levels": levels}
