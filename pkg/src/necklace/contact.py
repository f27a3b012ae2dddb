"""Level-m contact graphs and component/articulation analysis.

The level-m model of a necklace is a bipartite graph: one vertex per
cylinder (word of length m) and one per contact point (a point class whose
representatives begin with at least two distinct level-m words).  Removing a
finite point set deletes the corresponding contact vertices.  Whenever every
cylinder holds at most one removed point and copies have no cut points, the
graph components are exactly the components of the complement; coarser
levels can only under-count components, so counts rise monotonically with
the level and are stabilised over a window of consecutive levels.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from . import kernels
from .address import DEFAULT_DEPTH, as_point, engine, fmt_word
from .errors import CapError

DEFAULT_MAX_CELLS = 200_000
DEFAULT_WINDOW = 2
DEFAULT_MAX_LEVEL = 10
STABILISATION_NOTE = "component counts stabilised by a level window (heuristic; no proven bound)"


def max_cells():
    return int(os.environ.get("NECKLACE_MAX_CELLS", DEFAULT_MAX_CELLS))


def class_depth(level):
    return max(DEFAULT_DEPTH, level + 4)


@dataclass(frozen=True)
class ContactPoint:
    point: object
    incident: tuple


class ContactGraph:
    """Cylinders ``0..C-1`` followed by contacts ``C..C+P-1`` in one CSR graph."""

    def __init__(self, spec, level, contacts):
        self.spec = spec
        self.level = level
        self.n = spec.n
        self.num_cylinders = spec.n**level
        self.contacts = tuple(contacts)
        C = self.num_cylinders
        cyl_lists = [[self.cylinder_index(w) for w in c.incident] for c in self.contacts]
        sizes = np.fromiter((len(x) for x in cyl_lists), dtype=np.int64, count=len(cyl_lists))
        self.contact_indptr = np.zeros(len(cyl_lists) + 1, dtype=np.int64)
        np.cumsum(sizes, out=self.contact_indptr[1:])
        self.contact_cyl = np.fromiter((i for x in cyl_lists for i in x), dtype=np.int32, count=int(sizes.sum()))
        # adjacency: cylinder -> contacts, contact -> cylinders
        contact_ids = np.repeat(np.arange(len(cyl_lists), dtype=np.int32) + C, sizes)
        src = np.concatenate([self.contact_cyl, contact_ids])
        dst = np.concatenate([contact_ids, self.contact_cyl])
        order = np.argsort(src, kind="stable")
        self.indices = np.ascontiguousarray(dst[order], dtype=np.int32)
        counts = np.bincount(src, minlength=C + len(cyl_lists))
        self.indptr = np.zeros(C + len(cyl_lists) + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self._rep_index = {}
        for i, c in enumerate(self.contacts):
            for r in c.point.representatives:
                self._rep_index[r] = i

    @property
    def num_vertices(self):
        return self.num_cylinders + len(self.contacts)

    def cylinder_index(self, word):
        idx = 0
        for s in word:
            idx = idx * self.n + (s - 1)
        return idx

    def cylinder_word(self, idx):
        out = []
        for _ in range(self.level):
            idx, r = divmod(idx, self.n)
            out.append(r + 1)
        return tuple(reversed(out))

    def contact_of(self, point):
        """Index of the contact vertex for ``point`` (any shared representative), else None."""
        for r in point.representatives:
            i = self._rep_index.get(r)
            if i is not None:
                return i
        return None

    def cylinders_of(self, point):
        """Indices of level cylinders containing the point."""
        return sorted({self.cylinder_index(r.head(self.level)) for r in point.representatives})

    def components(self, alive):
        return kernels.component_labels(self.indptr, self.indices, alive)

    def closure_alive(self, cyl_mask):
        """Alive mask: the given cylinders plus contacts shared by two of them."""
        C = self.num_cylinders
        alive = np.zeros(self.num_vertices, dtype=np.uint8)
        alive[:C] = cyl_mask
        if len(self.contacts):
            hits = cyl_mask[self.contact_cyl].astype(np.int64)
            counts = np.add.reduceat(hits, self.contact_indptr[:-1])
            alive[C:] = counts >= 2
        return alive

    def articulation_contacts(self, alive):
        mask = kernels.articulation_mask(self.indptr, self.indices, alive)
        return np.flatnonzero(mask[self.num_cylinders:])

    def is_connected(self):
        labels = self.components(np.ones(self.num_vertices, dtype=np.uint8))
        return int(labels.max(initial=-1)) == 0

    def to_json(self):
        n = self.n
        return {
            "v": 1,
            "level": self.level,
            "cylinders": [fmt_word(self.cylinder_word(i), n) for i in range(self.num_cylinders)],
            "contacts": [
                {"canonical": str(c.point.canonical), "incident": [fmt_word(w, n) for w in c.incident]}
                for c in self.contacts
            ],
        }

    def to_dot(self):
        n = self.n
        lines = [f'graph "level{self.level}" {{', "  node [shape=box];"]
        for i in range(self.num_cylinders):
            lines.append(f'  "c{fmt_word(self.cylinder_word(i), n)}";')
        for i, c in enumerate(self.contacts):
            lines.append(f'  "p{i}" [shape=point, xlabel="{c.point.canonical}"];')
            for w in c.incident:
                lines.append(f'  "p{i}" -- "c{fmt_word(w, n)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _check_cap(spec, m):
    cap = max_cells()
    if spec.n**m > cap:
        raise CapError(f"level {m} needs {spec.n}^{m} = {spec.n**m} cylinders, above cap {cap} (NECKLACE_MAX_CELLS)")


@lru_cache(maxsize=16)
def build_contact_graph(spec, m):
    """Level-``m`` contact graph with lexicographically ordered cylinders and contacts."""
    if m < 0:
        raise ValueError("level must be >= 0")
    _check_cap(spec, m)
    eng = engine(spec, class_depth(m))
    nodes = [spec.node_addresses(k)[0] for k in range(1, spec.n + 1)]
    found = {}
    for j in range(m):
        for p in product(range(1, spec.n + 1), repeat=j):
            for a in nodes:
                cls = eng.closure(a.prepend(p))
                if cls.canonical in found:
                    continue
                incident = tuple(sorted({r.head(m) for r in cls.representatives}))
                if len(incident) >= 2:
                    found[cls.canonical] = ContactPoint(cls, incident)
    contacts = [found[key] for key in sorted(found)]
    return ContactGraph(spec, m, contacts)


@dataclass
class Component:
    index: int
    level: int
    cyl_idx: np.ndarray = field(repr=False)
    boundary: tuple
    n: int = field(repr=False, default=0)

    @property
    def size(self):
        return len(self.cyl_idx)

    def words(self):
        out = []
        for idx in self.cyl_idx.tolist():
            w = []
            for _ in range(self.level):
                idx, r = divmod(idx, self.n)
                w.append(r + 1)
            out.append(tuple(reversed(w)))
        return out

    def least_word(self):
        return self.words()[0] if self.size else ()

    def avoids_prefix(self, word):
        L = len(word)
        return all(w[:L] != tuple(word) for w in self.words())

    def to_json(self):
        return {
            "least_cylinder": fmt_word(self.least_word(), self.n),
            "cylinders": self.size,
            "level": self.level,
            "boundary": [str(p.canonical) for p in self.boundary],
        }


@dataclass
class ComponentSet:
    removed: tuple
    components: list
    stable_at: int
    history: list
    window: int

    def __len__(self):
        return len(self.components)

    def to_json(self):
        return {
            "removed": [str(p.canonical) for p in self.removed],
            "count": len(self.components),
            "stable_at": self.stable_at,
            "window": self.window,
            "history": [{"level": lv, "count": c} for lv, c in self.history],
            "components": [c.to_json() for c in self.components],
            "note": STABILISATION_NOTE,
        }


def separation_level(points, cap=32):
    """Least level at which no single cylinder holds two of the points."""
    level = 0
    for p, q in combinations(points, 2):
        common = 0
        heads_q = q.representatives
        for length in range(1, cap + 1):
            hp = {r.head(length) for r in p.representatives}
            if not hp & {r.head(length) for r in heads_q}:
                break
            common = length
        else:
            raise CapError(f"points {p} and {q} share cylinders up to level {cap}")
        level = max(level, common + 1)
    return level


def default_start_level(spec, points):
    """Deepest defining level + 2, raised to the separation level."""
    eng = engine(spec, DEFAULT_DEPTH)
    levels = [eng.defining_level(p) for p in points]
    base = max((lv + 2 for lv in levels if lv is not None), default=1)
    return max(base, separation_level(points), 1)


def _components_at(graph, points):
    C = graph.num_cylinders
    alive = np.ones(graph.num_vertices, dtype=np.uint8)
    for p in points:
        i = graph.contact_of(p)
        if i is not None:
            alive[C + i] = 0
    labels = graph.components(alive)[:C]
    count = int(labels.max(initial=-1)) + 1
    groups = [np.flatnonzero(labels == c) for c in range(count)]
    where = []
    for p in points:
        where.append(set(labels[graph.cylinders_of(p)].tolist()))
    comps = []
    for c, idx in enumerate(groups):
        boundary = tuple(p for p, labs in zip(points, where) if c in labs)
        comps.append(Component(c, graph.level, idx, boundary, graph.n))
    return comps


def _signature(comps):
    return tuple(sorted(tuple(sorted(str(p.canonical) for p in c.boundary)) for c in comps))


def components_minus(spec, S, m0=None, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    """Components of ``F minus S`` from the level-escalated contact graph."""
    points = tuple(sorted({as_point(spec, p) for p in S}, key=lambda p: p.canonical))
    start = default_start_level(spec, points) if points else 1
    if m0 is not None:
        eng = engine(spec, DEFAULT_DEPTH)
        needed = max([eng.defining_level(p) + 1 for p in points if eng.defining_level(p) is not None] + [separation_level(points), 1])
        start = max(m0, needed)
    if window < 1:
        raise ValueError("window must be >= 1")
    history = []
    results = []
    m = start
    while True:
        if m > max_level:
            raise CapError(f"components of F minus {[str(p) for p in points]} not stable by level {max_level}")
        comps = _components_at(build_contact_graph(spec, m), points)
        history.append((m, len(comps)))
        results.append((m, comps, _signature(comps)))
        if len(results) >= window and len({sig for _, _, sig in results[-window:]}) == 1:
            level, comps, _ = results[-window]
            return ComponentSet(points, comps, level, history, window)
        m += 1


def _closure_cut_points_at(graph, cyl_mask):
    alive = graph.closure_alive(cyl_mask)
    arts = graph.articulation_contacts(alive)
    return tuple(sorted(graph.contacts[i].point.canonical for i in arts.tolist()))


def closure_cut_points(spec, comp, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    """Cut points of the closure of a component, stabilised over levels.

    Returns ``(canonical addresses, stable level)``.
    """
    level = comp.level
    idx = comp.cyl_idx.astype(np.int64)
    seen = []
    while True:
        if level > max_level:
            raise CapError(f"cut points of component closure not stable by level {max_level}")
        graph = build_contact_graph(spec, level)
        mask = np.zeros(graph.num_cylinders, dtype=np.uint8)
        mask[idx] = 1
        seen.append((level, _closure_cut_points_at(graph, mask)))
        if len(seen) >= window and len({s for _, s in seen[-window:]}) == 1:
            return seen[-window][1], seen[-window][0]
        idx = (idx[:, None] * spec.n + np.arange(spec.n)).ravel()
        level += 1


def ncp_closure(spec, comp, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    return len(closure_cut_points(spec, comp, window, max_level)[0])


@dataclass
class CutVerdict:
    points: tuple
    cut: bool
    components: ComponentSet
    subsets: list

    def to_json(self):
        return {
            "points": [str(p.canonical) for p in self.points],
            "cut": self.cut,
            "components": self.components.to_json(),
            "subsets": [{"points": [str(p.canonical) for p in s], "count": c} for s, c in self.subsets],
        }


@lru_cache(maxsize=4096)
def _count_minus(spec, key, window, max_level):
    return len(components_minus(spec, key, None, window, max_level))


def is_cut(spec, S, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    """A finite set is a cut when removing it disconnects and no proper subset does."""
    points = tuple(sorted({as_point(spec, p) for p in S}, key=lambda p: p.canonical))
    if not points:
        raise ValueError("cut candidates must be nonempty")
    comps = components_minus(spec, points, None, window, max_level)
    subsets = []
    minimal = True
    for size in range(1, len(points)):
        for sub in combinations(points, size):
            count = _count_minus(spec, sub, window, max_level)
            subsets.append((sub, count))
            if count != 1:
                minimal = False
    return CutVerdict(points, len(comps) >= 2 and minimal, comps, subsets)


def is_cut_point(spec, p, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    point = as_point(spec, p)
    return _count_minus(spec, (point,), window, max_level) >= 2


# --- copies and their complements -------------------------------------------------


def copy_boundary(spec, w):
    """Points of ``F_w`` shared with cylinders outside it (exact at level ``|w|``)."""
    w = tuple(w)
    if not w:
        return ()
    graph = build_contact_graph(spec, len(w))
    target = graph.cylinder_index(w)
    out = []
    for c in graph.contacts:
        if w in c.incident and any(graph.cylinder_index(x) != target for x in c.incident):
            out.append(c.point)
    return tuple(out)


def _outside_mask(graph, w):
    L = len(w)
    lo = 0
    for s in w:
        lo = lo * graph.n + (s - 1)
    span = graph.n ** (graph.level - L)
    mask = np.ones(graph.num_cylinders, dtype=np.uint8)
    mask[lo * span:(lo + 1) * span] = 0
    return mask


def complement_components(spec, w, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    """Number of components of ``F minus F_w`` (stabilised)."""
    w = tuple(w)
    if not w:
        return 0
    boundary = copy_boundary(spec, w)
    level = max(len(w) + 1, separation_level(boundary) if len(boundary) > 1 else 0)
    seen = []
    while True:
        if level > max_level:
            raise CapError(f"complement of copy {fmt_word(w)} not stable by level {max_level}")
        graph = build_contact_graph(spec, level)
        C = graph.num_cylinders
        mask = _outside_mask(graph, w)
        alive = np.zeros(graph.num_vertices, dtype=np.uint8)
        alive[:C] = mask
        alive[C:] = 1
        for p in boundary:
            i = graph.contact_of(p)
            if i is not None:
                alive[C + i] = 0
        # contacts inside F_w never touch an outside cylinder; they stay isolated
        labels = graph.components(alive)[:C]
        count = len(set(labels[mask.astype(bool)].tolist()))
        seen.append(count)
        if len(seen) >= window and len(set(seen[-window:])) == 1:
            return count
        level += 1


def complement_closure_cut_points(spec, w, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    """Cut points of the closure of ``F minus F_w``."""
    w = tuple(w)
    boundary = copy_boundary(spec, w)
    level = max(len(w) + 1, separation_level(boundary) if len(boundary) > 1 else 0)
    seen = []
    while True:
        if level > max_level:
            raise CapError(f"closure of complement of {fmt_word(w)} not stable by level {max_level}")
        graph = build_contact_graph(spec, level)
        seen.append(_closure_cut_points_at(graph, _outside_mask(graph, w)))
        if len(seen) >= window and len(set(seen[-window:])) == 1:
            return seen[-1]
        level += 1
