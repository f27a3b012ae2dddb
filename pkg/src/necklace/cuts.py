"""Cut invariants: N(A, F), the 2-cut survey, extremal components, theorem checks."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product

from .address import check_goodness, main_nodes
from .contact import (
    DEFAULT_MAX_LEVEL,
    DEFAULT_WINDOW,
    STABILISATION_NOTE,
    closure_cut_points,
    complement_closure_cut_points,
    complement_components,
    copy_boundary,
    is_cut,
    is_cut_point,
)
from .errors import NotACutError

DEFAULT_LEVEL_CAP = 2


def _key(points):
    return tuple(sorted(p.canonical for p in points))


def _fmt_points(points):
    return [str(p.canonical) for p in sorted(points, key=lambda p: p.canonical)]


@dataclass
class CutReport:
    points: tuple
    is_cut: bool
    components: object
    ncp_per_component: list
    N: int
    cut_points_per_component: list = field(default_factory=list)

    @property
    def extremal_indices(self):
        return [i for i, v in enumerate(self.ncp_per_component) if v == self.N]

    def to_json(self):
        comps = self.components.to_json()
        for c, ncp in zip(comps["components"], self.ncp_per_component):
            c["ncp"] = ncp
        return {
            "points": _fmt_points(self.points),
            "is_cut": self.is_cut,
            "N": self.N,
            "ncp": list(self.ncp_per_component),
            "extremal_components": self.extremal_indices,
            "components": comps,
        }


def _report_from_verdict(spec, verdict, window, max_level):
    ncp, cps = [], []
    for comp in verdict.components.components:
        found, _ = closure_cut_points(spec, comp, window, max_level)
        cps.append(found)
        ncp.append(len(found))
    return CutReport(verdict.points, True, verdict.components, ncp, max(ncp), cps)


def n_of_cut(spec, S, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    """N(S, F): the largest cut-point count over closures of components of F minus S."""
    verdict = is_cut(spec, S, window, max_level)
    if not verdict.cut:
        raise NotACutError(f"{_fmt_points(verdict.points)} is not a cut")
    return _report_from_verdict(spec, verdict, window, max_level)


def copy_words(n, max_len):
    for L in range(max_len + 1):
        yield from product(range(1, n + 1), repeat=L)


def candidate_2cuts(spec, L=DEFAULT_LEVEL_CAP, raw=False):
    """Pairs of main nodes of a common copy of level <= L.

    A 2-cut's points are main nodes of the smallest copy in which they still
    form a cut, so these pairs exhaust every 2-cut whose witness copy has
    level <= L.  Returns deduplicated pairs in canonical order; with
    ``raw=True`` returns ``(pairs, raw_count)``.
    """
    if L < 0:
        raise ValueError("level cap must be >= 0")
    seen = {}
    raw_count = 0
    for w in copy_words(spec.n, L):
        nodes = main_nodes(spec, w)
        for p, q in combinations(nodes, 2):
            raw_count += 1
            if p.canonical == q.canonical:
                continue
            seen.setdefault(_key((p, q)), (p, q) if p.canonical < q.canonical else (q, p))
    pairs = [seen[k] for k in sorted(seen)]
    return (pairs, raw_count) if raw else pairs


def node_pair_cuts(spec):
    """The cuts {z_{k-1}, z_k} in order k = 1..n."""
    z = main_nodes(spec)
    return [(z[spec.pred(k) - 1], z[k - 1]) for k in range(1, spec.n + 1)]


def cut_points_among_nodes(spec, level=3, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    """Main-node classes of copies up to ``level`` that are cut points of F."""
    classes = {}
    for w in copy_words(spec.n, level):
        for p in main_nodes(spec, w):
            classes.setdefault(p.canonical, p)
    return [classes[c] for c in sorted(classes) if is_cut_point(spec, classes[c], window, max_level)]


@dataclass
class ExtremalSurvey:
    spec_label: str
    n: int
    level_cap: int
    candidates_raw: int
    candidates_examined: int
    N2: int
    extremal_cuts: list
    cuts: list
    verdicts: dict
    window: int
    max_level: int

    @property
    def extremal_sets(self):
        return sorted(_key(r.points) for r in self.extremal_cuts)

    def to_json(self):
        return {
            "v": 1,
            "label": self.spec_label,
            "n": self.n,
            "N2": self.N2,
            "extremal": [r.to_json() for r in self.extremal_cuts],
            "candidates": self.candidates_examined,
            "candidates_raw": self.candidates_raw,
            "cuts_found": len(self.cuts),
            "caps": {"level_cap": self.level_cap, "window": self.window, "max_level": self.max_level},
            "verdicts": self.verdicts,
            "note": STABILISATION_NOTE,
        }


def _evaluate(spec, pair, window, max_level):
    verdict = is_cut(spec, pair, window, max_level)
    if not verdict.cut:
        return None
    return _report_from_verdict(spec, verdict, window, max_level)


def survey_extremal(spec, L=DEFAULT_LEVEL_CAP, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL, threads=1):
    """Run the cut check and N over all candidate 2-cuts up to copy level L."""
    pairs, raw = candidate_2cuts(spec, L, raw=True)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda p: _evaluate(spec, p, window, max_level), pairs))
    else:
        results = [_evaluate(spec, p, window, max_level) for p in pairs]
    cuts = [r for r in results if r is not None]
    N2 = max((r.N for r in cuts), default=0)
    extremal = [r for r in cuts if r.N == N2]
    predicted = sorted(_key(p) for p in node_pair_cuts(spec))
    found = sorted(_key(r.points) for r in extremal)
    verdicts = {
        "good": check_goodness(spec).good,
        "N2_equals_n_minus_2": N2 == spec.n - 2,
        "N2_at_most_n_minus_2": N2 <= spec.n - 2,
        "node_pairs_extremal": all(k in found for k in predicted),
        "extremal_equals_node_pairs": found == predicted,
        "extra_extremal": [[str(a) for a in k] for k in found if k not in predicted],
    }
    return ExtremalSurvey(spec.label, spec.n, L, raw, len(pairs), N2, extremal, cuts, verdicts, window, max_level)


@dataclass
class ExtremalComponentReport:
    k: int
    cut: CutReport
    external: int
    extremal: list
    external_extremal: bool
    unique: bool

    def to_json(self):
        return {
            "k": self.k,
            "cut": self.cut.to_json(),
            "external_component": self.external,
            "extremal_components": self.extremal,
            "external_extremal": self.external_extremal,
            "unique": self.unique,
        }


def extremal_components(spec, k, window=DEFAULT_WINDOW, max_level=DEFAULT_MAX_LEVEL):
    """Which components of F minus {z_{k-1}, z_k} attain N; is the external one F minus F_k among them."""
    if not 1 <= k <= spec.n:
        raise ValueError(f"k must lie in 1..{spec.n}")
    report = n_of_cut(spec, node_pair_cuts(spec)[k - 1], window, max_level)
    comps = report.components.components
    external = [c.index for c in comps if c.avoids_prefix((k,))]
    ext = external[0] if len(external) == 1 else -1
    extremal = report.extremal_indices
    return ExtremalComponentReport(k, report, ext, extremal, ext in extremal, extremal == [ext])


@dataclass
class Claim:
    name: str
    asserted: bool
    passed: bool
    detail: dict

    def to_json(self):
        return {"claim": self.name, "asserted": self.asserted, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteReport:
    label: str
    good: bool
    no_cut_points: bool
    claims: list

    @property
    def ok(self):
        return all(c.passed for c in self.claims if c.asserted)

    def to_json(self):
        return {
            "v": 1,
            "label": self.label,
            "good": self.good,
            "no_cut_points": self.no_cut_points,
            "ok": self.ok,
            "claims": [c.to_json() for c in self.claims],
        }


def copies_with_boundary(spec, level, size=2):
    for w in copy_words(spec.n, level):
        if w and len(copy_boundary(spec, w)) == size:
            yield w


def verify_theorem_suite(spec, L=DEFAULT_LEVEL_CAP, copy_level=3, node_level=3, window=DEFAULT_WINDOW,
                         max_level=DEFAULT_MAX_LEVEL, threads=1):
    """Check the 2-cut theorems and the copy-complement lemma on one spec.

    Claims whose hypotheses fail are still computed but marked not asserted.
    """
    good = check_goodness(spec).good
    cps = cut_points_among_nodes(spec, node_level, window, max_level)
    no_cp = not cps
    n = spec.n
    survey = survey_extremal(spec, L, window, max_level, threads)
    claims = [
        Claim("no_cut_points_among_nodes", good, no_cp, {"node_level": node_level, "cut_points": _fmt_points(cps)}),
        Claim("N2_equals_n_minus_2", no_cp, survey.N2 == n - 2 and survey.verdicts["node_pairs_extremal"],
              {"N2": survey.N2, "n": n, "level_cap": L}),
        Claim("N_at_most_n_minus_2", no_cp, all(r.N <= n - 2 for r in survey.cuts),
              {"violations": [_fmt_points(r.points) for r in survey.cuts if r.N > n - 2]}),
        Claim("only_node_pair_extremal", good, survey.verdicts["extremal_equals_node_pairs"],
              {"extra": survey.verdicts["extra_extremal"]}),
    ]
    ext = [extremal_components(spec, k, window, max_level) for k in range(1, n + 1)]
    claims.append(Claim("external_component_extremal", no_cp, all(r.external_extremal for r in ext),
                        {"per_k": {str(r.k): r.extremal for r in ext}}))
    claims.append(Claim("external_component_unique", good, all(r.unique for r in ext),
                        {"per_k": {str(r.k): r.unique for r in ext}}))
    disconnected = [w for w in copy_words(n, copy_level) if w and complement_components(spec, w, window, max_level) != 1]
    claims.append(Claim("copy_complement_connected", good, not disconnected,
                        {"copy_level": copy_level, "violations": ["".join(map(str, w)) for w in disconnected]}))
    too_many = []
    checked = 0
    for w in copies_with_boundary(spec, copy_level):
        if len(w) < 2:
            continue
        checked += 1
        count = len(complement_closure_cut_points(spec, w, window, max_level))
        if count >= n - 2:
            too_many.append({"copy": "".join(map(str, w)), "ncp": count})
    claims.append(Claim("copy_complement_ncp_below_n_minus_2", good, not too_many,
                        {"copy_level": copy_level, "copies_checked": checked, "violations": too_many}))
    return SuiteReport(spec.label, good, no_cp, claims)

