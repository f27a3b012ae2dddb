"""Planar affine IFS realisations: cells, contact detection, spec extraction, SVG."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, product
from pathlib import Path

import numpy as np

from .address import Address, PointClass, make_spec, validate_spec
from .contact import max_cells
from .errors import CapError, ExtractionError, SpecError

DEFAULT_TOL = 1e-9
DEFAULT_LEVEL_CAP = 24
MAX_PAIRS = 4096


@dataclass(frozen=True)
class AffineMap2D:
    linear: tuple
    translation: tuple

    def __post_init__(self):
        A = self.matrix
        if abs(np.linalg.det(A)) < 1e-14:
            raise SpecError("affine map is not invertible")
        if self.contraction >= 1:
            raise SpecError(f"map is not a contraction (norm {self.contraction:.6g})")

    @property
    def matrix(self):
        return np.array(self.linear, dtype=float).reshape(2, 2)

    @property
    def vector(self):
        return np.array(self.translation, dtype=float)

    @property
    def contraction(self):
        return float(np.linalg.norm(self.matrix, 2))

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float) + self.vector

    def fixed_point(self):
        return np.linalg.solve(np.eye(2) - self.matrix, self.vector)

    @classmethod
    def similarity(cls, alpha, beta, flip=False):
        """``z -> alpha z + beta`` (or ``alpha conj(z) + beta``) on the complex plane."""
        a, b = alpha.real, alpha.imag
        lin = ((a, b), (b, -a)) if flip else ((a, -b), (b, a))
        return cls(lin, (beta.real, beta.imag))

    def to_json(self):
        (a11, a12), (a21, a22) = self.linear
        return {"a11": a11, "a12": a12, "a21": a21, "a22": a22, "tx": self.translation[0], "ty": self.translation[1]}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(((float(obj["a11"]), float(obj["a12"])), (float(obj["a21"]), float(obj["a22"]))),
                       (float(obj["tx"]), float(obj["ty"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"bad affine map: {exc}") from exc


@dataclass(frozen=True)
class GeometricIFS:
    maps: tuple
    label: str = ""

    def __post_init__(self):
        if len(self.maps) < 3:
            raise SpecError("a necklace IFS needs at least 3 maps")

    @property
    def n(self):
        return len(self.maps)

    def word_map(self, word):
        A, t = np.eye(2), np.zeros(2)
        for k in word:
            f = self.maps[k - 1]
            t = A @ f.vector + t
            A = A @ f.matrix
        return A, t

    def point(self, addr):
        """Coordinates of the point with an eventually periodic address."""
        if isinstance(addr, PointClass):
            addr = addr.canonical
        A, t = self.word_map(addr.per)
        x = np.linalg.solve(np.eye(2) - A, t)
        B, s = self.word_map(addr.pre)
        return B @ x + s

    def root_disk(self):
        fixed = np.array([f.fixed_point() for f in self.maps])
        c = fixed.mean(axis=0)
        R = max(np.linalg.norm(f(c) - c) / (1 - f.contraction) for f in self.maps)
        return c, float(R)

    def to_json(self):
        return {"v": 1, "label": self.label, "maps": [f.to_json() for f in self.maps]}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or not isinstance(obj.get("maps"), list):
            raise SpecError("IFS JSON must be an object with a 'maps' list")
        if obj.get("v", 1) != 1:
            raise SpecError(f"unsupported schema version {obj.get('v')}")
        return cls(tuple(AffineMap2D.from_json(m) for m in obj["maps"]), str(obj.get("label", "")))

    @classmethod
    def load(cls, path):
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: invalid JSON ({exc})") from exc

    def dump(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


@dataclass
class CellTree:
    """Level-m bounding disks; row ``i`` is the i-th word in lexicographic order."""

    level: int
    centers: np.ndarray
    radii: np.ndarray
    root_center: np.ndarray
    root_radius: float

    def word(self, i, n):
        out = []
        for _ in range(self.level):
            i, r = divmod(i, n)
            out.append(r + 1)
        return tuple(reversed(out))


def _compose_level(ifs, m):
    if ifs.n**m > max_cells():
        raise CapError(f"level {m} needs {ifs.n**m} cells, above cap {max_cells()} (NECKLACE_MAX_CELLS)")
    mats = np.array([f.matrix for f in ifs.maps])
    vecs = np.array([f.vector for f in ifs.maps])
    A = np.eye(2)[None]
    t = np.zeros((1, 2))
    for _ in range(m):
        # f_{wk} = f_w . f_k
        t = (np.einsum("wij,kj->wki", A, vecs) + t[:, None, :]).reshape(-1, 2)
        A = np.einsum("wij,kjl->wkil", A, mats).reshape(-1, 2, 2)
    return A, t


def attractor_cells(ifs, m):
    """Disks ``f_w(B(c, R))`` for all words of length m; they cover the attractor."""
    c, R = ifs.root_disk()
    A, t = _compose_level(ifs, m)
    centers = np.einsum("wij,j->wi", A, c) + t
    radii = np.linalg.norm(A, ord=2, axis=(1, 2)) * R
    return CellTree(m, centers, radii, c, R)


# --- contact detection ------------------------------------------------------------


@dataclass
class PairContact:
    pair: tuple
    status: str  # "disjoint", "contact", "unresolved"
    level: int
    chains: list
    point: list | None
    note: str = ""

    def to_json(self):
        return {
            "pair": list(self.pair),
            "status": self.status,
            "level": self.level,
            "chains": [["".join(map(str, a)), "".join(map(str, b))] for a, b in self.chains],
            "point": self.point,
            "note": self.note,
        }


def detect_contacts(ifs, level_cap=DEFAULT_LEVEL_CAP, tol=DEFAULT_TOL):
    """Refine touching disk pairs for every pair of 1-level copies."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    c, R = ifs.root_disk()
    slack = tol * 2 * R
    norms = [f.contraction for f in ifs.maps]
    mats = [f.matrix for f in ifs.maps]
    vecs = [f.vector for f in ifs.maps]

    def child(node, k):
        w, A, t, r = node
        return (w + (k,), A @ mats[k - 1], A @ vecs[k - 1] + t, r * norms[k - 1])

    def centre(node):
        return node[1] @ c + node[2]

    root = ((), np.eye(2), np.zeros(2), R)
    out = []
    for i, j in combinations(range(1, ifs.n + 1), 2):
        pairs = [(child(root, i), child(root, j))]
        status, level, note = "contact", 1, ""
        for level in range(1, level_cap + 1):
            if level > 1:
                pairs = [(child(a, x), child(b, y)) for a, b in pairs
                         for x in range(1, ifs.n + 1) for y in range(1, ifs.n + 1)]
            pairs = [(a, b) for a, b in pairs if np.linalg.norm(centre(a) - centre(b)) <= a[3] + b[3] + slack]
            if not pairs:
                status = "disjoint"
                break
            if len(pairs) > MAX_PAIRS:
                status, note = "unresolved", f"{len(pairs)} touching disk pairs at level {level}: contact is not a single point"
                break
        point = None
        if status == "contact":
            mids = np.array([(centre(a) + centre(b)) / 2 for a, b in pairs])
            spread = float(np.max(np.linalg.norm(mids - mids.mean(axis=0), axis=1)))
            if spread > 100 * max(R * max(norms) ** level, slack):
                status, note = "unresolved", "touching pairs do not shrink to a single point"
            else:
                point = [float(x) for x in mids.mean(axis=0)]
        pairs = [(a[0], b[0]) for a, b in pairs]
        out.append(PairContact((i, j), status, level, pairs if status == "contact" else [], point, note))
    return out


def _periodic_splits(word, min_reps=2):
    """Eventually periodic readings ``(pre, per)`` of a finite chain, simplest first."""
    L = len(word)
    found = []
    for total in range(1, L + 1):
        for q in range(1, total + 1):
            p = total - q
            if p + min_reps * q > L:
                continue
            if all(word[t] == word[t + q] for t in range(p, L - q)):
                found.append((tuple(word[:p]), tuple(word[p:p + q]), (L - p) // q))
    return found


@dataclass
class Extraction:
    spec: object
    confidence: dict
    contacts: list
    rejected: bool
    reason: str

    def to_json(self):
        return {
            "v": 1,
            "rejected": self.rejected,
            "reason": self.reason,
            "spec": self.spec.to_json() if self.spec is not None else None,
            "confidence": self.confidence,
            "contacts": [c.to_json() for c in self.contacts],
        }


def _side_addresses(ifs, chains, side, target, radius):
    """Periodic readings of one side's chains whose exact point lies near the estimate."""
    found = {}
    for pair in chains:
        for pre, per, reps in _periodic_splits(pair[side]):
            addr = Address(pre, per)
            if np.linalg.norm(ifs.point(addr) - target) <= radius:
                found[addr] = max(found.get(addr, 0), reps)
    return found


def _complexity(addr):
    return (len(addr.pre) + len(addr.per), addr)


def spec_from_geometry(ifs, level_cap=DEFAULT_LEVEL_CAP, tol=DEFAULT_TOL, depth=6):
    """Read the gluing table off a planar IFS.

    Raises ``ExtractionError`` when a glued pair has no periodic chain that
    lands on the detected point.  A non-necklace contact pattern is not an
    error: the result is returned with ``rejected=True`` and a reason.
    """
    contacts = detect_contacts(ifs, level_cap, tol)
    n = ifs.n
    by_pair = {c.pair: c for c in contacts}
    problems = []
    for (i, j), c in sorted(by_pair.items()):
        adjacent = (j - i) in (1, n - 1)
        if c.status == "unresolved":
            problems.append(f"copies {i},{j}: {c.note}")
        elif adjacent and c.status == "disjoint":
            problems.append(f"adjacent copies {i},{j} are disjoint")
        elif not adjacent and c.status == "contact":
            problems.append(f"non-adjacent copies {i},{j} meet near {c.point}")
    if problems:
        return Extraction(None, {}, contacts, True, "; ".join(problems))
    _, R = ifs.root_disk()
    scale = 2 * R
    rules, confidence = {}, {}
    for k in range(1, n + 1):
        k1 = k % n + 1
        i, j = min(k, k1), max(k, k1)
        c = by_pair[(i, j)]
        target = np.array(c.point)
        side_k, side_k1 = (0, 1) if k == i else (1, 0)
        radius = 10 * R * max(f.contraction for f in ifs.maps) ** c.level + tol * scale
        left = _side_addresses(ifs, c.chains, side_k, target, radius)
        right = _side_addresses(ifs, c.chains, side_k1, target, radius)
        matches = [(a, b) for a in sorted(left, key=_complexity) for b in sorted(right, key=_complexity)
                   if np.linalg.norm(ifs.point(a) - ifs.point(b)) <= tol * scale]
        if not matches:
            raise ExtractionError(f"no pair of eventually periodic addresses for z_{k} within {level_cap} symbols")
        a, b = min(matches, key=lambda ab: (_complexity(ab[0])[0] + _complexity(ab[1])[0], ab))
        xa, xb = ifs.point(a), ifs.point(b)
        # replace the disk estimate by the exact point of the chosen address
        c.point = [float(x) for x in xa]
        c.note = "point from periodic address"
        rules[k] = ((a.tail(1).pre, a.tail(1).per), (b.tail(1).pre, b.tail(1).per))
        confidence[str(k)] = {
            "u": str(a.tail(1)), "v": str(b.tail(1)),
            "repetitions": min(left[a], right[b]),
            "confirmed": min(left[a], right[b]) >= 2,
            "residual": float(np.linalg.norm(xa - xb)),
        }
    spec = make_spec(n, rules, ifs.label)
    report = validate_spec(spec, depth)
    if not report.ok:
        return Extraction(spec, confidence, contacts, True, f"extracted table fails validation: {report.witnesses}")
    return Extraction(spec, confidence, contacts, False, "")


# --- rendering ----------------------------------------------------------------------


def _hull(points):
    pts = sorted(set(map(tuple, np.round(points, 12))))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def base_polygon(ifs, depth=3):
    """Convex hull of the images of the fixed points under words of length <= depth."""
    fixed = np.array([f.fixed_point() for f in ifs.maps])
    pts = [fixed]
    for L in range(1, depth + 1):
        for w in product(range(1, ifs.n + 1), repeat=L):
            A, t = ifs.word_map(w)
            pts.append(fixed @ A.T + t)
    return np.array(_hull(np.vstack(pts)))


def _g(x):
    return f"{x:.12g}"


def render_svg(ifs, m, marks=(), cuts=(), size=800):
    """Deterministic SVG of the level-m cells with labelled marks and highlighted cut pairs.

    ``marks`` holds ``(label, point)`` pairs; ``cuts`` holds pairs of points.
    Points may be addresses, point classes or coordinates.
    """
    A, t = _compose_level(ifs, m)
    poly = base_polygon(ifs)
    cells = np.einsum("wij,pj->wpi", A, poly) + t[:, None, :]
    lo = cells.reshape(-1, 2).min(axis=0)
    hi = cells.reshape(-1, 2).max(axis=0)
    span = float(max(hi - lo)) or 1.0
    pad = 0.05 * span

    def xy(p):
        if isinstance(p, (Address, PointClass)):
            p = ifs.point(p)
        return float(p[0]), float(-p[1])

    vb = (lo[0] - pad, -hi[1] - pad, hi[0] - lo[0] + 2 * pad, hi[1] - lo[1] + 2 * pad)
    stroke = span / 800
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="{" ".join(_g(v) for v in vb)}">',
        f"<title>{ifs.label or 'IFS'} level {m}</title>",
        f'<g id="cells" fill="#d8e2ef" stroke="#35507a" stroke-width="{_g(stroke)}">',
    ]
    for i, cell in enumerate(cells):
        pts = " ".join(f"{_g(x)},{_g(-y)}" for x, y in cell)
        lines.append(f'<polygon id="c{i}" points="{pts}"/>')
    lines.append("</g>")
    r = span / 120
    lines.append('<g id="cuts" fill="#c62828">')
    for idx, (p, q) in enumerate(cuts):
        (x1, y1), (x2, y2) = xy(p), xy(q)
        lines.append(f'<line x1="{_g(x1)}" y1="{_g(y1)}" x2="{_g(x2)}" y2="{_g(y2)}" stroke="#c62828" '
                     f'stroke-width="{_g(stroke * 2)}" stroke-dasharray="{_g(r)}"/>')
        for x, y in ((x1, y1), (x2, y2)):
            lines.append(f'<circle class="cut{idx}" cx="{_g(x)}" cy="{_g(y)}" r="{_g(r)}"/>')
    lines.append("</g>")
    lines.append(f'<g id="marks" fill="#111" font-size="{_g(span / 30)}" font-family="sans-serif">')
    for label, p in marks:
        x, y = xy(p)
        lines.append(f'<circle cx="{_g(x)}" cy="{_g(y)}" r="{_g(r * 0.8)}"/>')
        lines.append(f'<text x="{_g(x + r)}" y="{_g(y - r)}">{label}</text>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
