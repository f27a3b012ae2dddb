"""Symbolic core: addresses, glue tables and the identification closure.

A point of the attractor is named by an eventually periodic address over the
alphabet ``1..n``.  A glue table lists, for each ``k``, the two addresses
``u_k`` and ``v_k`` with ``k.u_k ~ (k+1).v_k``; these base identifications,
prefixed by arbitrary words, generate every identification of the quotient.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache, total_ordering
from itertools import combinations
from pathlib import Path

from .errors import CapError, MalformedAddressError, MalformedInputError, SpecError

DEFAULT_DEPTH = 12
MAX_CLASS_SIZE = 4096
SCHEMA_VERSION = 1

Word = tuple


def fmt_word(word, n=None):
    if not word:
        return "ε"
    if (n is not None and n > 9) or any(s > 9 for s in word):
        return ".".join(str(s) for s in word)
    return "".join(str(s) for s in word)


def parse_word(text):
    text = text.strip()
    if text in ("", "ε", "e", "-"):
        return ()
    try:
        if "." in text:
            return tuple(int(s) for s in text.split("."))
        return tuple(int(s) for s in text)
    except ValueError:
        raise MalformedInputError(f"cannot parse word {text!r}") from None


def _primitive_root(per):
    size = len(per)
    for d in range(1, size + 1):
        if size % d == 0 and per[:d] * (size // d) == per:
            return per[:d]
    return per


@total_ordering
@dataclass(frozen=True)
class Address:
    """Eventually periodic sequence ``pre . per per per ...`` in normal form.

    The constructor normalises: the period is reduced to its primitive root
    and trailing preperiod symbols that repeat the period are absorbed, so two
    instances compare equal exactly when they name the same sequence.
    """

    pre: tuple
    per: tuple

    def __post_init__(self):
        try:
            pre = tuple(int(s) for s in self.pre)
            per = tuple(int(s) for s in self.per)
        except (TypeError, ValueError):
            raise MalformedAddressError("address symbols must be integers") from None
        if not per:
            raise MalformedAddressError("address period must be nonempty")
        per = _primitive_root(per)
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "per", per)

    def symbol(self, i):
        if i < len(self.pre):
            return self.pre[i]
        return self.per[(i - len(self.pre)) % len(self.per)]

    @property
    def first(self):
        return self.symbol(0)

    def head(self, length):
        """First ``length`` symbols as a word."""
        P = len(self.pre)
        if length <= P:
            return self.pre[:length]
        p = len(self.per)
        reps, rest = divmod(length - P, p)
        return self.pre + self.per * reps + self.per[:rest]

    def tail(self, j=1):
        """The address with its first ``j`` symbols dropped."""
        P = len(self.pre)
        if j <= P:
            return Address(self.pre[j:], self.per)
        r = (j - P) % len(self.per)
        return Address((), self.per[r:] + self.per[:r])

    def prepend(self, word):
        return Address(tuple(word) + self.pre, self.per)

    def max_symbol(self):
        return max(self.pre + self.per)

    def _cmp_len(self, other):
        return max(len(self.pre), len(other.pre)) + math.lcm(len(self.per), len(other.per))

    def __lt__(self, other):
        if not isinstance(other, Address):
            return NotImplemented
        L = self._cmp_len(other)
        return self.head(L) < other.head(L)

    def __str__(self):
        wide = self.max_symbol() > 9
        sep = "." if wide else ""
        pre = sep.join(str(s) for s in self.pre)
        per = sep.join(str(s) for s in self.per)
        if wide:
            return f"{pre}.({per})"
        return f"{pre}({per})"

    def __repr__(self):
        return f"Address({self})"

    def to_json(self):
        return {"pre": list(self.pre), "per": list(self.per)}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "per" not in obj:
            raise MalformedAddressError(f"address object needs 'pre' and 'per': {obj!r}")
        pre, per = obj.get("pre", []), obj["per"]
        if not isinstance(pre, list) or not isinstance(per, list):
            raise MalformedAddressError("address 'pre'/'per' must be arrays")
        return cls(tuple(pre), tuple(per))

    @classmethod
    def parse(cls, text):
        """Parse ``"12(3)"`` or ``"1.10.(2.3)"`` into an address."""
        text = text.strip()
        if not text.endswith(")") or "(" not in text:
            raise MalformedAddressError(f"expected PRE(PER), got {text!r}")
        pre_txt, per_txt = text[:-1].split("(", 1)
        dotted = "." in text
        try:
            if dotted:
                pre = tuple(int(s) for s in pre_txt.split(".") if s)
                per = tuple(int(s) for s in per_txt.split(".") if s)
            else:
                pre = parse_word(pre_txt)
                per = parse_word(per_txt)
        except (MalformedInputError, ValueError):
            raise MalformedAddressError(f"cannot parse address {text!r}") from None
        return cls(pre, per)


def normalize_address(pre, per):
    return Address(tuple(pre), tuple(per))


@dataclass(frozen=True)
class GlueRule:
    k: int
    u: Address
    v: Address


@dataclass(frozen=True)
class NecklaceSpec:
    """``n`` plus one glue rule per index; the complete symbolic model."""

    n: int
    glue: tuple
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 3:
            raise SpecError(f"n must be an integer >= 3, got {self.n!r}")
        rules = tuple(self.glue)
        seen = set()
        for rule in rules:
            if not 1 <= rule.k <= self.n:
                raise SpecError(f"glue index {rule.k} outside 1..{self.n}")
            if rule.k in seen:
                raise SpecError(f"duplicate glue index {rule.k}")
            seen.add(rule.k)
            for addr in (rule.u, rule.v):
                bad = [s for s in addr.pre + addr.per if not 1 <= s <= self.n]
                if bad:
                    raise SpecError(f"rule {rule.k}: symbol {bad[0]} outside 1..{self.n}")
        if len(seen) != self.n:
            missing = sorted(set(range(1, self.n + 1)) - seen)
            raise SpecError(f"glue table misses indices {missing}")
        object.__setattr__(self, "glue", tuple(sorted(rules, key=lambda r: r.k)))

    def succ(self, k):
        return k % self.n + 1

    def pred(self, k):
        return (k - 2) % self.n + 1

    def rule(self, k):
        return self.glue[k - 1]

    def node_addresses(self, k):
        """The two defining addresses ``k.u_k`` and ``(k+1).v_k`` of ``z_k``."""
        r = self.rule(k)
        return r.u.prepend((k,)), r.v.prepend((self.succ(k),))

    def to_json(self):
        return {
            "v": SCHEMA_VERSION,
            "n": self.n,
            "label": self.label,
            "glue": [{"k": r.k, "u": r.u.to_json(), "v": r.v.to_json()} for r in self.glue],
        }

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise MalformedInputError("spec must be a JSON object")
        version = obj.get("v", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise MalformedInputError(f"unsupported spec schema version {version!r}")
        try:
            n = obj["n"]
            glue = obj["glue"]
        except KeyError as exc:
            raise MalformedInputError(f"spec missing field {exc.args[0]!r}") from None
        if not isinstance(glue, list):
            raise MalformedInputError("'glue' must be an array")
        rules = []
        for item in glue:
            if not isinstance(item, dict) or not {"k", "u", "v"} <= item.keys():
                raise MalformedInputError(f"glue entry needs k, u, v: {item!r}")
            try:
                rules.append(GlueRule(int(item["k"]), Address.from_json(item["u"]), Address.from_json(item["v"])))
            except (TypeError, ValueError) as exc:
                raise MalformedInputError(f"bad glue entry {item!r}: {exc}") from None
        if not isinstance(n, int) or isinstance(n, bool):
            raise MalformedInputError(f"'n' must be an integer, got {n!r}")
        return cls(n, tuple(rules), str(obj.get("label", "")))

    @classmethod
    def load(cls, path):
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_json(obj)

    def dump(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


def make_spec(n, rules, label=""):
    """Build a spec from ``{k: ((u_pre, u_per), (v_pre, v_per))}``."""
    glue = tuple(GlueRule(k, Address(*u), Address(*v)) for k, (u, v) in sorted(rules.items()))
    return NecklaceSpec(n, glue, label)


@dataclass(frozen=True)
class PointClass:
    """All discovered addresses of one point; compared by canonical address."""

    canonical: Address
    representatives: frozenset = field(compare=False)

    @property
    def firsts(self):
        return frozenset(r.first for r in self.representatives)

    def __contains__(self, addr):
        return addr in self.representatives

    def __str__(self):
        return str(self.canonical)

    def sorted_reps(self):
        return sorted(self.representatives)


class ClosureEngine:
    """Identification closure of one spec, truncated at a rewrite depth.

    A rewrite replaces a suffix equal to ``k.u_k`` by ``(k+1).v_k`` (or back)
    at a position ``<= depth``.  The relation is symmetric, so a BFS from any
    member reaches the same class; classes are memoised per member.
    """

    def __init__(self, spec, depth=DEFAULT_DEPTH):
        self.spec = spec
        self.depth = depth
        self._partners = {}
        for k in range(1, spec.n + 1):
            a, b = spec.node_addresses(k)
            self._partners.setdefault(a, set()).add(b)
            self._partners.setdefault(b, set()).add(a)
        self._prelens = sorted({len(a.pre) for a in self._partners if a.pre})
        self._periodic_rules = any(not a.pre for a in self._partners)
        self._memo = {}
        self._deflevel = {}

    def _positions(self, x):
        P = len(x.pre)
        out = [P - L for L in self._prelens if 0 <= P - L <= self.depth]
        if self._periodic_rules:
            out.extend(range(P, self.depth + 1))
        return out

    def rewrites(self, x):
        """(position, neighbour) pairs reachable by one base rewrite."""
        for j in self._positions(x):
            partners = self._partners.get(x.tail(j))
            if partners:
                head = x.head(j)
                for y in partners:
                    yield j, y.prepend(head)

    def closure(self, x):
        cached = self._memo.get(x)
        if cached is not None:
            return cached
        seen = {x}
        queue = deque([x])
        while queue:
            cur = queue.popleft()
            for _, y in self.rewrites(cur):
                if y not in seen:
                    seen.add(y)
                    if len(seen) > MAX_CLASS_SIZE:
                        raise CapError(f"identification class of {x} exceeds {MAX_CLASS_SIZE} addresses")
                    queue.append(y)
        cls = PointClass(min(seen), frozenset(seen))
        for y in seen:
            self._memo[y] = cls
        return cls

    def point(self, addr):
        if not isinstance(addr, Address):
            addr = Address(*addr)
        return self.closure(addr)

    def tail_class(self, cls, symbol):
        """Class of ``f_symbol^{-1}(point)``; ``None`` if the point is not in that copy."""
        tails = [r.tail(1) for r in cls.representatives if r.first == symbol]
        if not tails:
            return None
        return self.closure(min(tails))

    def prefixed(self, word, cls):
        return self.closure(cls.canonical.prepend(word))

    def defining_level(self, cls):
        """Length of the shortest ``w`` with the point equal to some ``w.z_k``; None if none found."""
        if cls.canonical in self._deflevel:
            return self._deflevel[cls.canonical]
        best = None
        for r in cls.representatives:
            for j in self._positions(r):
                if (best is None or j < best) and r.tail(j) in self._partners:
                    best = j
        self._deflevel[cls.canonical] = best
        return best


@lru_cache(maxsize=64)
def engine(spec, depth=DEFAULT_DEPTH):
    return ClosureEngine(spec, depth)


def point_class(spec, a, depth=DEFAULT_DEPTH):
    return engine(spec, depth).point(a)


def main_nodes(spec, w=(), depth=DEFAULT_DEPTH):
    """Classes of ``w.z_1, ..., w.z_n`` in index order."""
    eng = engine(spec, depth)
    return [eng.closure(spec.node_addresses(k)[0].prepend(w)) for k in range(1, spec.n + 1)]


def as_point(spec, p, depth=DEFAULT_DEPTH):
    """Coerce an Address, (pre, per) pair, address string or PointClass to a PointClass."""
    eng = engine(spec, depth)
    if isinstance(p, PointClass):
        return eng.closure(p.canonical)
    if isinstance(p, str):
        return eng.closure(Address.parse(p))
    return eng.point(p)


@dataclass
class ValidationReport:
    ok: bool
    depth: int
    contacts: dict
    witnesses: list
    node_first_symbols: dict

    def to_json(self):
        return {
            "ok": self.ok,
            "depth": self.depth,
            "contacts": {f"{i},{j}": v for (i, j), v in sorted(self.contacts.items())},
            "witnesses": self.witnesses,
            "node_first_symbols": {str(k): v for k, v in sorted(self.node_first_symbols.items())},
        }


def validate_spec(spec, depth=6):
    """Check the level-1 intersection pattern of a glue table.

    Two distinct 1-level copies can only share a point whose address changes
    its first symbol under some rewrite chain, i.e. a main node.  So the
    pairwise contacts are read off from the first-symbol sets of the ``n``
    main-node classes: adjacent pairs must share exactly one class, the rest
    none, and each class must lie in exactly the two copies it glues.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    nodes = main_nodes(spec, (), depth)
    n = spec.n
    contacts = {}
    for i, j in combinations(range(1, n + 1), 2):
        contacts[(i, j)] = sorted({str(c.canonical) for c in nodes if {i, j} <= c.firsts})
    witnesses = []
    for (i, j), found in contacts.items():
        adjacent = (j - i) in (1, n - 1)
        if adjacent and len(found) != 1:
            witnesses.append({"pair": [i, j], "reason": f"adjacent copies share {len(found)} points", "points": found})
        if not adjacent and found:
            witnesses.append({"pair": [i, j], "reason": "non-adjacent copies meet", "points": found})
    firsts = {}
    for k, c in enumerate(nodes, start=1):
        firsts[k] = sorted(c.firsts)
        if c.firsts != {k, spec.succ(k)}:
            witnesses.append({"node": k, "reason": f"z_{k} lies in copies {sorted(c.firsts)}", "points": [str(c.canonical)]})
    if len({c.canonical for c in nodes}) != n:
        witnesses.append({"reason": "main nodes are not pairwise distinct"})
    return ValidationReport(not witnesses, depth, contacts, witnesses, firsts)


def smallest_copy_containing(spec, pts, cap=32, depth=DEFAULT_DEPTH):
    """Longest word ``w`` such that every point has a representative starting with ``w``.

    Ties between equally long words are broken lexicographically.
    """
    pts = [as_point(spec, p, depth) for p in pts]
    if not pts:
        raise ValueError("need at least one point")
    best = ()
    frontier = {()}
    for length in range(1, cap + 1):
        common = None
        for p in pts:
            heads = {r.head(length) for r in p.representatives}
            common = heads if common is None else common & heads
            if not common:
                break
        frontier = {w for w in common if w[:-1] in frontier} if common else set()
        if not frontier:
            break
        best = min(frontier)
    return best


@dataclass
class GoodnessReport:
    good: bool
    witnesses: list
    first_symbols: dict

    def to_json(self):
        return {
            "good": self.good,
            "witnesses": [list(w) for w in self.witnesses],
            "first_symbols": {str(k): {"prev": a, "next": b} for k, (a, b) in sorted(self.first_symbols.items())},
        }


def check_goodness(spec, depth=DEFAULT_DEPTH):
    """Copy ``F_k`` is good when no sub-copy ``F_kj`` holds both of its boundary nodes."""
    nodes = main_nodes(spec, (), depth)
    witnesses = []
    table = {}
    for k in range(1, spec.n + 1):
        prev_node = nodes[spec.pred(k) - 1]
        next_node = nodes[k - 1]
        js_prev = {r.symbol(1) for r in prev_node.representatives if r.first == k}
        js_next = {r.symbol(1) for r in next_node.representatives if r.first == k}
        table[k] = (sorted(js_prev), sorted(js_next))
        witnesses.extend((k, j) for j in sorted(js_prev & js_next))
    return GoodnessReport(not witnesses, witnesses, table)
