"""Formula index: a discrimination tree over all subterms of all formulas.

Every subterm of every corpus formula is inserted under two keys: its exact
token sequence and its alpha token sequence (identifier names erased).  A
query walks the matching trie, with wildcard tokens skipping one complete
subtree, to collect candidate subterms; each candidate is then confirmed by
the matcher, which enforces repeated-wildcard consistency, commutative
argument assignment and (optionally) injective identifier renaming.

The trie walk over-approximates: its candidate set always contains every
subterm the matcher accepts, so results equal the brute-force scan's.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .canon import alpha_tokens
from .expr import (
    COMMUTATIVE_HEADS,
    Apply,
    Identifier,
    MathExpr,
    Number,
    Path,
    QueryExpr,
    TermKey,
    TextAnnotation,
    Wildcard,
    has_wildcards,
    linearize,
    node_count,
    subterm_at,
    subterms,
    token_of,
)

ARITY_CAP = 16


class ArityCapError(ValueError):
    """A node has more arguments than the index accepts."""


@dataclass(frozen=True, slots=True, order=True)
class FormulaRef:
    doc_id: str
    formula_id: int
    path: Path


@dataclass(frozen=True, slots=True)
class MatchResult:
    """Witness of a successful match.

    bindings maps wildcard names to matched subtrees; renaming records the
    injective identifier renaming used in alpha mode; matched counts the
    subject nodes matched by non-wildcard pattern nodes (the scoring input).
    """

    bindings: dict[str, MathExpr]
    renaming: dict[str, str]
    matched: int


@dataclass(frozen=True, slots=True)
class FormulaHit:
    ref: FormulaRef
    subterm: MathExpr
    substitution: dict[str, MathExpr]
    renaming: dict[str, str]
    score: Fraction  # matched nodes / whole-formula nodes, exact


@dataclass(slots=True)
class QueryStats:
    candidates: int = 0
    confirmations: int = 0


# --- matching ---------------------------------------------------------------


class _Matcher:
    """Backtracking matcher with a trail for undoing speculative bindings."""

    __slots__ = ("alpha", "bindings", "renaming", "ren_targets", "trail")

    def __init__(self, alpha: bool):
        self.alpha = alpha
        self.bindings: dict[str, MathExpr] = {}
        self.renaming: dict[str, str] = {}
        self.ren_targets: set[str] = set()
        self.trail: list[tuple[str, str]] = []

    def mark(self) -> int:
        return len(self.trail)

    def rollback(self, mark: int) -> None:
        while len(self.trail) > mark:
            kind, key = self.trail.pop()
            if kind == "b":
                del self.bindings[key]
            else:
                self.ren_targets.discard(self.renaming.pop(key))

    def node(self, p: QueryExpr, s: MathExpr) -> int | None:
        """Match pattern p against subject s at the root.

        Returns the matched-node count, or None with all state rolled back.
        """
        if isinstance(p, Wildcard):
            prev = self.bindings.get(p.name)
            if prev is not None:
                return 0 if prev == s else None
            self.bindings[p.name] = s
            self.trail.append(("b", p.name))
            return 0
        if isinstance(p, Identifier):
            if not isinstance(s, Identifier):
                return None
            if not self.alpha:
                return 1 if p.name == s.name else None
            prev = self.renaming.get(p.name)
            if prev is not None:
                return 1 if prev == s.name else None
            if s.name in self.ren_targets:
                return None  # renaming must stay injective
            self.renaming[p.name] = s.name
            self.ren_targets.add(s.name)
            self.trail.append(("r", p.name))
            return 1
        if isinstance(p, Number):
            return 1 if isinstance(s, Number) and p.value == s.value else None
        if isinstance(p, TextAnnotation):
            return 1 if isinstance(s, TextAnnotation) and p.content == s.content else None
        assert isinstance(p, Apply)
        if not isinstance(s, Apply) or p.head != s.head:
            return None
        if p.head in COMMUTATIVE_HEADS:
            return self.commutative(p.head, p.args, s.args)
        if len(p.args) != len(s.args):
            return None
        total = 1
        start = self.mark()
        for pa, sa in zip(p.args, s.args):
            r = self.node(pa, sa)
            if r is None:
                self.rollback(start)
                return None
            total += r
        return total

    def commutative(self, head: str, p_args: tuple, s_args: tuple) -> int | None:
        """Assign pattern args to distinct subject args, backtracking.

        When the pattern is shorter and holds a bare wildcard, one bare
        wildcard may instead absorb all leftover subject args, rebuilt as a
        plus/times node of the same head (the partial-sum rule).  Pattern
        args are tried in order, subject args in order, so the first match
        found is deterministic.
        """
        k, m = len(p_args), len(s_args)
        if k > m:
            return None
        may_absorb = k < m and any(isinstance(a, Wildcard) for a in p_args)
        if k < m and not may_absorb:
            return None

        def assign(i: int, used: int, absorber: str | None) -> int | None:
            if i == k:
                if k == m:
                    return 0
                if absorber is None:
                    return None
                # absorber takes the leftovers, in subject order
                leftovers = tuple(s_args[j] for j in range(m) if not used >> j & 1)
                return self.node(Wildcard(absorber), Apply(head, leftovers))
            p = p_args[i]
            for j in range(m):
                if used >> j & 1:
                    continue
                start = self.mark()
                r = self.node(p, s_args[j])
                if r is not None:
                    rest = assign(i + 1, used | 1 << j, absorber)
                    if rest is not None:
                        return r + rest
                self.rollback(start)
            if may_absorb and absorber is None and isinstance(p, Wildcard):
                return assign(i + 1, used, p.name)
            return None

        start = self.mark()
        r = assign(0, 0, None)
        if r is None:
            self.rollback(start)
            return None
        return 1 + r


def match(pattern: QueryExpr, subject: MathExpr, alpha: bool = False) -> MatchResult | None:
    """Match a canonical pattern against a canonical subject at the root."""
    m = _Matcher(alpha)
    r = m.node(pattern, subject)
    if r is None:
        return None
    return MatchResult(dict(m.bindings), dict(m.renaming), r)


# --- the discrimination tree -------------------------------------------------


class _TrieNode:
    __slots__ = ("children", "refs")

    def __init__(self) -> None:
        self.children: dict[str, _TrieNode] = {}
        self.refs: list[FormulaRef] = []

    def child(self, token: str) -> "_TrieNode":
        nxt = self.children.get(token)
        if nxt is None:
            nxt = _TrieNode()
            self.children[token] = nxt
        return nxt


def _token_arity(token: str) -> int:
    if token.startswith("A:"):
        return int(token[token.rindex(":") + 1 :])
    return 0


def _skip_one_subtree(node: _TrieNode) -> list[_TrieNode]:
    """All trie nodes reachable by consuming exactly one complete subtree."""
    out: list[_TrieNode] = []
    stack: list[tuple[_TrieNode, int]] = [(node, 1)]
    while stack:
        nd, pending = stack.pop()
        for token, child in nd.children.items():
            p = pending - 1 + _token_arity(token)
            if p == 0:
                out.append(child)
            else:
                stack.append((child, p))
    return out


class DiscTree:
    """Subterm index over canonical corpus formulas.

    Build single-threaded, then treat as frozen; queries share it freely.
    """

    def __init__(self) -> None:
        self._exact = _TrieNode()
        self._alpha = _TrieNode()
        self._formulas: dict[tuple[str, int], MathExpr] = {}
        self._node_counts: dict[tuple[str, int], int] = {}

    @property
    def formula_count(self) -> int:
        return len(self._formulas)

    def formulas(self) -> Iterator[tuple[str, int, MathExpr]]:
        for (doc_id, formula_id), e in self._formulas.items():
            yield doc_id, formula_id, e

    def formula(self, doc_id: str, formula_id: int) -> MathExpr:
        return self._formulas[(doc_id, formula_id)]

    def insert(self, formula: MathExpr, doc_id: str, formula_id: int) -> None:
        """Index every subterm of a canonical formula.

        Re-inserting the same formula under the same ids is a no-op.
        Raises ArityCapError when any node exceeds ARITY_CAP arguments and
        ValueError when the formula contains wildcards.
        """
        key = (doc_id, formula_id)
        existing = self._formulas.get(key)
        if existing is not None:
            if existing == formula:
                return
            raise ValueError(f"{key} already indexed with a different formula")
        if has_wildcards(formula):
            raise ValueError("corpus formulas cannot contain wildcards")
        check_arity_cap(formula)
        self._formulas[key] = formula
        self._node_counts[key] = node_count(formula)
        for path, sub in subterms(formula):
            ref = FormulaRef(doc_id, formula_id, path)
            self._insert_key(self._exact, linearize(sub), ref)
            self._insert_key(self._alpha, alpha_tokens(sub), ref)

    @staticmethod
    def _insert_key(root: _TrieNode, key: TermKey, ref: FormulaRef) -> None:
        node = root
        for token in key:
            node = node.child(token)
        node.refs.append(ref)

    # --- retrieval ---

    def query(self, pattern: QueryExpr, alpha: bool = False) -> list[FormulaHit]:
        hits, _ = self.query_with_stats(pattern, alpha)
        return hits

    def query_with_stats(
        self, pattern: QueryExpr, alpha: bool = False
    ) -> tuple[list[FormulaHit], QueryStats]:
        root = self._alpha if alpha else self._exact
        stats = QueryStats()
        seen: set[FormulaRef] = set()
        for node in _walk(pattern, root, alpha):
            seen.update(node.refs)
        stats.candidates = len(seen)
        matches: list[tuple[FormulaRef, MathExpr, MatchResult]] = []
        for ref in sorted(seen):
            sub = subterm_at(self._formulas[(ref.doc_id, ref.formula_id)], ref.path)
            stats.confirmations += 1
            mr = match(pattern, sub, alpha)
            if mr is not None:
                matches.append((ref, sub, mr))
        hits = collect_hits(matches, self._node_counts.__getitem__)
        return hits, stats


def _walk(pattern: QueryExpr, node: _TrieNode, alpha: bool) -> list[_TrieNode]:
    """Trie nodes reachable by consuming one subtree compatible with pattern."""
    if isinstance(pattern, Wildcard):
        return _skip_one_subtree(node)
    if alpha and isinstance(pattern, Identifier):
        # any single identifier can rename onto this one
        return [c for t, c in node.children.items() if t.startswith("V:")]
    if not isinstance(pattern, Apply):
        child = node.children.get(token_of(pattern))
        return [child] if child is not None else []
    head, p_args = pattern.head, pattern.args
    k = len(p_args)
    if head in COMMUTATIVE_HEADS:
        out: list[_TrieNode] = []
        bare = any(isinstance(a, Wildcard) for a in p_args)
        prefix = f"A:{head}:"
        for token, child in node.children.items():
            if not token.startswith(prefix):
                continue
            m = _token_arity(token)
            if m == k:
                out.extend(_assignment_walk(p_args, child, m, alpha, 0))
            elif m > k and bare:
                out.extend(_assignment_walk(p_args, child, m, alpha, m - k + 1))
        return out
    child = node.children.get(f"A:{head}:{k}")
    if child is None:
        return []
    nodes = [child]
    for arg in p_args:
        nxt: list[_TrieNode] = []
        seen_ids: set[int] = set()
        for nd in nodes:
            for r in _walk(arg, nd, alpha):
                if id(r) not in seen_ids:
                    seen_ids.add(id(r))
                    nxt.append(r)
        if not nxt:
            return []
        nodes = nxt
    return nodes


def _assignment_walk(
    p_args: tuple, node: _TrieNode, m: int, alpha: bool, max_skips: int
) -> list[_TrieNode]:
    """Walk m stored argument subtrees, pairing them against pattern args.

    Each stored argument is either matched by one not-yet-used pattern arg
    or skipped (absorbed); at the end all pattern args must be used except,
    on the absorb path, exactly one bare wildcard.  Over-approximates the
    matcher (no binding consistency here), which is what keeps candidate
    retrieval complete.
    """
    k = len(p_args)
    full = (1 << k) - 1
    out: list[_TrieNode] = []
    out_ids: set[int] = set()
    visited: set[tuple[int, int, int, int]] = set()

    def rec(nd: _TrieNode, used: int, slots: int, skips: int) -> None:
        state = (id(nd), used, slots, skips)
        if state in visited:
            return
        visited.add(state)
        if slots == m:
            if max_skips == 0:
                ok = used == full
            else:
                unused = [i for i in range(k) if not used >> i & 1]
                ok = (
                    skips == max_skips
                    and len(unused) == 1
                    and isinstance(p_args[unused[0]], Wildcard)
                )
            if ok and id(nd) not in out_ids:
                out_ids.add(id(nd))
                out.append(nd)
            return
        if skips < max_skips:
            for nxt in _skip_one_subtree(nd):
                rec(nxt, used, slots + 1, skips + 1)
        for i in range(k):
            if used >> i & 1:
                continue
            for nxt in _walk(p_args[i], nd, alpha):
                rec(nxt, used | 1 << i, slots + 1, skips)

    rec(node, 0, 0, 0)
    return out


def check_arity_cap(e: MathExpr) -> None:
    for node in _iter_applies(e):
        if len(node.args) > ARITY_CAP:
            raise ArityCapError(
                f"{node.head} node has {len(node.args)} args (cap {ARITY_CAP})"
            )


def _iter_applies(e: QueryExpr) -> Iterator[Apply]:
    if isinstance(e, Apply):
        yield e
        for a in e.args:
            yield from _iter_applies(a)


# --- scoring and hit assembly (shared with the oracle) ------------------------


def collect_hits(
    matches: Iterable[tuple[FormulaRef, MathExpr, MatchResult]],
    formula_nodes,
) -> list[FormulaHit]:
    """Score, dedup per formula, and order.

    score = non-wildcard-matched nodes of the matched subterm over the node
    count of the whole formula (a bare-wildcard pattern scores as 1 node so
    scores stay positive).  One hit per formula: best score, then shortest
    path, then lexicographically first path.  Final order: score descending,
    ties by (doc_id, formula_id, path).
    """
    best: dict[tuple[str, int], FormulaHit] = {}
    for ref, sub, mr in matches:
        total = formula_nodes((ref.doc_id, ref.formula_id))
        hit = FormulaHit(
            ref=ref,
            subterm=sub,
            substitution=mr.bindings,
            renaming=mr.renaming,
            score=Fraction(max(mr.matched, 1), total),
        )
        key = (ref.doc_id, ref.formula_id)
        cur = best.get(key)
        if cur is None or _hit_rank(hit) < _hit_rank(cur):
            best[key] = hit
    return sorted(
        best.values(),
        key=lambda h: (-h.score, h.ref.doc_id, h.ref.formula_id, h.ref.path),
    )


def _hit_rank(h: FormulaHit) -> tuple:
    return (-h.score, len(h.ref.path), h.ref.path)


# --- brute-force oracle -------------------------------------------------------


class BruteForce:
    """Exhaustive scan over every subterm of every formula; the test oracle."""

    def __init__(self) -> None:
        self._formulas: list[tuple[str, int, MathExpr]] = []
        self._subterms: list[tuple[str, int, list[tuple[Path, MathExpr]]]] = []
        self._node_counts: dict[tuple[str, int], int] = {}

    def insert(self, formula: MathExpr, doc_id: str, formula_id: int) -> None:
        self._formulas.append((doc_id, formula_id, formula))
        self._subterms.append((doc_id, formula_id, subterms(formula)))
        self._node_counts[(doc_id, formula_id)] = node_count(formula)

    def query(self, pattern: QueryExpr, alpha: bool = False) -> list[FormulaHit]:
        hits, _ = self.query_with_stats(pattern, alpha)
        return hits

    def query_with_stats(
        self, pattern: QueryExpr, alpha: bool = False
    ) -> tuple[list[FormulaHit], QueryStats]:
        stats = QueryStats()
        matches = []
        for doc_id, formula_id, subs in self._subterms:
            for path, sub in subs:
                stats.confirmations += 1
                mr = match(pattern, sub, alpha)
                if mr is not None:
                    matches.append((FormulaRef(doc_id, formula_id, path), sub, mr))
        stats.candidates = stats.confirmations
        hits = collect_hits(matches, self._node_counts.__getitem__)
        return hits, stats


def brute_force_query(
    formulas: Iterable[tuple[str, int, MathExpr]],
    pattern: QueryExpr,
    alpha: bool = False,
) -> list[FormulaHit]:
    bf = BruteForce()
    for doc_id, formula_id, e in formulas:
        bf.insert(e, doc_id, formula_id)
    return bf.query(pattern, alpha)
