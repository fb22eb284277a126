"""CTL* model checking over Kripke structures.

The CTL fragment is decided with the usual fixpoint characterizations
(EX / EU / EG and dualization for A).  General CTL* goes through the
tableau construction: maximal quantified state subformulas of a path
formula are abstracted into fresh atoms, the remaining pure LTL body is
translated to a generalized Buchi automaton by node splitting, and
emptiness of the automaton-structure product is decided by SCC analysis.
Generalized acceptance is kept all the way through; no degeneralization.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Classification,
    Eventually,
    Exists,
    FalseLit,
    ForAll,
    Formula,
    Always,
    Implies,
    Next,
    Not,
    Or,
    Release,
    TrueLit,
    Until,
    classify,
    is_ctl,
    normalize,
    pretty,
)
from .kripke import KripkeStructure, adjacency, validate


class CheckError(Exception):
    """Base class for verification-level failures."""


class NonTotalStructure(CheckError):
    """The structure has deadlocks (or other validity violations), so path
    semantics are undefined."""

    def __init__(self, problems: Sequence[str]):
        super().__init__("structure unsuitable for path semantics: " + "; ".join(problems))
        self.problems = list(problems)


class NotAStateFormula(CheckError):
    pass


class QuantifierPresent(CheckError):
    """A path quantifier appeared where pure LTL was required."""


@dataclass(frozen=True)
class SatSet:
    """States satisfying a formula."""

    members: frozenset[str]
    formula: Formula


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic path: ``prefix`` then ``cycle`` repeated forever.

    Consecutive elements (including cycle[-1] -> cycle[0] and, when the
    prefix is nonempty, prefix[-1] -> cycle[0]) are transitions.
    """

    prefix: tuple
    cycle: tuple


@dataclass(frozen=True)
class VerificationResult:
    formula: Formula
    holds: bool
    sat: SatSet
    witness: Optional[Lasso] = None
    warnings: tuple[str, ...] = ()


# -- negation normal form -----------------------------------------------------

def nnf(f: Formula, negated: bool = False) -> Formula:
    """Push negations to atoms; rejects path quantifiers."""
    if isinstance(f, Atom):
        return Not(f) if negated else f
    if isinstance(f, TrueLit):
        return FALSE if negated else TRUE
    if isinstance(f, FalseLit):
        return TRUE if negated else FALSE
    if isinstance(f, Not):
        return nnf(f.operand, not negated)
    if isinstance(f, And):
        cls = Or if negated else And
        return cls(nnf(f.left, negated), nnf(f.right, negated))
    if isinstance(f, Or):
        cls = And if negated else Or
        return cls(nnf(f.left, negated), nnf(f.right, negated))
    if isinstance(f, Implies):
        if negated:
            return And(nnf(f.left), nnf(f.right, True))
        return Or(nnf(f.left, True), nnf(f.right))
    if isinstance(f, Next):
        return Next(nnf(f.operand, negated))
    if isinstance(f, Until):
        cls = Release if negated else Until
        return cls(nnf(f.left, negated), nnf(f.right, negated))
    if isinstance(f, Release):
        cls = Until if negated else Release
        return cls(nnf(f.left, negated), nnf(f.right, negated))
    if isinstance(f, Eventually):
        if negated:
            return Release(FALSE, nnf(f.operand, True))
        return Until(TRUE, nnf(f.operand))
    if isinstance(f, Always):
        if negated:
            return Until(TRUE, nnf(f.operand, True))
        return Release(FALSE, nnf(f.operand))
    if isinstance(f, (Exists, ForAll)):
        raise QuantifierPresent(f"path quantifier in LTL context: {pretty(f)}")
    raise TypeError(f"not a formula: {f!r}")


# -- LTL to generalized Buchi automaton ---------------------------------------

Guard = frozenset[tuple[Atom, bool]]


@dataclass(frozen=True)
class BuchiAutomaton:
    """Generalized Buchi automaton with guards (literal sets) on edges.

    Node 0 is the dedicated initial node; it has no incoming edges.  A run
    over a word consumes one letter per edge taken.  Acceptance: a run is
    accepting when it visits every set in ``accepting_sets`` infinitely
    often.
    """

    nodes: frozenset[int]
    edges: tuple[tuple[int, Guard, int], ...]
    initial: frozenset[int]
    accepting_sets: tuple[frozenset[int], ...]


def guard_satisfied(guard: Guard, letter: frozenset[Atom]) -> bool:
    return all((atom in letter) == positive for atom, positive in guard)


_INIT = 0


class _GNode:
    __slots__ = ("node_id", "incoming", "new", "old", "nxt")

    def __init__(self, node_id: int, incoming: set[int], new: set[Formula],
                 old: set[Formula], nxt: set[Formula]):
        self.node_id = node_id
        self.incoming = incoming
        self.new = new
        self.old = old
        self.nxt = nxt


def _fkey(f: Formula) -> str:
    return pretty(f)


def _is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.operand, Atom))


def _negation_of(f: Formula) -> Formula:
    return f.operand if isinstance(f, Not) else Not(f)


def ltl_to_buchi(psi: Formula) -> BuchiAutomaton:
    """Node-splitting tableau translation of a quantifier-free formula.

    The result reads one letter per step: an edge into node r is guarded
    by the literals of r, so a run q0 q1 ... over w demands w[i] satisfy
    the guard of the edge (q_i, q_{i+1}).
    """
    root = nnf(psi)
    counter = itertools.count(1)
    done: list[_GNode] = []

    def expand(node: _GNode) -> None:
        while True:
            if not node.new:
                for existing in done:
                    if existing.old == node.old and existing.nxt == node.nxt:
                        existing.incoming |= node.incoming
                        return
                done.append(node)
                node = _GNode(next(counter), {node.node_id}, set(node.nxt), set(), set())
                continue
            f = min(node.new, key=_fkey)
            node.new.discard(f)
            if f in node.old:
                continue
            if isinstance(f, FalseLit):
                return  # inconsistent node
            if isinstance(f, TrueLit):
                # recorded like a literal so fulfillment tests (u.right in
                # old) see it; it never contributes to edge guards
                node.old.add(f)
                continue
            if _is_literal(f):
                if _negation_of(f) in node.old:
                    return
                node.old.add(f)
                continue
            node.old.add(f)
            if isinstance(f, And):
                node.new |= {f.left, f.right} - node.old
                continue
            if isinstance(f, Next):
                node.nxt.add(f.operand)
                continue
            if isinstance(f, Or):
                first = _GNode(next(counter), set(node.incoming),
                               node.new | ({f.left} - node.old),
                               set(node.old), set(node.nxt))
                second = _GNode(next(counter), set(node.incoming),
                                node.new | ({f.right} - node.old),
                                set(node.old), set(node.nxt))
            elif isinstance(f, Until):
                first = _GNode(next(counter), set(node.incoming),
                               node.new | ({f.left} - node.old),
                               set(node.old), node.nxt | {f})
                second = _GNode(next(counter), set(node.incoming),
                                node.new | ({f.right} - node.old),
                                set(node.old), set(node.nxt))
            elif isinstance(f, Release):
                first = _GNode(next(counter), set(node.incoming),
                               node.new | ({f.right} - node.old),
                               set(node.old), node.nxt | {f})
                second = _GNode(next(counter), set(node.incoming),
                                node.new | ({f.left, f.right} - node.old),
                                set(node.old), set(node.nxt))
            else:
                raise TypeError(f"unexpected formula in tableau: {f!r}")
            expand(first)
            node = second

    expand(_GNode(next(counter), {_INIT}, {root}, set(), set()))

    node_ids = frozenset({_INIT} | {n.node_id for n in done})
    edges: list[tuple[int, Guard, int]] = []
    for node in done:
        guard: Guard = frozenset(
            (lit.operand, False) if isinstance(lit, Not) else (lit, True)
            for lit in node.old
            if _is_literal(lit)
        )
        for src in sorted(node.incoming):
            edges.append((src, guard, node.node_id))
    edges.sort(key=lambda e: (e[0], e[2], sorted((a.text(), p) for a, p in e[1])))

    untils = sorted(
        {g for g in _closure(root) if isinstance(g, Until)},
        key=_fkey,
    )
    if untils:
        accepting = tuple(
            frozenset(n.node_id for n in done if u not in n.old or u.right in n.old)
            for u in untils
        )
    else:
        accepting = (node_ids,)

    return BuchiAutomaton(
        nodes=node_ids,
        edges=tuple(edges),
        initial=frozenset({_INIT}),
        accepting_sets=accepting,
    )


def _closure(f: Formula) -> Iterable[Formula]:
    yield f
    if isinstance(f, (Not, Next)):
        yield from _closure(f.operand)
    elif isinstance(f, (And, Or, Until, Release)):
        yield from _closure(f.left)
        yield from _closure(f.right)


# -- product and emptiness ----------------------------------------------------

@dataclass
class Product:
    """Product of a structure and an automaton.  Nodes are (state, node)
    pairs; an edge consumes the source state's label."""

    adjacencies: dict
    accepting_sets: tuple[frozenset, ...]


def build_product(
    k: KripkeStructure,
    aut: BuchiAutomaton,
    labeling: Optional[Mapping[str, frozenset[Atom]]] = None,
) -> Product:
    labels = labeling if labeling is not None else k.labeling
    ksucc = adjacency(k)
    by_src: dict[int, list[tuple[Guard, int]]] = {}
    for src, guard, dst in aut.edges:
        by_src.setdefault(src, []).append((guard, dst))

    adj: dict = {}
    for s in sorted(k.states):
        letter = labels.get(s, frozenset())
        for q in sorted(aut.nodes):
            enabled = [dst for guard, dst in by_src.get(q, ()) if guard_satisfied(guard, letter)]
            adj[(s, q)] = sorted((t, dst) for t in ksucc.get(s, ()) for dst in enabled)
    accepting = tuple(
        frozenset((s, q) for (s, q) in adj if q in fset)
        for fset in aut.accepting_sets
    )
    return Product(adjacencies=adj, accepting_sets=accepting)


def _tarjan(adj: Mapping) -> list[list]:
    """Iterative Tarjan; SCCs in reverse topological order of discovery."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    sccs: list[list] = []
    counter = itertools.count()

    for start in sorted(adj):
        if start in index:
            continue
        work = [(start, iter(adj.get(start, ())))]
        index[start] = low[start] = next(counter)
        stack.append(start)
        on_stack.add(start)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in adj:
                    continue
                if succ not in index:
                    index[succ] = low[succ] = next(counter)
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(adj.get(succ, ()))))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                sccs.append(component)
    return sccs


def _good_sccs(product: Product) -> list[set]:
    """Nontrivial SCCs intersecting every accepting set."""
    adj = product.adjacencies
    out: list[set] = []
    for component in _tarjan(adj):
        members = set(component)
        nontrivial = len(members) > 1 or any(
            n in adj.get(n, ()) for n in members
        )
        if not nontrivial:
            continue
        if all(members & fset for fset in product.accepting_sets):
            out.append(members)
    return out


def nodes_reaching_acceptance(product: Product) -> set:
    """All product nodes from which an accepting run exists: backward
    closure of the union of good SCCs."""
    good = _good_sccs(product)
    rev: dict = {n: [] for n in product.adjacencies}
    for src, dsts in product.adjacencies.items():
        for dst in dsts:
            rev[dst].append(src)
    seen: set = set()
    queue = deque()
    for members in good:
        for n in members:
            if n not in seen:
                seen.add(n)
                queue.append(n)
    while queue:
        node = queue.popleft()
        for prev in rev.get(node, ()):
            if prev not in seen:
                seen.add(prev)
                queue.append(prev)
    return seen


def _bfs_path(adj: Mapping, start, goals: set, within: Optional[set] = None,
              require_step: bool = False) -> Optional[list]:
    """Deterministic shortest path from start to any goal (sorted neighbor
    order).  Returns the node list including both endpoints; with
    ``require_step`` the path takes at least one edge even if start is a
    goal."""
    if start in goals and not require_step:
        return [start]
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for succ in adj.get(node, ()):
            if within is not None and succ not in within:
                continue
            if succ in goals:
                path = [succ, node]
                while parent[node] is not None:
                    node = parent[node]
                    path.append(node)
                return list(reversed(path))
            if succ not in parent:
                parent[succ] = node
                queue.append(succ)
    return None


def exists_accepting_run(product: Product, start) -> Optional[Lasso]:
    """Lasso witnessing an accepting run from ``start``, or None.

    Deterministic: BFS distances break ties, then node order.  The cycle
    visits a representative of every accepting set.
    """
    adj = product.adjacencies
    if start not in adj:
        return None
    # forward reachability with BFS tree
    dist = {start: 0}
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for succ in adj.get(node, ()):
            if succ not in dist:
                dist[succ] = dist[node] + 1
                parent[succ] = node
                queue.append(succ)

    good = [members for members in _good_sccs(product) if members & dist.keys()]
    if not good:
        return None
    candidates = [(dist[n], n, members) for members in good for n in members if n in dist]
    _, entry, scc = min(candidates, key=lambda item: (item[0], item[1]))

    prefix = []
    node = entry
    while parent[node] is not None:
        node = parent[node]
        prefix.append(node)
    prefix.reverse()

    cycle = [entry]
    current = entry
    covered = [bool(fset & {entry}) for fset in product.accepting_sets]
    for i, fset in enumerate(product.accepting_sets):
        if covered[i]:
            continue
        segment = _bfs_path(adj, current, fset & scc, within=scc)
        if segment is None:
            return None  # cannot happen for an SCC intersecting fset
        cycle.extend(segment[1:])
        current = segment[-1]
        for j, other in enumerate(product.accepting_sets):
            if not covered[j] and any(n in other for n in segment):
                covered[j] = True
    closing = _bfs_path(adj, current, {entry}, within=scc, require_step=True)
    if closing is None:
        return None
    cycle.extend(closing[1:-1] if len(closing) > 1 else [])
    return Lasso(prefix=tuple(prefix), cycle=tuple(cycle))


def accepts_word(
    aut: BuchiAutomaton,
    prefix: Sequence[frozenset[Atom]],
    cycle: Sequence[frozenset[Atom]],
) -> bool:
    """Membership of the ultimately periodic word prefix . cycle^omega."""
    if not cycle:
        raise ValueError("cycle must be nonempty")
    letters = list(prefix) + list(cycle)
    total = len(letters)
    loop_to = len(prefix)

    by_src: dict[int, list[tuple[Guard, int]]] = {}
    for src, guard, dst in aut.edges:
        by_src.setdefault(src, []).append((guard, dst))

    def successors(position: int, q: int) -> list[tuple[int, int]]:
        nxt = position + 1 if position + 1 < total else loop_to
        return [
            (nxt, dst)
            for guard, dst in by_src.get(q, ())
            if guard_satisfied(guard, letters[position])
        ]

    # build the reachable part of the position-automaton graph
    adj: dict = {}
    roots = [(0, q) for q in sorted(aut.initial)]
    stack = list(roots)
    while stack:
        node = stack.pop()
        if node in adj:
            continue
        adj[node] = sorted(successors(*node))
        stack.extend(adj[node])
    accepting = tuple(
        frozenset((i, q) for (i, q) in adj if q in fset)
        for fset in aut.accepting_sets
    )
    product = Product(adjacencies=adj, accepting_sets=accepting)
    reach = nodes_reaching_acceptance(product)
    return any(root in reach for root in roots)


# -- CTL fixpoints -------------------------------------------------------------

def _ex(adj: Mapping[str, list[str]], target: frozenset[str]) -> frozenset[str]:
    return frozenset(s for s, succs in adj.items() if any(t in target for t in succs))


def _eu(adj: Mapping[str, list[str]], hold: frozenset[str], goal: frozenset[str]) -> frozenset[str]:
    rev: dict[str, list[str]] = {s: [] for s in adj}
    for s, succs in adj.items():
        for t in succs:
            rev.setdefault(t, []).append(s)
    acc = set(goal)
    queue = deque(goal)
    while queue:
        t = queue.popleft()
        for s in rev.get(t, ()):
            if s in hold and s not in acc:
                acc.add(s)
                queue.append(s)
    return frozenset(acc)


def _eg(adj: Mapping[str, list[str]], hold: frozenset[str]) -> frozenset[str]:
    z = set(hold)
    changed = True
    while changed:
        changed = False
        for s in list(z):
            if not any(t in z for t in adj.get(s, ())):
                z.discard(s)
                changed = True
    return frozenset(z)


def sat_ex(k: KripkeStructure, target: SatSet) -> SatSet:
    return SatSet(_ex(adjacency(k), target.members), Exists(Next(target.formula)))


def sat_eu(k: KripkeStructure, hold: SatSet, goal: SatSet) -> SatSet:
    return SatSet(
        _eu(adjacency(k), hold.members, goal.members),
        Exists(Until(hold.formula, goal.formula)),
    )


def sat_eg(k: KripkeStructure, hold: SatSet) -> SatSet:
    return SatSet(_eg(adjacency(k), hold.members), Exists(Always(hold.formula)))


def _ctl_sat(k: KripkeStructure, f: Formula, adj: Mapping[str, list[str]],
             memo: dict[Formula, frozenset[str]]) -> frozenset[str]:
    if f in memo:
        return memo[f]
    every = frozenset(k.states)

    def rec(g: Formula) -> frozenset[str]:
        return _ctl_sat(k, g, adj, memo)

    if isinstance(f, Atom):
        result = frozenset(s for s in k.states if f in k.labels(s))
    elif isinstance(f, TrueLit):
        result = every
    elif isinstance(f, FalseLit):
        result = frozenset()
    elif isinstance(f, Not):
        result = every - rec(f.operand)
    elif isinstance(f, And):
        result = rec(f.left) & rec(f.right)
    elif isinstance(f, Or):
        result = rec(f.left) | rec(f.right)
    elif isinstance(f, Implies):
        result = (every - rec(f.left)) | rec(f.right)
    elif isinstance(f, Exists):
        body = f.operand
        if isinstance(body, Next):
            result = _ex(adj, rec(body.operand))
        elif isinstance(body, Eventually):
            result = _eu(adj, every, rec(body.operand))
        elif isinstance(body, Always):
            result = _eg(adj, rec(body.operand))
        elif isinstance(body, Until):
            result = _eu(adj, rec(body.left), rec(body.right))
        elif isinstance(body, Release):
            left, right = rec(body.left), rec(body.right)
            result = _eu(adj, right, left & right) | _eg(adj, right)
        else:
            raise NotAStateFormula(f"not in the CTL fragment: {pretty(f)}")
    elif isinstance(f, ForAll):
        body = f.operand
        if isinstance(body, Next):
            result = every - _ex(adj, every - rec(body.operand))
        elif isinstance(body, Eventually):
            result = every - _eg(adj, every - rec(body.operand))
        elif isinstance(body, Always):
            result = every - _eu(adj, every, every - rec(body.operand))
        elif isinstance(body, Until):
            ls, rs = rec(body.left), rec(body.right)
            bad = _eu(adj, every - rs, (every - ls) & (every - rs)) | _eg(adj, every - rs)
            result = every - bad
        elif isinstance(body, Release):
            ls, rs = rec(body.left), rec(body.right)
            result = every - _eu(adj, every - ls, every - rs)
        else:
            raise NotAStateFormula(f"not in the CTL fragment: {pretty(f)}")
    else:
        raise NotAStateFormula(f"not in the CTL fragment: {pretty(f)}")
    memo[f] = result
    return result


# -- full CTL* ------------------------------------------------------------------

@dataclass
class _StarContext:
    k: KripkeStructure
    memo: dict[Formula, frozenset[str]] = field(default_factory=dict)
    extra_labels: dict[str, set[Atom]] = field(default_factory=dict)
    counter: "itertools.count" = field(default_factory=lambda: itertools.count(1))


def _core_is_state(f: Formula) -> bool:
    if isinstance(f, (Atom, TrueLit)):
        return True
    if isinstance(f, Not):
        return _core_is_state(f.operand)
    if isinstance(f, And):
        return _core_is_state(f.left) and _core_is_state(f.right)
    if isinstance(f, Exists):
        return True
    return False


def _contains_quantifier(f: Formula) -> bool:
    if isinstance(f, Exists):
        return True
    if isinstance(f, Not):
        return _contains_quantifier(f.operand)
    if isinstance(f, (And, Until)):
        return _contains_quantifier(f.left) or _contains_quantifier(f.right)
    if isinstance(f, Next):
        return _contains_quantifier(f.operand)
    return False


def _abstract(ctx: _StarContext, f: Formula) -> Formula:
    """Replace maximal quantified state subformulas with fresh atoms whose
    labels reflect their satisfaction sets."""
    if _core_is_state(f) and _contains_quantifier(f):
        members = _star_sat(ctx, f)
        hole = Atom(value=f"__hole{next(ctx.counter)}__")
        for s in members:
            ctx.extra_labels.setdefault(s, set()).add(hole)
        return hole
    if isinstance(f, Not):
        return Not(_abstract(ctx, f.operand))
    if isinstance(f, And):
        return And(_abstract(ctx, f.left), _abstract(ctx, f.right))
    if isinstance(f, Next):
        return Next(_abstract(ctx, f.operand))
    if isinstance(f, Until):
        return Until(_abstract(ctx, f.left), _abstract(ctx, f.right))
    return f


def _merged_labels(ctx: _StarContext) -> dict[str, frozenset[Atom]]:
    return {
        s: ctx.k.labels(s) | frozenset(ctx.extra_labels.get(s, ()))
        for s in ctx.k.states
    }


def _star_sat(ctx: _StarContext, f: Formula) -> frozenset[str]:
    """Satisfaction set of a normalized (core basis) state formula."""
    if f in ctx.memo:
        return ctx.memo[f]
    k = ctx.k
    if isinstance(f, Atom):
        result = frozenset(s for s in k.states if f in k.labels(s))
    elif isinstance(f, TrueLit):
        result = frozenset(k.states)
    elif isinstance(f, Not):
        result = frozenset(k.states) - _star_sat(ctx, f.operand)
    elif isinstance(f, And):
        result = _star_sat(ctx, f.left) & _star_sat(ctx, f.right)
    elif isinstance(f, Exists):
        body = f.operand
        if _core_is_state(body):
            result = _star_sat(ctx, body)  # E over a state formula, structure total
        else:
            ltl_body = _abstract(ctx, body)
            aut = ltl_to_buchi(ltl_body)
            product = build_product(k, aut, labeling=_merged_labels(ctx))
            reach = nodes_reaching_acceptance(product)
            result = frozenset(s for s in k.states if (s, _INIT) in reach)
    else:
        raise NotAStateFormula(f"not a normalized state formula: {pretty(f)}")
    ctx.memo[f] = result
    return result


def sat_states(k: KripkeStructure, f: Formula, *, ctl_fast_path: bool = True) -> SatSet:
    """Satisfaction set of a CTL* state formula over a valid total structure."""
    if classify(f) is not Classification.STATE:
        raise NotAStateFormula(f"not a state formula: {pretty(f)}")
    problems = validate(k, require_total=True)
    if problems:
        raise NonTotalStructure(problems)
    if ctl_fast_path and is_ctl(f):
        members = _ctl_sat(k, f, adjacency(k), {})
    else:
        members = _star_sat(_StarContext(k), normalize(f))
    return SatSet(frozenset(members), f)


# -- witnesses -----------------------------------------------------------------

def _primitive_cycle(cycle: list) -> list:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


def canonical_lasso(prefix: Sequence, cycle: Sequence) -> Lasso:
    """Reduce a lasso without changing the denoted path: collapse repeated
    cycle blocks, then absorb a prefix tail equal to the cycle tail by
    rotating the cycle."""
    pre = list(prefix)
    cyc = _primitive_cycle(list(cycle))
    while pre and pre[-1] == cyc[-1]:
        pre.pop()
        cyc = [cyc[-1]] + cyc[:-1]
    return Lasso(prefix=tuple(pre), cycle=tuple(cyc))


def _project_lasso(lasso: Lasso) -> Lasso:
    return canonical_lasso(
        [s for s, _ in lasso.prefix],
        [s for s, _ in lasso.cycle],
    )


def _witness_for(k: KripkeStructure, existential: Exists, start: str) -> Optional[Lasso]:
    ctx = _StarContext(k)
    ltl_body = _abstract(ctx, existential.operand)
    aut = ltl_to_buchi(ltl_body)
    product = build_product(k, aut, labeling=_merged_labels(ctx))
    run = exists_accepting_run(product, (start, _INIT))
    if run is None:
        return None
    return _project_lasso(run)


def check(k: KripkeStructure, f: Formula, want_witness: bool = False) -> VerificationResult:
    """Does every initial state satisfy f?

    With ``want_witness``, existential top levels that hold yield a
    satisfying lasso and failed universal/negated-existential top levels
    yield a counterexample lasso (both from a deterministic minimal
    initial state).
    """
    sat = sat_states(k, f)
    holds = k.initial <= sat.members
    warnings: tuple[str, ...] = ()
    if not k.initial:
        warnings = ("initial-state set is empty; property holds vacuously",)

    witness: Optional[Lasso] = None
    if want_witness and k.initial:
        nf = normalize(f)
        if isinstance(nf, Exists) and holds:
            witness = _witness_for(k, nf, min(k.initial))
        elif isinstance(nf, Not) and isinstance(nf.operand, Exists) and not holds:
            failing = min(s for s in k.initial if s not in sat.members)
            witness = _witness_for(k, nf.operand, failing)
    return VerificationResult(
        formula=f,
        holds=holds,
        sat=sat,
        witness=witness,
        warnings=warnings,
    )
