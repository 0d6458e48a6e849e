"""DPLL-style projected model counter with components, caching and BCE.

``count`` returns the number of assignments to the declared variables
outside X that extend to a model. Branching only ever happens on
variables outside X; components made solely of X-variables reduce to a
satisfiability test.

Blocked clause elimination has three modes: ``OFF`` (none), ``PRE``
(once, before search) and ``DYN`` (at every node of the search, through
:class:`~pmcbce.bce.BlockedClauseManager`).
"""

from __future__ import annotations

import enum
import time
from array import array
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .bce import BlockedClauseManager
from .bcp import FormulaState
from .formula import ProjectedFormula


class BceMode(enum.Enum):
    OFF = "off"
    PRE = "pre"
    DYN = "dyn"


class CountTimeout(Exception):
    pass


@dataclass
class Stats:
    decisions: int = 0
    blocked_removed: int = 0
    cache_hits: int = 0
    cache_stores: int = 0
    max_depth: int = 0
    sat_leaf_calls: int = 0
    conflicts: int = 0


@dataclass
class CountResult:
    count: int
    stats: Stats = field(default_factory=Stats)


@dataclass(frozen=True)
class AuditEntry:
    depth: int
    clauses: dict[int, tuple[int, ...]]
    variables: tuple[int, ...]
    branch_var: int
    positive: int
    negative: int


@dataclass(frozen=True)
class Component:
    clauses: dict[int, tuple[int, ...]]
    variables: tuple[int, ...]


def connected_components(residual: Mapping[int, Iterable[int]]) -> list[Component]:
    """Split clauses into variable-disjoint groups (primal graph components).

    Components are ordered by smallest variable; clauses keep their ids.
    """
    parent: dict[int, int] = {}

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    residual = {cid: tuple(lits) for cid, lits in residual.items()}
    for lits in residual.values():
        for l in lits:
            parent.setdefault(abs(l), abs(l))
        if lits:
            r0 = find(abs(lits[0]))
            for l in lits[1:]:
                r = find(abs(l))
                if r != r0:
                    if r < r0:
                        r, r0 = r0, r
                    parent[r] = r0
    groups: dict[int, dict[int, tuple[int, ...]]] = {}
    for cid in sorted(residual):
        lits = residual[cid]
        if not lits:
            continue
        groups.setdefault(find(abs(lits[0])), {})[cid] = lits
    members: dict[int, list[int]] = {}
    for v in parent:
        members.setdefault(find(v), []).append(v)
    return [Component(groups[root], tuple(sorted(members[root]))) for root in sorted(groups)]


def cache_key(clauses: Iterable[Iterable[int]]) -> bytes:
    """Canonical encoding of a set of residual clauses."""
    canon = sorted({tuple(sorted(set(c), key=lambda l: (abs(l), l < 0))) for c in clauses})
    buf = array("q")
    for c in canon:
        buf.extend(c)
        buf.append(0)
    return buf.tobytes()


def select_branch_variable(clauses: Iterable[Iterable[int]], projection) -> int:
    """Most frequent variable outside X; ties go to the smallest index."""
    occ: dict[int, int] = {}
    for c in clauses:
        for l in c:
            v = abs(l)
            if v not in projection:
                occ[v] = occ.get(v, 0) + 1
    if not occ:
        raise ValueError("component has no variable outside the projection set")
    return min(occ, key=lambda v: (-occ[v], v))


def dpll_sat(clauses: Iterable[Iterable[int]]) -> bool:
    """Plain DPLL: unit propagation, smallest variable first, positive phase first."""
    return _dpll([list(c) for c in clauses], {})


def _dpll(clauses: list[list[int]], assignment: dict[int, bool]) -> bool:
    while True:
        reduced = []
        unit = None
        for c in clauses:
            lits = []
            sat = False
            for l in c:
                v = assignment.get(abs(l))
                if v is None:
                    lits.append(l)
                elif v == (l > 0):
                    sat = True
                    break
            if sat:
                continue
            if not lits:
                return False
            if len(lits) == 1 and unit is None:
                unit = lits[0]
            reduced.append(lits)
        clauses = reduced
        if unit is None:
            break
        assignment = dict(assignment)
        assignment[abs(unit)] = unit > 0
    if not clauses:
        return True
    v = min(abs(l) for c in clauses for l in c)
    for phase in (True, False):
        a = dict(assignment)
        a[v] = phase
        if _dpll(clauses, a):
            return True
    return False


class Counter:
    """One counting engine: owns its formula state, manager and cache.

    ``use_cache=False`` disables memoization entirely; ``cache_cap`` clears
    the cache whenever it would grow past that many entries.
    """

    def __init__(self, formula: ProjectedFormula, mode: BceMode = BceMode.DYN, *,
                 use_cache: bool = True, cache_cap: int | None = None,
                 deadline: float | None = None, audit: bool = False):
        self.formula = formula
        self.mode = BceMode(mode)
        self.projection = formula.projection
        self.state = FormulaState(formula)
        self.manager: BlockedClauseManager | None = None
        self.cache: dict[bytes, int] = {}
        self.use_cache = use_cache
        self.cache_cap = cache_cap
        self.deadline = deadline
        self.stats = Stats()
        self.audit = audit
        self.calls = 0
        self.audit_log: list[AuditEntry] = []
        self._prepared = False

    def prepare(self) -> set[int]:
        """Build the manager (PRE/DYN) and drop the clauses blocked at the root."""
        b0: set[int] = set()
        if self.mode is not BceMode.OFF:
            self.manager = BlockedClauseManager(self.formula)
            b0 = self.manager.init()
            self.state.remove_permanently(sorted(b0))
            self.stats.blocked_removed += len(b0)
            if self.mode is BceMode.PRE:
                self.manager = None
        self._prepared = True
        return b0

    def count_main(self, decision: int | None = None) -> int:
        """Count the whole formula, optionally under one decision literal."""
        if not self._prepared:
            raise RuntimeError("prepare() must run first")
        base_depth = self.manager.depth if self.manager else 0
        scope = tuple(range(1, self.formula.num_vars + 1))
        n = self._count_main(self.formula.ids, scope, decision, 0)
        if self.manager is not None and self.manager.depth != base_depth:
            raise AssertionError("manager frames leaked")
        return n

    def count(self) -> CountResult:
        self.prepare()
        return CountResult(self.count_main(), self.stats)

    def _check_depth(self, depth):
        if self.manager is not None and self.manager.depth != depth + 2:
            raise AssertionError(f"manager depth {self.manager.depth} at recursion depth {depth}")

    def _count_main(self, clause_ids: Iterable[int], scope: tuple[int, ...], decision: int | None, depth: int) -> int:
        """Count ∃X over the non-X variables of ``scope``.

        ``clause_ids`` bounds the clauses this call may look at; ``decision``
        is assigned first (None at the root).
        """
        if depth > self.formula.num_vars:
            raise AssertionError("recursion deeper than the number of variables")
        self.calls += 1
        stats = self.stats
        if depth > stats.max_depth:
            stats.max_depth = depth
        state = self.state
        mgr = self.manager
        x = self.projection

        state.push_frame()
        res = state.assume([decision]) if decision is not None else state.bcp()
        if res.conflict:
            stats.conflicts += 1
            if mgr is not None:
                mgr.propagate((), ())
                if self.audit:
                    self._check_depth(depth)
                mgr.backtrack()
            state.pop_frame()
            return 0

        if mgr is not None:
            blocked = mgr.propagate(res.satisfied, [abs(l) for l in res.units if abs(l) in x])
            if self.audit:
                self._check_depth(depth)
            if blocked:
                state.remove(sorted(blocked))
                stats.blocked_removed += len(blocked)

        residual = state.residual(clause_ids)
        present = {abs(l) for lits in residual.values() for l in lits}
        value = state.value
        free = sum(1 for v in scope if v not in x and value[v] == 0 and v not in present)

        key = None
        if self.use_cache:
            key = cache_key(residual.values())
            hit = self.cache.get(key)
            if hit is not None:
                stats.cache_hits += 1
                self._leave(mgr)
                return hit << free

        cpt = 1
        for comp in connected_components(residual):
            if not any(v not in x for v in comp.variables):
                stats.sat_leaf_calls += 1
                if not dpll_sat(comp.clauses.values()):
                    cpt = 0
                    break
                continue
            sub_key = None
            if self.use_cache and len(comp.clauses) < len(residual):
                sub_key = cache_key(comp.clauses.values())
                hit = self.cache.get(sub_key)
                if hit is not None:
                    stats.cache_hits += 1
                    cpt *= hit
                    if cpt == 0:
                        break
                    continue
            v = select_branch_variable(comp.clauses.values(), x)
            branches = []
            for lit in (v, -v):
                self._tick()
                stats.decisions += 1
                branches.append(self._count_main(tuple(comp.clauses), comp.variables, lit, depth + 1))
            sub = branches[0] + branches[1]
            if self.audit:
                self.audit_log.append(AuditEntry(depth, dict(comp.clauses), comp.variables, v, *branches))
            if sub_key is not None:
                self._store(sub_key, sub)
            cpt *= sub
            if cpt == 0:
                break

        if key is not None:
            self._store(key, cpt)
        self._leave(mgr)
        return cpt << free

    def _leave(self, mgr):
        if mgr is not None:
            mgr.backtrack()
        self.state.pop_frame()

    def _store(self, key: bytes, value: int) -> None:
        if self.cache_cap is not None and len(self.cache) >= self.cache_cap and key not in self.cache:
            self.cache.clear()
        self.cache[key] = value
        self.stats.cache_stores += 1

    def _tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise CountTimeout()


def count(formula: ProjectedFormula, mode: BceMode | str = BceMode.DYN, **kwargs) -> CountResult:
    """Projected model count of ``formula`` over its declared non-X variables."""
    return Counter(formula, BceMode(mode), **kwargs).count()
