"""Dynamic detection of clauses blocked on projected variables.

A clause blocked by a literal over X can be dropped without changing the
projected count. :class:`BlockedClauseManager` keeps, for each pair
(literal over X, clause containing it), the ids of the clauses giving a
non-tautological resolvent, and makes one of them watch the pair. A pair
only needs attention when its watcher is deactivated; when no active
witness is left and the literal is unassigned, the clause is blocked.

Undoing a ``propagate`` only flips flags back: a triple parked on a dead
watcher is revived together with it, so watch lists never need repair.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .formula import ProjectedFormula, resolvent_set


@dataclass(frozen=True)
class ProtectedTriple:
    literal: int
    clause_id: int
    candidates: tuple[int, ...]

    def __repr__(self):
        return f"({self.literal}, {self.clause_id}, {{{', '.join(map(str, self.candidates))}}})"


@dataclass(frozen=True)
class Violation:
    kind: str
    triple: ProtectedTriple
    watcher: int | None
    message: str


def init_protected_triples(formula: ProjectedFormula) -> list[ProtectedTriple]:
    """One triple per (literal over X, non-tautological clause holding it).

    Tautological clauses are never candidates either: they are vacuous and
    never active in the manager.
    """
    taut = formula.tautologies
    triples = []
    for x in sorted(formula.projection):
        for lit in (x, -x):
            for cid in formula.occurrences(lit):
                if cid in taut:
                    continue
                cands = resolvent_set(formula[cid], lit, formula) - taut
                triples.append(ProtectedTriple(lit, cid, tuple(sorted(cands))))
    return triples


def init_watch_list(triples: Iterable[ProtectedTriple]) -> tuple[dict[int, list[ProtectedTriple]], list[int]]:
    """Attach every triple to its smallest candidate.

    Returns ``(watches, U)`` where U lists, in order of first appearance,
    the clauses having a triple with no candidate at all.
    """
    watches: dict[int, list[ProtectedTriple]] = {}
    blocked: dict[int, None] = {}
    for t in triples:
        if not t.candidates:
            blocked[t.clause_id] = None
        else:
            watches.setdefault(t.candidates[0], []).append(t)
    return watches, list(blocked)


class BlockedClauseManager:
    def __init__(self, formula: ProjectedFormula):
        self.formula = formula
        self.projection = formula.projection
        self.triples: list[ProtectedTriple] = []
        self.watches: dict[int, list[ProtectedTriple]] = {}
        self.is_assigned: dict[int, bool] = {}
        self.is_active: list[bool] = []
        self.frames: list[tuple[frozenset[int], tuple[int, ...]]] = []
        self._consumed: list[ProtectedTriple] = []
        self.initialized = False
        self.propagate_calls = 0
        self.backtrack_calls = 0

    def init(self, rng: random.Random | None = None) -> set[int]:
        """Build triples and watches, then deactivate every initially blocked clause.

        Returns all clause ids blocked at this point (direct ones and the
        cascade they trigger).
        """
        f = self.formula
        self.is_assigned = {x: False for x in self.projection}
        self.is_active = [True] * (len(f) + 1)
        self.is_active[0] = False
        for cid in f.tautologies:
            self.is_active[cid] = False
        self.triples = init_protected_triples(f)
        self.watches, initial = init_watch_list(self.triples)
        self._consumed = [t for t in self.triples if not t.candidates]
        self.frames = []
        self.initialized = True
        # Clauses in `initial` are blocked, not satisfied: report them too.
        for cid in initial:
            self.is_active[cid] = False
        work = list(initial)
        if rng is not None:
            rng.shuffle(work)
        cascade = self._run(deque(work), rng)
        self.frames.append((frozenset(), tuple(initial) + tuple(cascade)))
        self.propagate_calls += 1
        return set(initial) | set(cascade)

    def propagate(self, inactive: Iterable[int], assigned: Iterable[int],
                  rng: random.Random | None = None) -> set[int]:
        """Record newly dead clauses and newly assigned X-variables.

        ``inactive`` must contain every active clause the caller has just
        satisfied. Returns the clauses newly detected as blocked; they are
        deactivated as well. With ``rng`` the worklist is drained in random
        order instead of FIFO.
        """
        if not self.initialized:
            raise RuntimeError("propagate before init")
        dead = list(dict.fromkeys(inactive))
        ys = list(dict.fromkeys(assigned))
        for x in ys:
            if x not in self.is_assigned:
                raise ValueError(f"variable {x} is not projected")
            if self.is_assigned[x]:
                raise ValueError(f"variable {x} already assigned")
        for cid in dead:
            if not self.is_active[cid]:
                raise ValueError(f"clause {cid} already inactive")
        for x in ys:
            self.is_assigned[x] = True
        for cid in dead:
            self.is_active[cid] = False
        if rng is not None:
            rng.shuffle(dead)
        blocked = self._run(deque(dead), rng)
        self.frames.append((frozenset(ys), tuple(dead) + tuple(blocked)))
        self.propagate_calls += 1
        return set(blocked)

    def _run(self, work: deque, rng: random.Random | None) -> list[int]:
        is_active = self.is_active
        is_assigned = self.is_assigned
        watches = self.watches
        blocked: list[int] = []
        while work:
            if rng is not None and len(work) > 1:
                work.rotate(-rng.randrange(len(work)))
            alpha = work.popleft()
            watched = watches.get(alpha)
            if not watched:
                continue
            keep = []
            for t in watched:
                if is_assigned[abs(t.literal)] or not is_active[t.clause_id]:
                    keep.append(t)
                    continue
                for w in t.candidates:
                    if is_active[w]:
                        watches.setdefault(w, []).append(t)
                        break
                else:
                    keep.append(t)
                    blocked.append(t.clause_id)
                    work.append(t.clause_id)
                    is_active[t.clause_id] = False
            watches[alpha] = keep
        return blocked

    def backtrack(self) -> None:
        if not self.frames:
            raise RuntimeError("backtrack on empty frame stack")
        ys, cids = self.frames.pop()
        for x in ys:
            self.is_assigned[x] = False
        for cid in cids:
            self.is_active[cid] = True
        self.backtrack_calls += 1

    @property
    def depth(self) -> int:
        return len(self.frames)

    def snapshot(self) -> tuple[tuple[tuple[int, bool], ...], tuple[bool, ...]]:
        return tuple(sorted(self.is_assigned.items())), tuple(self.is_active)

    def verify_invariants(self) -> Violation | None:
        """Check the watch and parked invariants; return the first violation."""
        where: dict[ProtectedTriple, list[int]] = {}
        for w, lst in self.watches.items():
            for t in lst:
                where.setdefault(t, []).append(w)
        consumed = set(self._consumed)
        for t in self.triples:
            ws = where.get(t, [])
            if t in consumed:
                if ws:
                    return Violation("parked", t, ws[0], f"triple {t} has no candidate but is watched by {ws}")
                continue
            if len(ws) != 1:
                return Violation("parked", t, None, f"triple {t} sits in {len(ws)} watch lists {ws}")
            w = ws[0]
            if w not in t.candidates:
                return Violation("parked", t, w, f"triple {t} watched by non-candidate {w}")
            if not self.is_assigned[abs(t.literal)] and self.is_active[t.clause_id] and not self.is_active[w]:
                return Violation("watch", t, w,
                                 f"triple {t}: clause {t.clause_id} active, literal unassigned, "
                                 f"watcher {w} inactive")
        return None
