"""Conditioning and unit propagation over a formula with stable clause ids.

Clauses are never rewritten. A :class:`FormulaState` keeps the current
partial assignment and a status per clause id; falsified literals are
masked when a clause is viewed. All changes are recorded on a trail so
that :meth:`FormulaState.pop_frame` restores the previous state exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .formula import ProjectedFormula

LIVE = 0
SATISFIED = 1
REMOVED = 2
TAUTOLOGICAL = 3

#: View of a clause that is satisfied (or a tautology).
TOP = True


@dataclass
class BcpResult:
    units: list[int] = field(default_factory=list)
    satisfied: list[int] = field(default_factory=list)
    conflict: bool = False

    def merge(self, other: "BcpResult") -> "BcpResult":
        self.units.extend(other.units)
        self.satisfied.extend(other.satisfied)
        self.conflict = self.conflict or other.conflict
        return self


class FormulaState:
    """Mutable assignment plus clause status over an immutable formula.

    Tautological input clauses are permanently out of play; they never
    appear as live, satisfied or removed.
    """

    def __init__(self, formula: ProjectedFormula):
        self.formula = formula
        self.value = [0] * (formula.num_vars + 1)
        self.status = [LIVE] * (len(formula) + 1)
        for cid in formula.tautologies:
            self.status[cid] = TAUTOLOGICAL
        self._assigned: list[int] = []
        self._killed: list[int] = []
        self._frames: list[tuple[int, int, list[int]]] = []
        self._dirty: list[int] = [cid for cid in formula.ids if self.status[cid] == LIVE]
        self._conflict = False

    # -- inspection -------------------------------------------------------

    def lit_value(self, lit: int) -> int:
        """1 if true, -1 if false, 0 if unassigned."""
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def is_live(self, cid: int) -> bool:
        return self.status[cid] == LIVE

    def view(self, cid: int):
        """The clause under the current assignment.

        ``TOP`` when satisfied or tautological, ``None`` when removed,
        otherwise the tuple of unassigned literals (empty tuple = falsified).
        """
        st = self.status[cid]
        if st in (SATISFIED, TAUTOLOGICAL):
            return TOP
        if st == REMOVED:
            return None
        return tuple(l for l in self.formula[cid].literals if self.value[abs(l)] == 0)

    def live_ids(self, among: Iterable[int] | None = None) -> list[int]:
        ids = self.formula.ids if among is None else among
        return [cid for cid in ids if self.status[cid] == LIVE]

    def residual(self, among: Iterable[int] | None = None) -> dict[int, tuple[int, ...]]:
        return {cid: self.view(cid) for cid in self.live_ids(among)}

    def assignment(self) -> dict[int, bool]:
        return {v: val > 0 for v, val in enumerate(self.value) if v and val}

    @property
    def depth(self) -> int:
        return len(self._frames)

    # -- trail ------------------------------------------------------------

    def push_frame(self) -> None:
        self._frames.append((len(self._assigned), len(self._killed), list(self._dirty)))

    def pop_frame(self) -> None:
        if not self._frames:
            raise RuntimeError("pop_frame on empty frame stack")
        n_assigned, n_killed, dirty = self._frames.pop()
        while len(self._assigned) > n_assigned:
            self.value[self._assigned.pop()] = 0
        while len(self._killed) > n_killed:
            self.status[self._killed.pop()] = LIVE
        self._dirty = dirty
        self._conflict = False

    def remove(self, ids: Iterable[int]) -> None:
        """Delete live clauses (e.g. blocked ones) until the frame is popped."""
        for cid in ids:
            if self.status[cid] != LIVE:
                raise ValueError(f"clause {cid} is not live")
            self.status[cid] = REMOVED
            self._killed.append(cid)

    def remove_permanently(self, ids: Iterable[int]) -> None:
        """Delete clauses below every frame; only legal with no open frame."""
        if self._frames:
            raise RuntimeError("permanent removal with open frames")
        for cid in ids:
            if self.status[cid] != LIVE:
                raise ValueError(f"clause {cid} is not live")
            self.status[cid] = REMOVED

    # -- propagation ------------------------------------------------------

    def _assign(self, lit: int, result: BcpResult) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self._assigned.append(v)
        result.units.append(lit)
        occ = self.formula.occurrences
        for cid in occ(lit):
            if self.status[cid] == LIVE:
                self.status[cid] = SATISFIED
                self._killed.append(cid)
                result.satisfied.append(cid)
        for cid in occ(-lit):
            if self.status[cid] == LIVE:
                self._dirty.append(cid)

    def condition(self, gamma: Iterable[int]) -> BcpResult:
        """Assign a consistent term without propagating.

        Clauses containing a literal of ``gamma`` become satisfied; the
        conflict flag is raised if some live clause is left with no literal.
        """
        gamma = list(dict.fromkeys(gamma))
        seen = set(gamma)
        for lit in gamma:
            if -lit in seen:
                raise ValueError(f"inconsistent term: {lit} and {-lit}")
            if self.value[abs(lit)] != 0:
                raise ValueError(f"variable {abs(lit)} already assigned")
        result = BcpResult()
        for lit in gamma:
            self._assign(lit, result)
        for cid in self._dirty:
            if self.status[cid] == LIVE and not any(self.value[abs(l)] == 0 for l in self.formula[cid].literals):
                result.conflict = True
                break
        self._conflict = self._conflict or result.conflict
        return result

    def bcp(self) -> BcpResult:
        """Unit-propagate to fixpoint, visiting touched clauses by ascending id per round."""
        result = BcpResult(conflict=self._conflict)
        if self._conflict:
            return result
        value = self.value
        formula = self.formula
        while self._dirty:
            batch = sorted(set(self._dirty))
            self._dirty = []
            for cid in batch:
                if self.status[cid] != LIVE:
                    continue
                unit = 0
                free = 0
                for l in formula[cid].literals:
                    if value[abs(l)] == 0:
                        free += 1
                        unit = l
                        if free > 1:
                            break
                if free == 0:
                    result.conflict = True
                    self._conflict = True
                    self._dirty = []
                    return result
                if free == 1:
                    self._assign(unit, result)
        return result

    def assume(self, lits: Iterable[int]) -> BcpResult:
        """``condition`` followed by ``bcp``, merged into one result."""
        result = self.condition(lits)
        if result.conflict:
            return result
        return result.merge(self.bcp())
