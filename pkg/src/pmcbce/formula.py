"""CNF formulas with stable clause identifiers and a projection set.

Literals are DIMACS-style signed integers: ``v`` is the positive literal of
variable ``v`` and ``-v`` its negation. Clause identifiers start at 1 and
follow file order; nothing in the package ever renumbers them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class DimacsError(ValueError):
    """Malformed DIMACS input. ``line`` is 1-based, or None for end of input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class _Tautology:
    __slots__ = ()

    def __repr__(self):
        return "TAUTOLOGY"

    def __bool__(self):
        return False


#: Returned by :func:`resolvent` when the resolvent contains a complementary pair.
TAUTOLOGY = _Tautology()


def var(lit: int) -> int:
    return abs(lit)


def lit_key(lit: int) -> tuple[int, int]:
    """Sort key: by variable index, positive literal before negative."""
    return abs(lit), lit < 0


def normalize(lits: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(lits), key=lit_key))


def is_tautology(lits: Iterable[int]) -> bool:
    s = set(lits)
    return any(-l in s for l in s)


@dataclass(frozen=True)
class Clause:
    id: int
    literals: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "literals", normalize(self.literals))

    @property
    def tautological(self) -> bool:
        return is_tautology(self.literals)

    @property
    def variables(self) -> frozenset[int]:
        return frozenset(abs(l) for l in self.literals)

    def __contains__(self, lit: int) -> bool:
        return lit in self.literals

    def __len__(self):
        return len(self.literals)

    def __iter__(self):
        return iter(self.literals)


@dataclass
class ProjectedFormula:
    """A clause store together with the set X of variables to forget.

    ``projection`` is X. Counting is over ``1..num_vars`` minus X.
    """

    num_vars: int
    clauses: list[Clause] = field(default_factory=list)
    projection: frozenset[int] = frozenset()

    def __post_init__(self):
        self.projection = frozenset(self.projection)
        for i, c in enumerate(self.clauses, start=1):
            if c.id != i:
                raise ValueError(f"clause ids must be 1..n in order, got {c.id} at position {i}")
            for l in c.literals:
                if l == 0 or abs(l) > self.num_vars:
                    raise ValueError(f"literal {l} out of range in clause {c.id}")
        for v in self.projection:
            if not 1 <= v <= self.num_vars:
                raise ValueError(f"projected variable {v} out of range")
        self._occ: dict[int, list[int]] = {}
        for c in self.clauses:
            for l in c.literals:
                self._occ.setdefault(l, []).append(c.id)
        self._taut = frozenset(c.id for c in self.clauses if c.tautological)

    @classmethod
    def from_lists(cls, clauses: Iterable[Iterable[int]], projection: Iterable[int] = (),
                   num_vars: int | None = None) -> "ProjectedFormula":
        """Build a formula from plain literal lists; ids follow list order."""
        lists = [list(c) for c in clauses]
        if num_vars is None:
            num_vars = max((abs(l) for c in lists for l in c), default=0)
        return cls(num_vars, [Clause(i, c) for i, c in enumerate(lists, start=1)], frozenset(projection))

    def __getitem__(self, cid: int) -> Clause:
        if cid < 1:
            raise IndexError(cid)
        return self.clauses[cid - 1]

    def __len__(self):
        return len(self.clauses)

    @property
    def ids(self) -> range:
        return range(1, len(self.clauses) + 1)

    def occurrences(self, lit: int) -> list[int]:
        """S_lit: ids of the clauses containing ``lit``, ascending."""
        return self._occ.get(lit, [])

    @property
    def tautologies(self) -> frozenset[int]:
        return self._taut

    @property
    def variables(self) -> frozenset[int]:
        """Variables occurring in at least one clause."""
        return frozenset(abs(l) for l in self._occ)

    @property
    def free_variables(self) -> frozenset[int]:
        """Declared variables that occur in no clause."""
        return frozenset(range(1, self.num_vars + 1)) - self.variables

    @property
    def counted_variables(self) -> frozenset[int]:
        return frozenset(range(1, self.num_vars + 1)) - self.projection

    @property
    def show(self) -> frozenset[int]:
        return self.counted_variables

    def with_projection(self, projection: Iterable[int]) -> "ProjectedFormula":
        return ProjectedFormula(self.num_vars, list(self.clauses), frozenset(projection))

    def without(self, removed: Iterable[int]) -> "ProjectedFormula":
        """A renumbered copy with the given clause ids dropped."""
        drop = set(removed)
        kept = [c.literals for c in self.clauses if c.id not in drop]
        return ProjectedFormula.from_lists(kept, self.projection, self.num_vars)

    def __eq__(self, other):
        if not isinstance(other, ProjectedFormula):
            return NotImplemented
        return (self.num_vars == other.num_vars and self.projection == other.projection
                and [(c.id, c.literals) for c in self.clauses]
                == [(c.id, c.literals) for c in other.clauses])

    def __repr__(self):
        return (f"ProjectedFormula(num_vars={self.num_vars}, clauses={len(self.clauses)}, "
                f"projection={sorted(self.projection)})")


def resolvent(a: Clause | Iterable[int], b: Clause | Iterable[int], lit: int):
    """Resolve ``a`` (containing ``lit``) with ``b`` (containing ``-lit``).

    Returns the normalized literal tuple, or TAUTOLOGY.
    """
    a_lits = set(a)
    b_lits = set(b)
    if lit not in a_lits or -lit not in b_lits:
        raise ValueError(f"cannot resolve on {lit}: literal missing from an operand")
    out = (a_lits - {lit}) | (b_lits - {-lit})
    if is_tautology(out):
        return TAUTOLOGY
    return normalize(out)


def resolvent_set(clause: Clause, lit: int, formula: ProjectedFormula) -> frozenset[int]:
    """Ids of clauses in S_{-lit} whose resolvent with ``clause`` on ``lit`` is not a tautology."""
    if lit not in clause:
        raise ValueError(f"literal {lit} not in clause {clause.id}")
    return frozenset(cid for cid in formula.occurrences(-lit)
                     if resolvent(clause, formula[cid], lit) is not TAUTOLOGY)


_INT = re.compile(r"-?\d+")


def parse_dimacs(text: str | bytes) -> ProjectedFormula:
    """Parse DIMACS CNF with optional ``c p show ... 0`` projection lines.

    Show lines list the variables counted over; X is their complement.
    Without any show line X is empty.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header: tuple[int, int] | None = None
    clauses: list[list[int]] = []
    current: list[int] = []
    current_start = 0
    shown: set[int] | None = None
    show_lines: list[tuple[int, list[int]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line == "%":
            continue
        if line.startswith("c"):
            tokens = line.split()
            if tokens[:3] == ["c", "p", "show"]:
                try:
                    nums = [int(t) for t in tokens[3:]]
                except ValueError:
                    raise DimacsError("non-integer in show declaration", lineno) from None
                if shown is None:
                    shown = set()
                show_lines.append((lineno, nums))
            continue
        if line.startswith("p"):
            if header is not None:
                raise DimacsError("duplicate header", lineno)
            tokens = line.split()
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsError("negative count in header", lineno)
            continue
        if header is None:
            raise DimacsError("clause before header", lineno)
        for tok in line.split():
            if not _INT.fullmatch(tok):
                raise DimacsError(f"unexpected token {tok!r}", lineno)
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
                continue
            if abs(lit) > header[0]:
                raise DimacsError(f"literal {lit} out of range 1..{header[0]}", lineno)
            if not current:
                current_start = lineno
            current.append(lit)

    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("unterminated clause", current_start)
    if len(clauses) != header[1]:
        raise DimacsError(f"header declares {header[1]} clauses, found {len(clauses)}")

    num_vars = header[0]
    projection: frozenset[int] = frozenset()
    if shown is not None:
        for lineno, nums in show_lines:
            for v in nums:
                if v == 0:
                    continue
                if not 1 <= v <= num_vars:
                    raise DimacsError(f"show variable {v} out of range 1..{num_vars}", lineno)
                shown.add(v)
        projection = frozenset(range(1, num_vars + 1)) - shown
    return ProjectedFormula.from_lists(clauses, projection, num_vars)


def to_dimacs(formula: ProjectedFormula) -> str:
    """Serialize; a show line is emitted only when X is non-empty."""
    out = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    if formula.projection:
        shown = sorted(formula.counted_variables)
        out.append("c p show " + " ".join(map(str, shown + [0])))
    for c in formula.clauses:
        out.append(" ".join(map(str, list(c.literals) + [0])))
    return "\n".join(out) + "\n"


def evaluate(formula: ProjectedFormula | Iterable[Iterable[int]], assignment: Mapping[int, bool]) -> bool:
    """True iff the full ``assignment`` satisfies every clause."""
    clauses = formula.clauses if isinstance(formula, ProjectedFormula) else formula
    return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in clauses)
