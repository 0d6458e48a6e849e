"""Brute-force references and a seeded random instance generator.

Nothing here shares code with the counter or the manager beyond the
formula container; everything is plain enumeration.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import ProjectedFormula

MAX_ENUMERATION = 20


class EnumerationBoundError(ValueError):
    pass


def _satisfied(clauses, assignment) -> bool:
    return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in clauses)


def brute_force_projected_count(formula: ProjectedFormula) -> int:
    """Count assignments to the declared non-X variables extending to a model."""
    shown = sorted(formula.counted_variables)
    hidden = sorted(formula.projection)
    if len(shown) > MAX_ENUMERATION or len(hidden) > MAX_ENUMERATION:
        raise EnumerationBoundError(
            f"{len(shown)} counted / {len(hidden)} projected variables exceed bound {MAX_ENUMERATION}")
    clauses = [c.literals for c in formula.clauses]
    total = 0
    for shown_vals in itertools.product((False, True), repeat=len(shown)):
        a = dict(zip(shown, shown_vals))
        for hidden_vals in itertools.product((False, True), repeat=len(hidden)):
            a.update(zip(hidden, hidden_vals))
            if _satisfied(clauses, a):
                total += 1
                break
    return total


def brute_force_model_count(formula: ProjectedFormula) -> int:
    """Plain model count over all declared variables, ignoring X."""
    n = formula.num_vars
    if n > MAX_ENUMERATION:
        raise EnumerationBoundError(f"{n} variables exceed bound {MAX_ENUMERATION}")
    clauses = [c.literals for c in formula.clauses]
    count = 0
    for vals in itertools.product((False, True), repeat=n):
        if _satisfied(clauses, dict(zip(range(1, n + 1), vals))):
            count += 1
    return count


def residualize(clauses: Mapping[int, Iterable[int]],
                assignment: Mapping[int, bool] | None = None) -> dict[int, tuple[int, ...]]:
    """Condition clauses: drop satisfied and tautological ones, strip falsified literals."""
    assignment = assignment or {}
    out = {}
    for cid, lits in clauses.items():
        lits = set(lits)
        if any(-l in lits for l in lits):
            continue
        if any(abs(l) in assignment and assignment[abs(l)] == (l > 0) for l in lits):
            continue
        out[cid] = tuple(sorted((l for l in lits if abs(l) not in assignment), key=lambda l: (abs(l), l < 0)))
    return out


def _blocked_on(cid, lit, clauses) -> bool:
    mine = set(clauses[cid])
    for other_id, other in clauses.items():
        if -lit not in other:
            continue
        union = (mine - {lit}) | (set(other) - {-lit})
        if not any(-l in union for l in union):
            return False
    return True


def blocking_literals(cid: int, clauses: Mapping[int, Iterable[int]], projection: Iterable[int]) -> list[int]:
    """Literals over ``projection`` that block clause ``cid`` among ``clauses`` (no conditioning)."""
    x = set(projection)
    clauses = {k: tuple(v) for k, v in clauses.items()}
    return [l for l in clauses[cid] if abs(l) in x and _blocked_on(cid, l, clauses)]


def brute_force_blocked_fixpoint(clauses: Mapping[int, Iterable[int]], projection: Iterable[int],
                                 assignment: Mapping[int, bool] | None = None,
                                 rng: random.Random | None = None) -> set[int]:
    """Ids removed by BCE restricted to blocking literals over ``projection``.

    ``clauses`` maps ids to literals; they are conditioned on ``assignment``
    first. Passing every variable as ``projection`` gives unrestricted BCE.
    ``rng`` picks among the currently blocked clauses at random.
    """
    x = set(projection)
    live = residualize(clauses, assignment)
    removed: set[int] = set()
    while True:
        found = [cid for cid in sorted(live)
                 if any(abs(l) in x and _blocked_on(cid, l, live) for l in live[cid])]
        if not found:
            return removed
        cid = rng.choice(found) if rng is not None else found[0]
        del live[cid]
        removed.add(cid)


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    num_vars: int = 8
    num_clauses: int = 20
    clause_len_range: tuple[int, int] = (1, 4)
    projection_density: float = 0.3

    def __post_init__(self):
        if not 1 <= self.num_vars <= 16:
            raise ValueError("num_vars must be in 1..16")
        lo, hi = self.clause_len_range
        if not 1 <= lo <= hi:
            raise ValueError("bad clause length range")
        if not 0.0 <= self.projection_density <= 1.0:
            raise ValueError("projection density must lie in [0, 1]")


def generate(config: GeneratorConfig) -> ProjectedFormula:
    rng = random.Random(config.seed)
    lo, hi = config.clause_len_range
    hi = min(hi, config.num_vars)
    lo = min(lo, hi)
    clauses = []
    for _ in range(config.num_clauses):
        k = rng.randint(lo, hi)
        vs = rng.sample(range(1, config.num_vars + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    projection = [v for v in range(1, config.num_vars + 1) if rng.random() < config.projection_density]
    return ProjectedFormula.from_lists(clauses, projection, config.num_vars)


def random_configs(count: int, seed: int = 0, max_vars: int = 12, max_clauses: int = 40,
                   densities=(0.0, 0.3, 0.7, 1.0)) -> list[GeneratorConfig]:
    """A reproducible spread of small configurations."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(1, max_vars)
        m = rng.randint(0, max_clauses)
        out.append(GeneratorConfig(seed=rng.getrandbits(64), num_vars=n, num_clauses=m,
                                   clause_len_range=(1, 4), projection_density=densities[i % len(densities)]))
    return out
