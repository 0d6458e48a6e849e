"""Projected model counting with dynamic blocked clause elimination."""

from .bce import BlockedClauseManager, ProtectedTriple, init_protected_triples, init_watch_list
from .bcp import BcpResult, FormulaState
from .counter import BceMode, CountResult, CountTimeout, Counter, count
from .formula import (TAUTOLOGY, Clause, DimacsError, ProjectedFormula, parse_dimacs, resolvent,
                      resolvent_set, to_dimacs)

__all__ = [
    "BceMode", "BcpResult", "BlockedClauseManager", "Clause", "CountResult", "CountTimeout", "Counter",
    "DimacsError", "FormulaState", "ProjectedFormula", "ProtectedTriple", "TAUTOLOGY", "count",
    "init_protected_triples", "init_watch_list", "parse_dimacs", "resolvent", "resolvent_set", "to_dimacs",
]
