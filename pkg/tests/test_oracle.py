import itertools
import random

import pytest

from pmcbce import ProjectedFormula, to_dimacs
from pmcbce.oracle import (EnumerationBoundError, GeneratorConfig, brute_force_blocked_fixpoint,
                           brute_force_model_count, brute_force_projected_count, generate, random_configs)

from _data import EXAMPLE1, X1, X2, X3, Y1, Y2, Y3, example1

# A nine-entry model listing claimed for the running example.
LISTED_MODELS = [
    {-X1, X2, X3, Y1, -Y2, -Y3},
    {X1, -X2, X3, Y1, Y2, Y3},
    {X1, -X2, X3, -Y1, Y2, Y3},
    {X1, -X2, -X3, -Y1, Y2, Y3},
    {X1, -X2, -X3, Y1, -Y2, Y3},
    {X1, -X2, -X3, Y1, Y2, Y3},
    {X1, -X2, -X3, -Y1, -Y2, Y3},
    {X1, X2, X3, -Y1, Y2, -Y3},
    {X1, X2, X3, -Y1, -Y2, -Y3},
]


def models(clauses, n):
    out = []
    for vals in itertools.product((False, True), repeat=n):
        m = {v if b else -v for v, b in zip(range(1, n + 1), vals)}
        if all(any(l in m for l in c) for c in clauses):
            out.append(m)
    return out


def clause_map(f):
    return {c.id: c.literals for c in f.clauses}


def test_projected_count_running_example():
    f = example1()
    assert brute_force_projected_count(f) == 4
    witnesses = {frozenset(l for l in m if abs(l) <= 3) for m in models(EXAMPLE1, 6)}
    assert witnesses == {
        frozenset({-X1, X2, X3}), frozenset({X1, -X2, X3}),
        frozenset({X1, -X2, -X3}), frozenset({X1, X2, X3}),
    }


def test_full_count_running_example_is_seven():
    assert brute_force_projected_count(example1(())) == 7
    assert brute_force_model_count(example1()) == 7


def test_nine_model_listing_contains_two_non_models():
    # Two of the nine listed entries falsify clause 10
    # (-y3 v -y2 v x3), so the formula has 7 models.
    falsifying = [m for m in LISTED_MODELS if not all(any(l in m for l in c) for c in EXAMPLE1)]
    assert falsifying == [LISTED_MODELS[3], LISTED_MODELS[5]]
    assert all(not any(l in m for l in EXAMPLE1[9]) for m in falsifying)
    assert sorted(map(sorted, models(EXAMPLE1, 6))) == sorted(
        sorted(m) for m in LISTED_MODELS if m not in falsifying)


def test_unsat_projected():
    f = ProjectedFormula.from_lists([[1], [-1]], [1])
    assert brute_force_projected_count(f) == 0


def test_bound_refused():
    f = ProjectedFormula.from_lists([], [], 21)
    with pytest.raises(EnumerationBoundError):
        brute_force_projected_count(f)


def test_unconstrained_variables_double():
    f = ProjectedFormula.from_lists([[1, 2]], [], 4)
    assert brute_force_projected_count(f) == 12


@pytest.mark.parametrize("cfg", random_configs(60, seed=3, max_vars=10, max_clauses=25, densities=(0.0,)))
def test_count_with_empty_projection_is_model_count(cfg):
    f = generate(cfg)
    assert brute_force_projected_count(f) == brute_force_model_count(f)


def test_fixpoint_running_example():
    f = example1()
    cm = clause_map(f)
    assert brute_force_blocked_fixpoint(cm, f.projection) == {3, 4, 8, 10}
    rest = {cid: lits for cid, lits in cm.items() if cid not in {3, 4, 8, 10}}
    assert brute_force_blocked_fixpoint(rest, f.projection, {X1: True}) == {5, 7, 11}


def test_fixpoint_without_projected_literals():
    f = example1(())
    assert brute_force_blocked_fixpoint(clause_map(f), ()) == set()


def test_fixpoint_cascade():
    # (y1 v a), (-y1 v -a): each resolvent on y1 is tautological
    assert brute_force_blocked_fixpoint({1: (1, 2), 2: (-1, -2)}, {1}) == {1, 2}


def test_unrestricted_bce_empties_running_example():
    f = example1()
    assert brute_force_blocked_fixpoint(clause_map(f), range(1, 7)) == set(range(1, 12))
    assert brute_force_model_count(ProjectedFormula.from_lists([], [], 6)) == 64


@pytest.mark.parametrize("cfg", random_configs(40, seed=11, max_vars=9, max_clauses=25))
def test_fixpoint_order_independent_and_count_preserving(cfg):
    f = generate(cfg)
    cm = clause_map(f)
    reference = brute_force_blocked_fixpoint(cm, f.projection)
    for k in range(4):
        assert brute_force_blocked_fixpoint(cm, f.projection, rng=random.Random(k)) == reference
    assert brute_force_projected_count(f.without(reference)) == brute_force_projected_count(f)


def test_generator_deterministic():
    cfg = GeneratorConfig(seed=2**63 + 5, num_vars=10, num_clauses=30)
    assert to_dimacs(generate(cfg)) == to_dimacs(generate(cfg))
    assert to_dimacs(generate(cfg)) != to_dimacs(generate(GeneratorConfig(seed=6, num_vars=10, num_clauses=30)))


def test_generator_clause_shape():
    f = generate(GeneratorConfig(seed=1, num_vars=6, num_clauses=200, clause_len_range=(2, 3)))
    for c in f.clauses:
        assert 2 <= len(c) <= 3
        assert len(c.variables) == len(c)


@pytest.mark.parametrize("seed", range(10))
def test_generator_densities(seed):
    f0 = generate(GeneratorConfig(seed, 8, 10, (1, 3), 0.0))
    assert f0.projection == frozenset()
    f1 = generate(GeneratorConfig(seed, 8, 10, (1, 3), 1.0))
    assert f1.projection == set(range(1, 9))
    assert brute_force_projected_count(f1) in (0, 1)


def test_generator_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(seed=0, num_vars=17)
    with pytest.raises(ValueError):
        GeneratorConfig(seed=0, projection_density=1.5)
