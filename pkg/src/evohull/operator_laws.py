"""Randomized property trials for the formal operator laws.

Three laws are checked on freshly generated random populations:

- selection membership: every selected individual equals a pool member;
- mutation lineage: every mutated offspring lists exactly one parent;
- recombination dependency: with crossover probability 1 and at least two
  parents, some offspring depends on two distinct parents.

The sabotage hook deliberately breaks one law so the harness itself can be
shown to catch violations.
"""

from __future__ import annotations

from .ea_core import OperatorParams, Population, mutate, recombine, select
from .encoding import Genotype
from .errors import InvalidConfigError
from .rng import RandomStream

LAWS = ("selection-membership", "mutation-lineage", "recombination-dependency")


def _random_population(rng: RandomStream):
    size = 2 + rng.choice_index(10)
    length = 2 + rng.choice_index(10)
    alphabet_size = 2 + rng.choice_index(4)
    members = tuple(
        Genotype(tuple(int(x) for x in rng.integers(0, alphabet_size, size=length)))
        for _ in range(size))
    return Population(members, 0, ((),) * size), alphabet_size


def operator_law_report(trials: int, seed: int, sabotage=None) -> dict:
    """Run `trials` random instances of each law; report violation counts."""
    if trials < 1:
        raise InvalidConfigError("trials must be >= 1")
    if sabotage not in (None, "selection", "mutation", "recombination"):
        raise InvalidConfigError(f"unknown sabotage mode {sabotage!r}")
    root = RandomStream(seed)
    gen_rng = root.substream("generate")
    op_rng = root.substream("operate")

    violations = {law: 0 for law in LAWS}
    first_failure = {}

    for t in range(trials):
        pop, alphabet_size = _random_population(gen_rng)
        fitnesses = [float(f) for f in gen_rng.random(pop.size)]

        kind = "truncation" if gen_rng.choice_index(2) == 0 else "tournament"
        params = OperatorParams.make(kind,
                                     offspring_size=1 + gen_rng.choice_index(pop.size),
                                     k=1 + gen_rng.choice_index(pop.size))
        selected = select(pop, fitnesses, params, op_rng)
        out_members = selected.members
        if sabotage == "selection":
            outsider = Genotype(pop.members[0].symbols + (0,))
            out_members = (outsider,) + out_members[1:]
        if any(m not in pop.members for m in out_members):
            violations["selection-membership"] += 1
            first_failure.setdefault("selection-membership", t)

        mutated = mutate(pop, OperatorParams.make(
            "resample", rate=0.3, alphabet_size=alphabet_size), op_rng)
        lineage = mutated.lineage
        if sabotage == "mutation":
            lineage = ((0, min(1, pop.size - 1)),) + lineage[1:]
        if any(len(parents) != 1 for parents in lineage):
            violations["mutation-lineage"] += 1
            first_failure.setdefault("mutation-lineage", t)

        offspring = recombine(pop, OperatorParams.make(
            "one-point", offspring_size=max(2, pop.size), probability=1.0), op_rng)
        rec_lineage = offspring.lineage
        if sabotage == "recombination":
            rec_lineage = tuple((parents[0],) for parents in rec_lineage)
        if not any(len(p) == 2 and p[0] != p[1] for p in rec_lineage):
            violations["recombination-dependency"] += 1
            first_failure.setdefault("recombination-dependency", t)

    return {
        "trials": trials,
        "seed": seed,
        "sabotage": sabotage,
        "violations": violations,
        "violations_total": sum(violations.values()),
        "first_failure_trial": first_failure,
        "passed": sum(violations.values()) == 0,
    }
