"""Populations, the three evolutionary operators, and the reproducible EA loop.

The fitness of a genotype s is scaling(objective(decode(s))): decoding is
owned by the codec, the objective by the problem, the scaling and direction
by the pipeline. Internally the loop always minimizes; maximization negates.

Operators are parameterized random population transformations drawing from
named substreams of one seed, so the full run is a pure function of
(pipeline, config, seed) and re-running it reproduces every artifact bit for
bit. Selection never invents individuals: every member of its output is a
member of its input pool.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .encoding import Codec, Genotype, decode, shannon_entropy, renyi2_entropy
from .errors import InvalidConfigError, InvalidInputError, InvalidParamsError
from .rng import RandomStream


def _identity(y: float) -> float:
    return y


@dataclass(frozen=True)
class FitnessPipeline:
    """Fitness = scaling(objective(decode(s))), plus the search direction."""

    codec: Codec
    objective: Callable[[Any], float]
    scaling: Callable[[float], float] = _identity
    direction: str = "min"
    phenotype_json: Optional[Callable[[Any], Any]] = None

    def __post_init__(self):
        if self.direction not in ("min", "max"):
            raise InvalidConfigError(f"direction must be 'min' or 'max', got {self.direction!r}")

    def key(self, fitness: float) -> float:
        """Internal minimization key."""
        return fitness if self.direction == "min" else -fitness


def evaluate(s: Genotype, pipe: FitnessPipeline) -> float:
    """Apply the full composition scaling(objective(decode(s)))."""
    return pipe.scaling(pipe.objective(decode(s, pipe.codec)))


@dataclass(frozen=True)
class Population:
    """Ordered tuple of genotypes with generation index and lineage.

    lineage[i] lists the indices of member i's parents in the previous
    population; empty at generation 0.
    """

    members: tuple
    generation: int = 0
    lineage: tuple = ()

    def __post_init__(self):
        if len(self.members) < 1:
            raise InvalidParamsError("population size must be >= 1")
        if self.lineage and len(self.lineage) != len(self.members):
            raise InvalidInputError("lineage must align with members")

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class OperatorParams:
    """Named settings for one operator family.

    kind selects the strategy; offspring_size is the output size where it
    applies; elitism is the chi flag (selection pool = parents + offspring).
    """

    kind: str
    settings: tuple = ()
    offspring_size: int = 0
    elitism: bool = False

    @staticmethod
    def make(kind: str, offspring_size: int = 0, elitism: bool = False,
             **settings) -> "OperatorParams":
        return OperatorParams(kind, tuple(sorted(settings.items())), offspring_size, elitism)

    def get(self, name: str, default=None):
        for k, v in self.settings:
            if k == name:
                return v
        return default


def initialize(pipe: FitnessPipeline, mu: int, rng: RandomStream) -> Population:
    """mu genotypes sampled uniformly i.i.d. over the codec's string space."""
    if mu < 1:
        raise InvalidParamsError("mu must be >= 1")
    members = tuple(pipe.codec.random_genotype(rng) for _ in range(mu))
    return Population(members, generation=0, lineage=((),) * mu)


# --- recombination ---

def _one_point(p1: Genotype, p2: Genotype, cut: int):
    return (Genotype(p1.symbols[:cut] + p2.symbols[cut:]),
            Genotype(p2.symbols[:cut] + p1.symbols[cut:]))


def recombine(pop: Population, params: OperatorParams, rng: RandomStream) -> Population:
    """Produce offspring_size children; crossover events mix two distinct parents.

    Kinds: "one-point" (random cut) and "uniform" (per-symbol choice). With
    crossover probability p, each pair of children is either crossed from two
    distinct parents (lineage lists both) or copied from single parents
    (lineage lists one).
    """
    if params.kind not in ("one-point", "uniform"):
        raise InvalidParamsError(f"unknown recombination kind {params.kind!r}")
    prob = float(params.get("probability", 1.0))
    if not 0.0 <= prob <= 1.0:
        raise InvalidParamsError(f"crossover probability {prob} outside [0, 1]")
    mu_out = params.offspring_size or pop.size
    if mu_out < 1:
        raise InvalidParamsError("offspring size must be >= 1")
    if prob > 0.0 and pop.size < 2:
        raise InvalidParamsError("crossover needs at least 2 parents")

    length = len(pop.members[0])
    members: list = []
    lineage: list = []
    n = pop.size
    while len(members) < mu_out:
        fire = prob > 0.0 and float(rng.random()) < prob and length >= 2
        if fire:
            i = rng.choice_index(n)
            j = rng.choice_index(n - 1)
            if j >= i:
                j += 1
            if params.kind == "one-point":
                cut = 1 + rng.choice_index(length - 1)
                c1, c2 = _one_point(pop.members[i], pop.members[j], cut)
            else:
                mask = rng.integers(0, 2, size=length)
                s1, s2 = pop.members[i].symbols, pop.members[j].symbols
                c1 = Genotype(tuple(s1[k] if mask[k] == 0 else s2[k] for k in range(length)))
                c2 = Genotype(tuple(s2[k] if mask[k] == 0 else s1[k] for k in range(length)))
            members.extend((c1, c2))
            lineage.extend(((i, j), (i, j)))
        else:
            i = rng.choice_index(n)
            members.append(pop.members[i])
            lineage.append((i,))
    return Population(tuple(members[:mu_out]), pop.generation,
                      tuple(lineage[:mu_out]))


# --- mutation ---

def mutate(pop: Population, params: OperatorParams, rng: RandomStream) -> Population:
    """Per-symbol independent mutation; every offspring has exactly one parent.

    Kinds: "resample" draws a fresh symbol uniformly from the alphabet
    (a zero_bias setting shifts part of that mass onto symbol 0, useful for
    genomes where 0 is a no-op); "flip" draws uniformly from the other
    symbols, which is the bitwise complement on a binary alphabet.
    """
    if params.kind not in ("resample", "flip"):
        raise InvalidParamsError(f"unknown mutation kind {params.kind!r}")
    rate = float(params.get("rate", 0.0))
    if not 0.0 <= rate <= 1.0:
        raise InvalidParamsError(f"mutation rate {rate} outside [0, 1]")
    size = int(params.get("alphabet_size", 2))
    zero_bias = float(params.get("zero_bias", 0.0))
    burst_rate = float(params.get("burst_rate", 0.0))
    burst_prob = float(params.get("burst_prob", 0.0))

    members = []
    for g in pop.members:
        length = len(g)
        r = rate
        if burst_prob > 0.0 and float(rng.random()) < burst_prob:
            r = burst_rate
        mask = rng.random(length) < r
        if not mask.any():
            members.append(g)
            continue
        symbols = list(g.symbols)
        for k in np.flatnonzero(mask):
            if params.kind == "flip":
                if size == 2:
                    symbols[k] = 1 - symbols[k]
                else:
                    draw = rng.choice_index(size - 1)
                    symbols[k] = draw if draw < symbols[k] else draw + 1
            else:
                if zero_bias > 0.0 and float(rng.random()) < zero_bias:
                    symbols[k] = 0
                else:
                    symbols[k] = rng.choice_index(size)
        members.append(Genotype(tuple(symbols)))
    lineage = tuple((i,) for i in range(pop.size))
    return Population(tuple(members), pop.generation, lineage)


# --- selection ---

def select(pool: Population, fitnesses, params: OperatorParams, rng: RandomStream,
           direction: str = "min") -> Population:
    """Choose offspring_size members of the pool; ties go to the lowest index.

    Kinds: "truncation" (best offspring_size, cycling if oversubscribed) and
    "tournament" (setting k, sampled with replacement). The output lineage
    holds pool indices, so membership in the pool is recorded explicitly.
    """
    if params.kind not in ("truncation", "tournament"):
        raise InvalidParamsError(f"unknown selection kind {params.kind!r}")
    if len(fitnesses) != pool.size:
        raise InvalidInputError(
            f"{len(fitnesses)} fitnesses for a pool of {pool.size}")
    mu_out = params.offspring_size or pool.size
    if mu_out < 1:
        raise InvalidParamsError("selected size must be >= 1")
    sign = 1.0 if direction == "min" else -1.0
    keys = [sign * float(f) for f in fitnesses]

    if params.kind == "truncation":
        order = sorted(range(pool.size), key=lambda i: (keys[i], i))
        chosen = [order[i % pool.size] for i in range(mu_out)]
    else:
        k = int(params.get("k", 2))
        if k < 1:
            raise InvalidParamsError("tournament size must be >= 1")
        chosen = []
        for _ in range(mu_out):
            entrants = [rng.choice_index(pool.size) for _ in range(k)]
            chosen.append(min(entrants, key=lambda i: (keys[i], i)))
    members = tuple(pool.members[i] for i in chosen)
    lineage = tuple((i,) for i in chosen)
    return Population(members, pool.generation + 1, lineage)


# --- termination ---

@dataclass(frozen=True)
class TerminationCriteria:
    max_generations: Optional[int] = None
    target: Optional[float] = None
    stagnation_window: Optional[int] = None
    stagnation_tolerance: float = 1e-12

    def __post_init__(self):
        if (self.max_generations is None and self.target is None
                and self.stagnation_window is None):
            raise InvalidConfigError("no termination criterion enabled")


@dataclass
class GenerationStats:
    generation: int
    best: float
    mean: float
    worst: float
    shannon: float
    renyi2: float
    events: dict = field(default_factory=dict)


@dataclass
class RunRecord:
    """Per-generation statistics plus the best individual of the run."""

    direction: str = "min"
    generations: list = field(default_factory=list)
    best_genotype: Optional[Genotype] = None
    best_phenotype: Any = None
    best_fitness: Optional[float] = None
    generations_used: int = 0
    termination_reason: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "direction": self.direction,
            "generations": [
                {"generation": g.generation, "best": g.best, "mean": g.mean,
                 "worst": g.worst, "shannon": g.shannon, "renyi2": g.renyi2,
                 "events": g.events}
                for g in self.generations],
            "best_genotype": list(self.best_genotype.symbols) if self.best_genotype else None,
            "best_phenotype": self.best_phenotype,
            "best_fitness": self.best_fitness,
            "generations_used": self.generations_used,
            "termination_reason": self.termination_reason,
        }

    def csv_text(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["generation", "best", "mean", "worst", "entropy"])
        for g in self.generations:
            w.writerow([g.generation, repr(g.best), repr(g.mean), repr(g.worst),
                        repr(g.shannon)])
        return out.getvalue()


def termination_reason(record: RunRecord, criteria: TerminationCriteria) -> Optional[str]:
    """Name of the first enabled criterion that fires, else None."""
    if not record.generations:
        raise InvalidInputError("record has no generations yet")
    gen = record.generations[-1].generation
    if criteria.max_generations is not None and gen >= criteria.max_generations:
        return "max-generations"
    if criteria.target is not None and record.best_fitness is not None:
        if record.direction == "min":
            if record.best_fitness <= criteria.target:
                return "target"
        elif record.best_fitness >= criteria.target:
            return "target"
    w = criteria.stagnation_window
    if w is not None and len(record.generations) > w:
        now = record.generations[-1].best
        then = record.generations[-1 - w].best
        if abs(now - then) <= criteria.stagnation_tolerance:
            return "stagnation"
    return None


def should_terminate(record: RunRecord, criteria: TerminationCriteria) -> bool:
    return termination_reason(record, criteria) is not None


# --- the loop ---

@dataclass(frozen=True)
class EAConfig:
    population_size: int = 40
    recombination: OperatorParams = OperatorParams.make("one-point", probability=0.7)
    mutation: OperatorParams = OperatorParams.make("flip", rate=0.02)
    selection: OperatorParams = OperatorParams.make("truncation")
    elitism: bool = True
    offspring_size: Optional[int] = None
    termination: TerminationCriteria = TerminationCriteria(max_generations=200)
    dedupe: bool = False

    @property
    def mu(self) -> int:
        return self.population_size

    @property
    def lam(self) -> int:
        return self.offspring_size or self.population_size


def config_to_json_dict(cfg: EAConfig) -> dict:
    def op(p: OperatorParams) -> dict:
        return {"kind": p.kind, "settings": dict(p.settings),
                "offspring_size": p.offspring_size, "elitism": p.elitism}
    t = cfg.termination
    return {
        "population_size": cfg.population_size,
        "offspring_size": cfg.offspring_size,
        "recombination": op(cfg.recombination),
        "mutation": op(cfg.mutation),
        "selection": op(cfg.selection),
        "elitism": cfg.elitism,
        "dedupe": cfg.dedupe,
        "termination": {
            "max_generations": t.max_generations,
            "target": t.target,
            "stagnation_window": t.stagnation_window,
            "stagnation_tolerance": t.stagnation_tolerance,
        },
    }


def config_from_json(doc) -> EAConfig:
    """EAConfig from a JSON document (dict, JSON text, or file path)."""
    if isinstance(doc, (str, bytes)):
        text = doc.decode() if isinstance(doc, bytes) else doc
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
        else:
            with open(text) as fh:
                doc = json.load(fh)

    def op(d, default_kind):
        if d is None:
            return OperatorParams.make(default_kind)
        return OperatorParams.make(d.get("kind", default_kind),
                                   offspring_size=int(d.get("offspring_size", 0)),
                                   elitism=bool(d.get("elitism", False)),
                                   **d.get("settings", {}))

    t = doc.get("termination", {}) or {}
    crit = TerminationCriteria(
        max_generations=t.get("max_generations"),
        target=t.get("target"),
        stagnation_window=t.get("stagnation_window"),
        stagnation_tolerance=t.get("stagnation_tolerance", 1e-12))
    return EAConfig(
        population_size=int(doc.get("population_size", 40)),
        offspring_size=doc.get("offspring_size"),
        recombination=op(doc.get("recombination"), "one-point"),
        mutation=op(doc.get("mutation"), "flip"),
        selection=op(doc.get("selection"), "truncation"),
        elitism=bool(doc.get("elitism", True)),
        dedupe=bool(doc.get("dedupe", False)),
        termination=crit)


def _locus_entropies(members) -> tuple[float, float]:
    length = len(members[0])
    n = len(members)
    sh = 0.0
    r2 = 0.0
    for k in range(length):
        counts: dict = {}
        for g in members:
            counts[g.symbols[k]] = counts.get(g.symbols[k], 0) + 1
        dist = [c / n for c in counts.values()]
        sh += shannon_entropy(dist)
        r2 += renyi2_entropy(dist)
    return sh / length, r2 / length


def run_ea(pipe: FitnessPipeline, config: EAConfig, seed: int) -> RunRecord:
    """initialize -> (recombine -> mutate -> evaluate -> select) until done.

    Identical (pipeline, config, seed) yield bit-identical RunRecords. The
    best individual of the whole run is tracked explicitly, so non-elitist
    configurations may drift uphill without losing the answer.
    """
    root = RandomStream(seed)
    init_rng = root.substream("init")
    rec_rng = root.substream("recombine")
    mut_rng = root.substream("mutate")
    sel_rng = root.substream("select")

    cache: dict = {}

    def fitness_of(g: Genotype) -> float:
        val = cache.get(g.symbols)
        if val is None:
            val = evaluate(g, pipe)
            cache[g.symbols] = val
        return val

    record = RunRecord(direction=pipe.direction)
    pop = initialize(pipe, config.mu, init_rng)
    fits = [fitness_of(g) for g in pop.members]

    def note_best(members, values):
        for g, f in zip(members, values):
            if record.best_fitness is None or pipe.key(f) < pipe.key(record.best_fitness):
                record.best_fitness = f
                record.best_genotype = g

    def push_stats(p: Population, values, events):
        sh, r2 = _locus_entropies(p.members)
        keys = [pipe.key(v) for v in values]
        best = values[min(range(len(keys)), key=lambda i: (keys[i], i))]
        worst = values[max(range(len(keys)), key=lambda i: (keys[i], -i))]
        record.generations.append(GenerationStats(
            p.generation, best, float(np.mean(values)), worst, sh, r2, events))

    note_best(pop.members, fits)
    push_stats(pop, fits, {})

    rec_params = OperatorParams(config.recombination.kind, config.recombination.settings,
                                config.lam, False)
    sel_params = OperatorParams(config.selection.kind, config.selection.settings,
                                config.mu, config.elitism)

    while True:
        reason = termination_reason(record, config.termination)
        if reason is not None:
            record.termination_reason = reason
            break

        offspring = recombine(pop, rec_params, rec_rng)
        var_lineage = offspring.lineage
        pre = offspring.members
        offspring = mutate(offspring, config.mutation, mut_rng)
        mutated_symbols = sum(
            sum(a != b for a, b in zip(g1.symbols, g2.symbols))
            for g1, g2 in zip(pre, offspring.members))
        off_fits = [fitness_of(g) for g in offspring.members]
        note_best(offspring.members, off_fits)

        if config.elitism:
            pool = Population(pop.members + offspring.members, pop.generation,
                              tuple((i,) for i in range(pop.size)) + var_lineage)
            pool_fits = fits + off_fits
        else:
            pool = Population(offspring.members, pop.generation, var_lineage)
            pool_fits = off_fits

        if config.dedupe:
            keep = []
            seen = set()
            order = sorted(range(pool.size),
                           key=lambda i: (pipe.key(pool_fits[i]), i))
            for i in order:
                if pool.members[i].symbols not in seen:
                    seen.add(pool.members[i].symbols)
                    keep.append(i)
            if len(keep) >= sel_params.offspring_size:
                pool = Population(tuple(pool.members[i] for i in keep),
                                  pool.generation,
                                  tuple(pool.lineage[i] for i in keep))
                pool_fits = [pool_fits[i] for i in keep]

        selected = select(pool, pool_fits, sel_params, sel_rng, pipe.direction)
        sel_pool_indices = [lin[0] for lin in selected.lineage]
        parents_in_pool = pop.size if config.elitism else 0
        events = {
            "crossover_events": sum(1 for lin in var_lineage if len(lin) == 2) // 2,
            "mutated_symbols": int(mutated_symbols),
            "selected_from_parents": sum(1 for i in sel_pool_indices if i < parents_in_pool),
            "selected_from_offspring": sum(1 for i in sel_pool_indices if i >= parents_in_pool),
        }
        new_lineage = tuple(
            pool.lineage[i] if i >= parents_in_pool or not config.elitism else (i,)
            for i in sel_pool_indices)
        pop = Population(selected.members, pop.generation + 1, new_lineage)
        fits = [pool_fits[i] for i in sel_pool_indices]
        push_stats(pop, fits, events)

    record.generations_used = record.generations[-1].generation
    if record.best_genotype is not None:
        phenotype = decode(record.best_genotype, pipe.codec)
        record.best_phenotype = (pipe.phenotype_json(phenotype)
                                 if pipe.phenotype_json else _to_jsonable(phenotype))
    return record


def _to_jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    if isinstance(x, (list, tuple)):
        return [_to_jsonable(v) for v in x]
    return repr(x)
