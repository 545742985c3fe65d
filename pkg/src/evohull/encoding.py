"""Genotype/phenotype encodings.

Genotypes are fixed-length strings over a finite alphabet; a codec's decode
rule maps every such string to a phenotype (an integer, a real vector, or any
problem-specific object). Decoding is total. A codec may additionally carry an
inverse rule and a range predicate for the feasible subset of strings.

Also houses the entropy diagnostics (Shannon and second-order Renyi, in bits)
and equivalence-induced partitions of genotype sets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import (
    InvalidDistributionError,
    InvalidGenotypeError,
    InvalidRelationError,
    OutOfRangeError,
    UnsupportedOperationError,
)
from .rng import RandomStream

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of distinct symbol tokens."""

    symbols: tuple

    def __post_init__(self):
        if len(self.symbols) < 1:
            raise InvalidGenotypeError("alphabet must contain at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise InvalidGenotypeError(f"alphabet symbols not distinct: {self.symbols!r}")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, token) -> int:
        try:
            return self.symbols.index(token)
        except ValueError:
            raise InvalidGenotypeError(f"token {token!r} not in alphabet") from None


BINARY = Alphabet(("0", "1"))


@dataclass(frozen=True)
class Genotype:
    """Fixed-length string of alphabet indices."""

    symbols: tuple[int, ...]

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    @staticmethod
    def from_string(s: str, alphabet: Alphabet = BINARY) -> "Genotype":
        return Genotype(tuple(alphabet.index(ch) for ch in s))

    def to_string(self, alphabet: Alphabet = BINARY) -> str:
        return "".join(str(alphabet.symbols[i]) for i in self.symbols)


@dataclass(frozen=True)
class Codec:
    """Total decode rule from strings to phenotypes, with optional inverse.

    `decode_fn` receives a validated Genotype. `encode_fn`, when present,
    must invert it exactly on the decode image. `contains_fn` is the
    membership test for the feasible string subset; None means every string
    is feasible.
    """

    alphabet: Alphabet
    length: int
    decode_fn: Callable[[Genotype], Any]
    encode_fn: Optional[Callable[[Any], Genotype]] = None
    contains_fn: Optional[Callable[[Genotype], bool]] = None
    name: str = "custom"

    def validate(self, g: Genotype) -> None:
        if len(g.symbols) != self.length:
            raise InvalidGenotypeError(
                f"genotype length {len(g.symbols)} != codec length {self.length}")
        n = self.alphabet.size
        for i in g.symbols:
            if not 0 <= i < n:
                raise InvalidGenotypeError(f"symbol index {i} outside alphabet of size {n}")

    def in_range(self, g: Genotype) -> bool:
        return True if self.contains_fn is None else bool(self.contains_fn(g))

    def random_genotype(self, rng: RandomStream) -> Genotype:
        return Genotype(tuple(int(v) for v in rng.integers(0, self.alphabet.size, size=self.length)))

    def all_genotypes(self) -> Iterable[Genotype]:
        """Enumerate A^l in lexicographic order. Only sensible for small |A|^l."""
        n = self.alphabet.size

        def rec(prefix):
            if len(prefix) == self.length:
                yield Genotype(tuple(prefix))
                return
            for i in range(n):
                yield from rec(prefix + [i])

        yield from rec([])


def decode(g: Genotype, codec: Codec):
    """Apply the codec's decode rule; total on well-formed genotypes."""
    codec.validate(g)
    return codec.decode_fn(g)


def encode(x, codec: Codec) -> Genotype:
    """Invert the decode rule. Requires the codec to carry an inverse."""
    if codec.encode_fn is None:
        raise UnsupportedOperationError(f"codec {codec.name!r} has no inverse rule")
    g = codec.encode_fn(x)
    codec.validate(g)
    return g


# --- stock codecs ---

def binary_integer_codec(length: int, alphabet: Alphabet = BINARY) -> Codec:
    """Positional base-|A| integer codec; "101" -> 5 for the binary alphabet."""
    base = alphabet.size

    def dec(g: Genotype) -> int:
        v = 0
        for i in g.symbols:
            v = v * base + i
        return v

    def enc(x) -> Genotype:
        v = int(x)
        if x != v or not 0 <= v < base ** length:
            raise OutOfRangeError(f"{x!r} not an integer in [0, {base ** length})")
        digits = []
        for _ in range(length):
            v, r = divmod(v, base)
            digits.append(r)
        return Genotype(tuple(reversed(digits)))

    return Codec(alphabet, length, dec, enc, name=f"binary-integer[{length}]")


def _gray_to_int(bits: Sequence[int]) -> int:
    v = 0
    acc = 0
    for b in bits:
        acc ^= b
        v = (v << 1) | acc
    return v


def _int_to_gray(v: int, length: int) -> tuple[int, ...]:
    g = v ^ (v >> 1)
    return tuple((g >> (length - 1 - i)) & 1 for i in range(length))


def gray_codec(length: int) -> Codec:
    """Reflected-binary Gray codec over the binary alphabet."""

    def dec(g: Genotype) -> int:
        return _gray_to_int(g.symbols)

    def enc(x) -> Genotype:
        v = int(x)
        if x != v or not 0 <= v < 2 ** length:
            raise OutOfRangeError(f"{x!r} not an integer in [0, {2 ** length})")
        return Genotype(_int_to_gray(v, length))

    return Codec(BINARY, length, dec, enc, name=f"gray[{length}]")


def scaled_real_codec(bits_per_dim: int, lo: Sequence[float], hi: Sequence[float],
                      gray: bool = False) -> Codec:
    """Binary strings -> points of the box [lo, hi], one bits_per_dim block per axis.

    Each block is read as an integer k (positional binary, or Gray when
    `gray`), scaled to lo + k/(2**b - 1) * (hi - lo). All-zeros maps to lo,
    all-ones to hi in the positional case.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise InvalidGenotypeError("lo/hi must be 1-d arrays of equal length")
    ndim = len(lo)
    levels = 2 ** bits_per_dim - 1
    length = bits_per_dim * ndim

    def block_value(bits):
        if gray:
            return _gray_to_int(bits)
        v = 0
        for b in bits:
            v = (v << 1) | b
        return v

    def dec(g: Genotype) -> np.ndarray:
        out = np.empty(ndim)
        for d in range(ndim):
            k = block_value(g.symbols[d * bits_per_dim:(d + 1) * bits_per_dim])
            out[d] = lo[d] + (k / levels) * (hi[d] - lo[d])
        return out

    def enc(x) -> Genotype:
        x = np.asarray(x, dtype=float)
        if x.shape != (ndim,):
            raise OutOfRangeError(f"expected a point of dimension {ndim}")
        bits: list[int] = []
        for d in range(ndim):
            k = round((x[d] - lo[d]) / (hi[d] - lo[d]) * levels) if hi[d] > lo[d] else 0
            if not 0 <= k <= levels:
                raise OutOfRangeError(f"coordinate {x[d]} outside [{lo[d]}, {hi[d]}]")
            grid = lo[d] + (k / levels) * (hi[d] - lo[d])
            if abs(grid - x[d]) > 1e-12 * max(1.0, abs(hi[d] - lo[d])):
                raise OutOfRangeError(f"coordinate {x[d]} not on the codec grid")
            if gray:
                bits.extend(_int_to_gray(k, bits_per_dim))
            else:
                bits.extend((k >> (bits_per_dim - 1 - i)) & 1 for i in range(bits_per_dim))
        return Genotype(tuple(bits))

    kind = "scaled-gray" if gray else "scaled-real"
    return Codec(BINARY, length, dec, enc, name=f"{kind}[{bits_per_dim}x{ndim}]")


def load_codec(source) -> Codec:
    """Build a codec from a JSON document (dict, JSON string, or file path).

    Schema: {"alphabet": [tokens], "length": l,
             "rule": "binary-integer" | "gray" | "scaled-real",
             "lo": [...], "hi": [...]}          # scaled-real only
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
        else:
            with open(text) as fh:
                doc = json.load(fh)

    alphabet = Alphabet(tuple(str(t) for t in doc.get("alphabet", ["0", "1"])))
    length = int(doc["length"])
    rule = doc["rule"]
    if rule == "binary-integer":
        return binary_integer_codec(length, alphabet)
    if rule == "gray":
        if alphabet.size != 2:
            raise InvalidGenotypeError("gray rule requires a binary alphabet")
        return gray_codec(length)
    if rule == "scaled-real":
        if alphabet.size != 2:
            raise InvalidGenotypeError("scaled-real rule requires a binary alphabet")
        lo, hi = doc["lo"], doc["hi"]
        if length % len(lo) != 0:
            raise InvalidGenotypeError("length must be a multiple of the dimension")
        return scaled_real_codec(length // len(lo), lo, hi)
    raise InvalidGenotypeError(f"unknown codec rule {rule!r}")


# --- bijection verification ---

@dataclass(frozen=True)
class BijectionReport:
    checked: int
    exhaustive: bool
    collisions: tuple          # pairs ((g1, g2), phenotype-key)
    round_trip_failures: tuple  # genotypes with encode(decode(g)) != g

    @property
    def passed(self) -> bool:
        return not self.collisions and not self.round_trip_failures


def _phenotype_key(x):
    if isinstance(x, np.ndarray):
        return tuple(x.tolist())
    if isinstance(x, (list, tuple)):
        return tuple(_phenotype_key(v) for v in x)
    return x


def verify_bijection(codec: Codec, budget: int, seed: int = 0) -> BijectionReport:
    """Check injectivity and round-trip of the codec's decode rule.

    Exhaustive over A^l when |A|^l <= budget, otherwise over `budget`
    genotypes sampled from a stream seeded by `seed`. Failures are reported,
    never raised.
    """
    if budget < 1:
        raise InvalidGenotypeError("budget must be >= 1")
    space = codec.alphabet.size ** codec.length
    exhaustive = space <= budget
    if exhaustive:
        genotypes = codec.all_genotypes()
    else:
        rng = RandomStream(seed).substream("verify-bijection")
        genotypes = (codec.random_genotype(rng) for _ in range(budget))

    seen: dict = {}
    collisions = []
    round_trip_failures = []
    checked = 0
    for g in genotypes:
        checked += 1
        x = decode(g, codec)
        key = _phenotype_key(x)
        if key in seen and seen[key] != g:
            collisions.append(((seen[key], g), key))
        else:
            seen[key] = g
        if codec.encode_fn is not None:
            if encode(x, codec) != g:
                round_trip_failures.append(g)
    return BijectionReport(checked, exhaustive, tuple(collisions), tuple(round_trip_failures))


# --- entropy diagnostics ---

def _check_distribution(dist) -> np.ndarray:
    p = np.asarray(dist, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistributionError("distribution must be a nonempty 1-d vector")
    if np.any(p < 0):
        raise InvalidDistributionError(f"negative probability entry in {p}")
    s = float(p.sum())
    if abs(s - 1.0) > PROB_SUM_TOL:
        raise InvalidDistributionError(f"probabilities sum to {s}, not 1")
    return p


def shannon_entropy(dist) -> float:
    """-sum p_i log2 p_i, with 0 log 0 := 0. Result in bits."""
    p = _check_distribution(dist)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def renyi2_entropy(dist) -> float:
    """Second-order Renyi entropy -log2 sum p_i^2, in bits."""
    p = _check_distribution(dist)
    return float(-math.log2(float((p * p).sum())))


# --- equivalence-induced partitions ---

@dataclass(frozen=True)
class Partition:
    """Disjoint cover of a finite genotype universe."""

    cells: tuple[frozenset, ...]
    universe: frozenset


def induce_partition(universe: Iterable, relation: Callable[[Any, Any], bool],
                     check_samples: int = 1000, seed: int = 0) -> Partition:
    """Quotient a finite universe by an equivalence predicate.

    The predicate is sample-checked for reflexivity, symmetry, and
    transitivity on `check_samples` random triples before the cells are
    built; a violating triple is reported by InvalidRelationError.
    """
    elems = list(universe)
    if not elems:
        raise InvalidRelationError("universe must be nonempty")

    rng = RandomStream(seed).substream("relation-check")
    n = len(elems)
    for _ in range(check_samples):
        a = elems[rng.choice_index(n)]
        b = elems[rng.choice_index(n)]
        c = elems[rng.choice_index(n)]
        if not relation(a, a):
            raise InvalidRelationError(f"not reflexive at {a!r}")
        if relation(a, b) != relation(b, a):
            raise InvalidRelationError(f"not symmetric on ({a!r}, {b!r})")
        if relation(a, b) and relation(b, c) and not relation(a, c):
            raise InvalidRelationError(f"not transitive on ({a!r}, {b!r}, {c!r})")

    cells: list[tuple[Any, set]] = []   # (representative, members)
    for g in elems:
        for rep, members in cells:
            if relation(g, rep):
                members.add(g)
                break
        else:
            cells.append((g, {g}))
    return Partition(tuple(frozenset(m) for _, m in cells), frozenset(elems))


def verify_partition(p: Partition) -> bool:
    """True iff cells are disjoint, nonempty, and cover the universe."""
    if any(len(c) == 0 for c in p.cells):
        return False
    union: set = set()
    total = 0
    for c in p.cells:
        union |= c
        total += len(c)
    return total == len(union) and union == set(p.universe)
