"""Bell scenarios, correlation-space parametrizations, and conversions.

A scenario (n, m, k) fixes n parties, m settings per party, k outcomes
per setting.  Correlation vectors can live in four coordinate systems:

* ``full``      -- all m^n * k^n conditional probabilities p(r|s);
* ``ns``        -- the Collins-Gisin coordinates: marginal blocks
                   p(a_I | x_I) over party subsets I, outcomes
                   restricted to the first k-1 values.  Free coordinates
                   for no-signalling distributions.
* ``correlator``-- generalized correlators E(a_I | x_I) over the same
                   index set (an invertible re-basis of ``ns``);
* ``fullcorr``  -- only the n-party correlators, one per full setting
                   tuple (k = 2 only; a lossy projection).

Canonical coordinate order everywhere: party subsets by size then
lexicographically, settings tuples lexicographically within a subset,
then outcome tuples lexicographically.  Outcomes are 0-based; the
Collins-Gisin blocks keep outcomes 0..k-2.

All coordinates are exact rationals; conversions between ``full``,
``ns`` and ``correlator`` are exact bijections.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable

from .errors import ScenarioError, SignallingViolation, UnsupportedParametrization
from .rational import QQ, ZERO, vector_from_json, vector_to_json


class Model(str, Enum):
    LOCAL = "local"
    SVETLICHNY = "svetlichny"
    FULL_CORRELATOR = "fullcorr"


class ParamTag(str, Enum):
    FULL_PROBABILITY = "full"
    NO_SIGNALLING = "ns"
    CORRELATOR = "correlator"
    FULL_CORRELATOR_ONLY = "fullcorr"


@dataclass(frozen=True)
class Scenario:
    n: int
    m: int
    k: int
    model: Model = Model.LOCAL

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.k < 2:
            raise ScenarioError(f"invalid scenario ({self.n},{self.m},{self.k})")
        if self.model == Model.SVETLICHNY and self.n != 3:
            raise ScenarioError("Svetlichny model is implemented for n = 3")
        if self.model == Model.FULL_CORRELATOR and self.k != 2:
            raise ScenarioError("full-correlator model requires binary outcomes")

    @property
    def nmk(self) -> tuple[int, int, int]:
        return (self.n, self.m, self.k)

    def parametrization(self, tag: ParamTag) -> "Parametrization":
        return Parametrization(tag, space_dimension(self, tag))

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "k": self.k, "model": self.model.value}

    @staticmethod
    def from_json(data: dict) -> "Scenario":
        return Scenario(data["n"], data["m"], data["k"], Model(data.get("model", "local")))


@dataclass(frozen=True)
class Parametrization:
    tag: ParamTag
    dim: int


def space_dimension(scenario: Scenario, tag: ParamTag) -> int:
    n, m, k = scenario.nmk
    if tag == ParamTag.FULL_PROBABILITY:
        return (m * k) ** n
    if tag in (ParamTag.NO_SIGNALLING, ParamTag.CORRELATOR):
        return (m * (k - 1) + 1) ** n - 1
    if tag == ParamTag.FULL_CORRELATOR_ONLY:
        if k != 2:
            raise UnsupportedParametrization(
                "full-correlator coordinates require k = 2")
        return m ** n
    raise UnsupportedParametrization(str(tag))


# ---------------------------------------------------------------------------
# index maps

def party_subsets(n: int) -> list[tuple[int, ...]]:
    """Nonempty party subsets, ordered by size then lexicographically."""
    out = []
    for size in range(1, n + 1):
        out.extend(itertools.combinations(range(n), size))
    return out


@lru_cache(maxsize=None)
def full_index(n: int, m: int, k: int):
    """Coordinate order of the full-probability space: (settings, outcomes)."""
    keys = []
    for s in itertools.product(range(m), repeat=n):
        for r in itertools.product(range(k), repeat=n):
            keys.append((s, r))
    pos = {key: i for i, key in enumerate(keys)}
    return keys, pos


@lru_cache(maxsize=None)
def cg_index(n: int, m: int, k: int):
    """Coordinate order of the Collins-Gisin / correlator space:
    (parties I, settings x_I, outcomes a_I) with outcomes in 0..k-2."""
    keys = []
    for parties in party_subsets(n):
        size = len(parties)
        for x in itertools.product(range(m), repeat=size):
            for a in itertools.product(range(k - 1), repeat=size):
                keys.append((parties, x, a))
    pos = {key: i for i, key in enumerate(keys)}
    return keys, pos


@lru_cache(maxsize=None)
def fullcorr_index(n: int, m: int):
    keys = list(itertools.product(range(m), repeat=n))
    pos = {key: i for i, key in enumerate(keys)}
    return keys, pos


# ---------------------------------------------------------------------------
# correlation vectors

@dataclass(frozen=True)
class CorrelationVector:
    scenario: Scenario
    param: ParamTag
    coords: tuple

    def __post_init__(self):
        expected = space_dimension(self.scenario, self.param)
        if len(self.coords) != expected:
            raise ScenarioError(
                f"coordinate vector has length {len(self.coords)}, "
                f"expected {expected} for {self.param.value}")

    @staticmethod
    def make(scenario: Scenario, param: ParamTag, coords: Iterable) -> "CorrelationVector":
        return CorrelationVector(scenario, param, tuple(QQ(c) for c in coords))

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario.to_json(),
            "param": self.param.value,
            "coords": vector_to_json(self.coords),
        }

    @staticmethod
    def from_json(data: dict) -> "CorrelationVector":
        return CorrelationVector(
            Scenario.from_json(data["scenario"]),
            ParamTag(data["param"]),
            vector_from_json(data["coords"]),
        )


def uniform_distribution(scenario: Scenario) -> CorrelationVector:
    n, m, k = scenario.nmk
    keys, _ = full_index(n, m, k)
    val = QQ(1, k ** n)
    return CorrelationVector(scenario, ParamTag.FULL_PROBABILITY,
                             tuple(val for _ in keys))


# ---------------------------------------------------------------------------
# marginals and conversions

def _marginal(coords, n, m, k, parties, x, a, others_settings):
    """p(a_parties | x_parties) evaluated with explicit settings for the
    remaining parties (equal for no-signalling distributions)."""
    _, pos = full_index(n, m, k)
    s = [0] * n
    for p, xi in zip(parties, x):
        s[p] = xi
    rest = [p for p in range(n) if p not in parties]
    for p, xi in zip(rest, others_settings):
        s[p] = xi
    total = ZERO
    s = tuple(s)
    for r_rest in itertools.product(range(k), repeat=len(rest)):
        r = [0] * n
        for p, ai in zip(parties, a):
            r[p] = ai
        for p, ri in zip(rest, r_rest):
            r[p] = ri
        total += coords[pos[(s, tuple(r))]]
    return total


def full_to_ns(p: CorrelationVector, check: bool = True) -> CorrelationVector:
    n, m, k = p.scenario.nmk
    keys, _ = cg_index(n, m, k)
    out = []
    for parties, x, a in keys:
        rest = [q for q in range(n) if q not in parties]
        base = _marginal(p.coords, n, m, k, parties, x, a, (0,) * len(rest))
        if check and rest:
            for other in itertools.product(range(m), repeat=len(rest)):
                if other == (0,) * len(rest):
                    continue
                alt = _marginal(p.coords, n, m, k, parties, x, a, other)
                if alt != base:
                    moved = [q for q, v in zip(rest, other) if v != 0]
                    raise SignallingViolation(
                        moved[0],
                        f"p(a_{parties}={a} | x_{parties}={x}) depends on "
                        f"outside settings {other}")
        out.append(base)
    return CorrelationVector(p.scenario, ParamTag.NO_SIGNALLING, tuple(out))


def ns_to_full(p: CorrelationVector) -> CorrelationVector:
    n, m, k = p.scenario.nmk
    fkeys, _ = full_index(n, m, k)
    _, cpos = cg_index(n, m, k)
    coords = p.coords

    def cg_value(parties, x, a):
        if not parties:
            return QQ(1)
        return coords[cpos[(parties, x, a)]]

    out = []
    for s, r in fkeys:
        # expand outcomes equal to k-1 via p(k-1, rest) = p(rest) - sum_{a<k-1}
        high = [i for i in range(n) if r[i] == k - 1]
        low = [i for i in range(n) if r[i] != k - 1]
        total = ZERO
        for t_size in range(len(high) + 1):
            for t in itertools.combinations(high, t_size):
                for assign in itertools.product(range(k - 1), repeat=t_size):
                    parties = tuple(sorted(low + list(t)))
                    amap = {i: r[i] for i in low}
                    amap.update(dict(zip(t, assign)))
                    a = tuple(amap[i] for i in parties)
                    x = tuple(s[i] for i in parties)
                    total += (QQ(-1) ** t_size) * cg_value(parties, x, a)
        out.append(total)
    return CorrelationVector(p.scenario, ParamTag.FULL_PROBABILITY, tuple(out))


def _subset_positions(parties, x, a, pos):
    """Positions of all sub-marginals (J, x_J, a_J) for J a subset of parties."""
    out = []
    idx = range(len(parties))
    for size in range(1, len(parties) + 1):
        for sel in itertools.combinations(idx, size):
            key = (tuple(parties[i] for i in sel),
                   tuple(x[i] for i in sel),
                   tuple(a[i] for i in sel))
            out.append((size, pos[key]))
    return out


def ns_to_correlator(p: CorrelationVector) -> CorrelationVector:
    """E(a_I|x_I) = sum_{J subset I} (-1)^{|I|-|J|} k^{|J|} p(a_J|x_J)."""
    n, m, k = p.scenario.nmk
    keys, pos = cg_index(n, m, k)
    coords = p.coords
    out = []
    for parties, x, a in keys:
        size = len(parties)
        total = QQ(-1) ** size  # empty subset: (-1)^{|I|} * k^0 * 1
        for jsize, jpos in _subset_positions(parties, x, a, pos):
            total += (QQ(-1) ** (size - jsize)) * (k ** jsize) * coords[jpos]
        out.append(total)
    return CorrelationVector(p.scenario, ParamTag.CORRELATOR, tuple(out))


def correlator_to_ns(p: CorrelationVector) -> CorrelationVector:
    """p(a_I|x_I) = k^{-|I|} sum_{J subset I} E(a_J|x_J), E(empty) = 1."""
    n, m, k = p.scenario.nmk
    keys, pos = cg_index(n, m, k)
    coords = p.coords
    out = []
    for parties, x, a in keys:
        size = len(parties)
        total = QQ(1)
        for _, jpos in _subset_positions(parties, x, a, pos):
            total += coords[jpos]
        out.append(total / k ** size)
    return CorrelationVector(p.scenario, ParamTag.NO_SIGNALLING, tuple(out))


_CONVERSIONS = {
    (ParamTag.FULL_PROBABILITY, ParamTag.NO_SIGNALLING): (full_to_ns,),
    (ParamTag.FULL_PROBABILITY, ParamTag.CORRELATOR): (full_to_ns, ns_to_correlator),
    (ParamTag.NO_SIGNALLING, ParamTag.FULL_PROBABILITY): (ns_to_full,),
    (ParamTag.NO_SIGNALLING, ParamTag.CORRELATOR): (ns_to_correlator,),
    (ParamTag.CORRELATOR, ParamTag.NO_SIGNALLING): (correlator_to_ns,),
    (ParamTag.CORRELATOR, ParamTag.FULL_PROBABILITY): (correlator_to_ns, ns_to_full),
}


def convert(p: CorrelationVector, target: ParamTag) -> CorrelationVector:
    """Exact change of coordinates between the invertible parametrizations."""
    if p.param == target:
        return p
    if target == ParamTag.FULL_CORRELATOR_ONLY or p.param == ParamTag.FULL_CORRELATOR_ONLY:
        raise UnsupportedParametrization(
            "full-correlator coordinates are a lossy projection; "
            "use to_full_correlators()")
    for fn in _CONVERSIONS[(p.param, target)]:
        p = fn(p)
    return p


def to_full_correlators(p: CorrelationVector) -> CorrelationVector:
    """Project onto the n-party correlators <prod_i A_{x_i}> (k = 2)."""
    n, m, k = p.scenario.nmk
    if k != 2:
        raise UnsupportedParametrization("full correlators require k = 2")
    full = convert(p, ParamTag.FULL_PROBABILITY)
    fkeys, fpos = full_index(n, m, k)
    keys, _ = fullcorr_index(n, m)
    out = []
    for s in keys:
        total = ZERO
        for r in itertools.product(range(2), repeat=n):
            val = full.coords[fpos[(s, r)]]
            if val:
                total += val if sum(r) % 2 == 0 else -val
        out.append(total)
    return CorrelationVector(p.scenario, ParamTag.FULL_CORRELATOR_ONLY, tuple(out))


# ---------------------------------------------------------------------------
# validation

@dataclass
class CheckItem:
    check: str        # "normalization" | "nonnegativity" | "no-signalling"
    context: str
    residual: object  # exact residual (mpq)
    ok: bool


@dataclass
class ValidationReport:
    items: list
    ok: bool

    def failures(self) -> list:
        return [i for i in self.items if not i.ok]


def validate_distribution(p: CorrelationVector) -> ValidationReport:
    """Exact normalization / nonnegativity / no-signalling diagnostics."""
    n, m, k = p.scenario.nmk
    if p.param != ParamTag.FULL_PROBABILITY:
        p = convert(p, ParamTag.FULL_PROBABILITY)
    keys, pos = full_index(n, m, k)
    coords = p.coords
    items = []

    for s in itertools.product(range(m), repeat=n):
        total = ZERO
        for r in itertools.product(range(k), repeat=n):
            total += coords[pos[(s, r)]]
        res = total - 1
        items.append(CheckItem("normalization", f"settings {s}", res, res == 0))

    neg = [(s, r) for (s, r) in keys if coords[pos[(s, r)]] < 0]
    for s, r in neg:
        items.append(CheckItem("nonnegativity", f"p({r}|{s})",
                               coords[pos[(s, r)]], False))
    if not neg:
        items.append(CheckItem("nonnegativity", "all entries", ZERO, True))

    # the marginal of every proper party subset must not depend on the
    # remaining parties' settings; failures are labeled by the subset
    # whose marginal is ambiguous
    for parties in party_subsets(n):
        if len(parties) == n:
            continue
        rest = [q for q in range(n) if q not in parties]
        bad = None
        for x in itertools.product(range(m), repeat=len(parties)):
            for a in itertools.product(range(k), repeat=len(parties)):
                vals = []
                for x_rest in itertools.product(range(m), repeat=len(rest)):
                    vals.append(_marginal(coords, n, m, k, parties, x, a, x_rest))
                if any(v != vals[0] for v in vals):
                    bad = (x, a, vals)
                    break
            if bad:
                break
        label = (f"party {parties[0] + 1}" if len(parties) == 1
                 else "parties " + ",".join(str(q + 1) for q in parties))
        if bad:
            x, a, vals = bad
            items.append(CheckItem(
                "no-signalling", f"{label}: marginal p({a}|{x}) varies with "
                "outside settings", max(vals) - min(vals), False))
        else:
            items.append(CheckItem("no-signalling", label, ZERO, True))

    return ValidationReport(items, all(i.ok for i in items))


__all__ = [
    "Model", "ParamTag", "Scenario", "Parametrization", "CorrelationVector",
    "space_dimension", "party_subsets", "full_index", "cg_index",
    "fullcorr_index", "uniform_distribution", "convert", "to_full_correlators",
    "validate_distribution", "ValidationReport", "CheckItem",
    "full_to_ns", "ns_to_full", "ns_to_correlator", "correlator_to_ns",
]
