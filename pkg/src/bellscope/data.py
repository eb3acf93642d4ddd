"""Bundled reference inequalities.

Bipartite inequalities are stored in the block-table notation that is
standard for Collins-Gisin coordinates: a header row/column of marginal
coefficients (settings blocks of k-1 outcome columns each) around the
joint-coefficient body, with bound 0 unless noted.  Multipartite
party-symmetric inequalities are stored as coefficient patterns per
(subset size, settings multiset), all outcomes at the first value, with
"sym" expansion over every party subset.  Tables with fewer outcomes on
some setting embed canonically by padding the absent Collins-Gisin
columns with zeros (merging the top outcomes of the larger scenario).
"""

from __future__ import annotations

from .polytope import Inequality
from .rational import QQ, ZERO
from .scenario import ParamTag, Scenario, cg_index, fullcorr_index

__all__ = ["bundled_inequality", "bundled_names", "bipartite_cg_inequality",
           "symmetric_pattern_inequality", "fullcorr_inequality"]


def bipartite_cg_inequality(scenario: Scenario, alice, bob, body,
                            bound=0, outcome_counts=None,
                            name: str = "") -> Inequality:
    """Build a bipartite inequality from its Collins-Gisin table.

    ``alice``/``bob``: flat marginal coefficient lists, settings blocks
    concatenated; ``body``: joint coefficients, rows = Alice (setting,
    outcome) pairs, columns = Bob.  ``outcome_counts`` gives the number
    of Collins-Gisin outcome columns per setting when a block is
    narrower than k-1 (canonical lifting pads the rest with zeros).
    """
    n, m, k = scenario.nmk
    if n != 2:
        raise ValueError("table form is bipartite")
    counts = outcome_counts or [k - 1] * m
    slots = []      # row index -> (setting, outcome)
    for x in range(m):
        for a in range(counts[x]):
            slots.append((x, a))
    if len(alice) != len(slots) or len(bob) != len(slots):
        raise ValueError("marginal length does not match the settings blocks")
    keys, pos = cg_index(n, m, k)
    coeffs = [ZERO] * len(keys)
    for (x, a), v in zip(slots, alice):
        if v:
            coeffs[pos[((0,), (x,), (a,))]] = QQ(v)
    for (y, b), v in zip(slots, bob):
        if v:
            coeffs[pos[((1,), (y,), (b,))]] = QQ(v)
    for (x, a), row in zip(slots, body):
        for (y, b), v in zip(slots, row):
            if v:
                coeffs[pos[((0, 1), (x, y), (a, b))]] = QQ(v)
    return Inequality(scenario, ParamTag.NO_SIGNALLING, tuple(coeffs),
                      QQ(bound), provenance=name or "bundled")


def symmetric_pattern_inequality(scenario: Scenario, patterns: dict,
                                 bound=0, name: str = "") -> Inequality:
    """Party-symmetric inequality from per-pattern coefficients.

    ``patterns`` maps sorted settings tuples (0-based, any subset size)
    to the coefficient of every marginal p(0...0 | x_I) whose settings
    multiset matches.
    """
    n, m, k = scenario.nmk
    keys, pos = cg_index(n, m, k)
    coeffs = [ZERO] * len(keys)
    for (parties, x, a), idx in zip(keys, range(len(keys))):
        if any(ai != 0 for ai in a):
            continue
        v = patterns.get(tuple(sorted(x)))
        if v:
            coeffs[idx] = QQ(v)
    return Inequality(scenario, ParamTag.NO_SIGNALLING, tuple(coeffs),
                      QQ(bound), provenance=name or "bundled")


def fullcorr_inequality(scenario: Scenario, patterns: dict, bound,
                        name: str = "") -> Inequality:
    """Full-correlator inequality from settings-multiset coefficients."""
    n, m, _ = scenario.nmk
    keys, _ = fullcorr_index(n, m)
    coeffs = [QQ(patterns.get(tuple(sorted(x)), 0)) for x in keys]
    return Inequality(scenario, ParamTag.FULL_CORRELATOR_ONLY, tuple(coeffs),
                      QQ(bound), provenance=name or "bundled")


# ---------------------------------------------------------------------------
# the (2,2,4) symmetric four-outcome inequalities, table notation

_S224 = {
    "S1_224": {
        "bob": [-1, -1, -1, 0, 0, 0],
        "rows": [
            (-1, [0, 0, 1, 1, 1, 1]),
            (-1, [0, 1, 1, 1, 1, 0]),
            (-1, [1, 1, 1, 1, 0, 0]),
            (0, [1, 1, 1, -1, -1, -1]),
            (0, [1, 1, 0, -1, -1, 0]),
            (0, [1, 0, 0, -1, 0, 0]),
        ],
    },
    "S2_224": {
        "bob": [-1, -1, 0, -1, 0, 0],
        "rows": [
            (-1, [0, 1, 0, 1, 0, 1]),
            (-1, [1, 0, 0, 1, 1, 0]),
            (0, [0, 0, -1, 1, 0, 0]),
            (-1, [1, 1, 1, 1, 0, 0]),
            (0, [0, 1, 0, 0, 0, -1]),
            (0, [1, 0, 0, 0, -1, 0]),
        ],
    },
    "S3_224": {
        "bob": [-1, -1, 0, -1, -1, 0],
        "rows": [
            (-1, [0, 0, 1, 1, 1, 0]),
            (-1, [0, 1, 0, 1, 0, 1]),
            (0, [1, 0, 0, -1, -1, 0]),
            (-1, [1, 1, -1, 1, 2, 0]),
            (-1, [1, 0, -1, 2, 2, 0]),
            (0, [0, 1, 0, 0, 0, -1]),
        ],
    },
    "S4_224": {
        "bob": [-1, -1, 0, -1, -1, 0],
        "rows": [
            (-1, [-1, 1, -1, 1, 2, 1]),
            (-1, [1, 1, 0, 1, 0, 1]),
            (0, [-1, 0, -1, 1, 1, 0]),
            (-1, [1, 1, 1, 1, 0, 0]),
            (-1, [2, 0, 1, 0, 1, -1]),
            (0, [1, 1, 0, 0, -1, -1]),
        ],
    },
    "S5_224": {
        "bob": [-1, -1, -1, 0, 0, 0],
        "rows": [
            (-1, [0, 1, 1, 0, 0, 1]),
            (-1, [1, 0, 1, 0, 1, 0]),
            (-1, [1, 1, 0, 1, 0, 0]),
            (0, [0, 0, 1, 0, -1, -1]),
            (0, [0, 1, 0, -1, 0, -1]),
            (0, [1, 0, 0, -1, -1, 0]),
        ],
    },
    "S6_224": {
        "bob": [-1, -1, -1, -1, 0, 0],
        "rows": [
            (-1, [0, 1, 1, 0, 1, 0]),
            (-1, [1, 1, 0, 1, 0, 1]),
            (-1, [1, 0, -1, 2, 0, 1]),
            (-1, [0, 1, 2, 1, -1, 0]),
            (0, [1, 0, 0, -1, 0, -1]),
            (0, [0, 1, 1, 0, -1, -1]),
        ],
    },
    "S7_224": {
        "bob": [-1, -1, -1, 0, 0, 0],
        "rows": [
            (-1, [0, 1, 1, 0, 0, 1]),
            (-1, [1, 0, 0, 1, 1, 0]),
            (-1, [1, 0, 1, 1, 0, 0]),
            (0, [0, 1, 1, -1, 0, -1]),
            (0, [0, 1, 0, 0, 0, -1]),
            (0, [1, 0, 0, -1, -1, 0]),
        ],
    },
    "S8_224": {
        "bob": [-2, -1, -1, 0, 0, 0],
        "rows": [
            (-2, [2, 0, 1, 0, 1, 2]),
            (-1, [0, 1, 1, 1, 0, 0]),
            (-1, [1, 1, 0, 0, 1, 0]),
            (0, [0, 1, 0, -1, -1, 0]),
            (0, [1, 0, 1, -1, 0, -1]),
            (0, [2, 0, 0, 0, -1, -2]),
        ],
    },
}

# three outcomes on the first setting, four on the second
_S2_2_34 = {
    "bob": [-1, -1, 0, 0, 0],
    "rows": [
        (-1, [0, 1, 0, 1, 1]),
        (-1, [1, 0, 1, 0, 1]),
        (0, [0, 1, 0, -1, -1]),
        (0, [1, 0, -1, 0, -1]),
        (0, [1, 1, -1, -1, -1]),
    ],
    "outcome_counts": [2, 3],
}

# the two previously unlisted symmetric (2,4,2) inequalities
_S51 = {
    "bob": [-1, -2, -2, -2],
    "rows": [
        (-1, [-3, 3, 2, 2]),
        (-2, [3, 2, -1, -1]),
        (-2, [2, -1, -1, 3]),
        (-2, [2, -1, 3, 0]),
    ],
}
_S52 = {
    "bob": [0, -2, -2, -2],
    "rows": [
        (0, [-3, 2, -2, 1]),
        (-2, [2, 0, 2, 2]),
        (-2, [-2, 2, 4, -1]),
        (-2, [1, 2, -1, 1]),
    ],
}


def _table_inequality(name, sc, spec_dict):
    alice = [r[0] for r in spec_dict["rows"]]
    body = [r[1] for r in spec_dict["rows"]]
    return bipartite_cg_inequality(sc, alice, spec_dict["bob"], body,
                                   outcome_counts=spec_dict.get("outcome_counts"),
                                   name=name)


def _build_bundled() -> dict:
    out = {}
    sc224 = Scenario(2, 2, 4)
    for name, tbl in _S224.items():
        out[name] = _table_inequality(name, sc224, tbl)
    out["S2_2_34"] = _table_inequality("S2_2_34", sc224, _S2_2_34)

    sc242 = Scenario(2, 4, 2)
    out["S51_242"] = _table_inequality("S51_242", sc242, _S51)
    out["S52_242"] = _table_inequality("S52_242", sc242, _S52)

    sc222 = Scenario(2, 2, 2)
    out["CH"] = bipartite_cg_inequality(
        sc222, [-1, 0], [-1, 0], [[1, 1], [1, -1]], name="CH")
    # the four symmetrized-polytope facet classes of (2,2,2), <= 0 form
    out["POS_222"] = bipartite_cg_inequality(
        sc222, [0, 0], [0, 0], [[-1, 0], [0, 0]], name="POS_222")
    out["CROSS_222"] = bipartite_cg_inequality(
        sc222, [0, 0], [0, 0], [[0, -1], [-1, 0]], name="CROSS_222")
    out["MARG_222"] = bipartite_cg_inequality(
        sc222, [-1, 0], [-1, 0], [[2, 0], [0, 0]], name="MARG_222")

    # 4-party inequality violated by the W state with planar measurements
    sc422 = Scenario(4, 2, 2)
    out["I_W"] = symmetric_pattern_inequality(sc422, {
        (0, 0): -1,
        (0, 0, 0): 1,
        (0, 0, 1): 1,
        (1, 1, 1): -1,
        (0, 0, 0, 0): -1,
        (0, 0, 0, 1): -1,
        (0, 0, 1, 1): -1,
        (0, 1, 1, 1): 1,
        (1, 1, 1, 1): 1,
    }, bound=0, name="I_W")

    out["I_GHZ"] = symmetric_pattern_inequality(Scenario(3, 2, 2), {
        (1,): -3,
        (0, 1): 1,
        (0, 0, 0): -1,
        (0, 1, 1): -1,
        (1, 1, 1): 7,
    }, bound=0, name="I_GHZ")

    out["I_CORR"] = fullcorr_inequality(Scenario(3, 2, 2), {
        (0, 0, 0): -1,
        (0, 0, 1): 1,
        (0, 1, 1): -3,
        (1, 1, 1): -3,
    }, bound=10, name="I_CORR")
    return out


_BUNDLED_CACHE: dict | None = None


def bundled_inequality(name: str) -> Inequality:
    global _BUNDLED_CACHE
    if _BUNDLED_CACHE is None:
        _BUNDLED_CACHE = _build_bundled()
    if name not in _BUNDLED_CACHE:
        raise KeyError(f"unknown bundled inequality {name!r}; "
                       f"available: {', '.join(sorted(_BUNDLED_CACHE))}")
    return _BUNDLED_CACHE[name]


def bundled_names() -> list:
    global _BUNDLED_CACHE
    if _BUNDLED_CACHE is None:
        _BUNDLED_CACHE = _build_bundled()
    return sorted(_BUNDLED_CACHE)


APPENDIX_224_GENUINE = ["S1_224", "S2_224", "S3_224", "S4_224",
                        "S5_224", "S6_224", "S7_224", "S8_224"]
