"""Correlator-coefficient forms, unique normalization, and equivalence.

An inequality over no-signalling correlations can be written as

    sum_{I, x_I, a_I}  c(a_I, x_I) E(a_I | x_I)  <=  c0

where the generalized correlators E extend E(a|x) = k p(a|x) - 1
multiplicatively over party subsets.  Because sum_{a_i} E(a_I|x_I) = 0,
the coefficients carry a gauge freedom; requiring every single-outcome
sum of coefficients to vanish fixes them uniquely, and the normalized
coefficients only get permuted by relabelings of parties, settings or
outcomes.  Sorted per-order coefficient multisets are therefore cheap
equivalence-class invariants, and exact equivalence is decided by a
pruned search over the relabeling group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import lru_cache

from .errors import NoViolationError, PreconditionError, UnsupportedParametrization
from .polytope import Inequality
from .rational import QQ, ZERO, integerize
from .scenario import (CorrelationVector, ParamTag, Scenario, cg_index,
                       convert, full_index, fullcorr_index, party_subsets)

__all__ = [
    "CorrelatorForm", "EquivalenceKey", "LiftingReport",
    "to_correlator_form", "normalize", "scale_fix", "invariants",
    "are_equivalent", "classify", "EquivalenceClass",
    "detect_lifting", "noise_resistance", "functional_full_to_ns",
]


# ---------------------------------------------------------------------------
# the full-outcome correlator index

@lru_cache(maxsize=None)
def corr_full_index(n: int, m: int, k: int):
    """Keys (parties, settings, outcomes) with outcomes over the full
    range 0..k-1 (an overcomplete spanning family), plus the positions
    of each (parties, settings) block, whose outcome entries are laid
    out contiguously in mixed-radix order."""
    keys = []
    blocks = {}
    for parties in party_subsets(n):
        size = len(parties)
        for x in itertools.product(range(m), repeat=size):
            blocks[(parties, x)] = (len(keys), k ** size)
            for a in itertools.product(range(k), repeat=size):
                keys.append((parties, x, a))
    pos = {key: i for i, key in enumerate(keys)}
    return keys, pos, blocks


@dataclass(frozen=True)
class CorrelatorForm:
    """Dense coefficients over the full-outcome correlator family."""
    scenario: Scenario
    coeffs: tuple
    bound: object
    normalized: bool = False

    def __post_init__(self):
        n, m, k = self.scenario.nmk
        keys, _, _ = corr_full_index(n, m, k)
        if len(self.coeffs) != len(keys):
            raise PreconditionError("coefficient vector does not match the "
                                    "correlator index of the scenario")

    def coeff(self, parties, x, a):
        _, pos, _ = corr_full_index(*self.scenario.nmk)
        return self.coeffs[pos[(tuple(parties), tuple(x), tuple(a))]]

    def evaluate(self, p: CorrelationVector):
        """Form value minus bound on a correlation vector (> 0: violated)."""
        evals = _full_range_correlators(p)
        total = ZERO
        for c, e in zip(self.coeffs, evals):
            if c and e:
                total += c * e
        return total - self.bound


def _full_range_correlators(p: CorrelationVector) -> tuple:
    """E(a_I|x_I) over the full outcome range: the restricted-outcome
    correlator coordinates extended via sum_{a_i} E = 0."""
    n, m, k = p.scenario.nmk
    cp = convert(p, ParamTag.CORRELATOR)
    _, rpos = cg_index(n, m, k)
    keys, _, _ = corr_full_index(n, m, k)
    out = []
    for parties, x, a in keys:
        high = [t for t, ai in enumerate(a) if ai == k - 1]
        if not high:
            out.append(cp.coords[rpos[(parties, x, a)]])
            continue
        total = ZERO
        sign = QQ(-1) ** len(high)
        for repl in itertools.product(range(k - 1), repeat=len(high)):
            aa = list(a)
            for t, v in zip(high, repl):
                aa[t] = v
            total += cp.coords[rpos[(parties, x, tuple(aa))]]
        out.append(sign * total)
    return tuple(out)


# ---------------------------------------------------------------------------
# building correlator forms from inequalities

def _full_prob_expansion(n, m, k, s, r):
    """Collins-Gisin expansion of one full probability p(r|s): yields
    (parties, x, a, sign) terms; parties == () denotes the constant 1."""
    high = [i for i in range(n) if r[i] == k - 1]
    low = [i for i in range(n) if r[i] != k - 1]
    for t_size in range(len(high) + 1):
        for t in itertools.combinations(high, t_size):
            for assign in itertools.product(range(k - 1), repeat=t_size):
                parties = tuple(sorted(low + list(t)))
                amap = {i: r[i] for i in low}
                amap.update(dict(zip(t, assign)))
                a = tuple(amap[i] for i in parties)
                x = tuple(s[i] for i in parties)
                yield parties, x, a, (-1) ** t_size


def functional_full_to_ns(scenario: Scenario, coeffs, bound):
    """Re-express a functional on the full-probability space over the
    Collins-Gisin coordinates (restriction to the no-signalling affine
    subspace).  Returns (ns_coeffs, ns_bound)."""
    n, m, k = scenario.nmk
    fkeys, _ = full_index(n, m, k)
    _, cpos = cg_index(n, m, k)
    h_ns = [ZERO] * len(cpos)
    const = ZERO
    for (s, r), hv in zip(fkeys, coeffs):
        if not hv:
            continue
        for parties, x, a, sign in _full_prob_expansion(n, m, k, s, r):
            if parties:
                h_ns[cpos[(parties, x, a)]] += sign * hv
            else:
                const += sign * hv
    return tuple(h_ns), QQ(bound) - const


def to_correlator_form(ineq: Inequality) -> CorrelatorForm:
    """Exact re-expression of an inequality over the correlator family.

    The output has support only on restricted outcomes (a_i <= k-2);
    apply normalize() afterwards for the unique gauge.  Evaluating the
    form equals evaluating the inequality on every point.
    """
    sc = ineq.scenario
    n, m, k = sc.nmk
    keys, pos, _ = corr_full_index(n, m, k)
    c = [ZERO] * len(keys)

    if ineq.param == ParamTag.FULL_CORRELATOR_ONLY:
        fkeys, _ = fullcorr_index(n, m)
        parties = tuple(range(n))
        zeros = (0,) * n
        for x, hv in zip(fkeys, ineq.coeffs):
            if hv:
                c[pos[(parties, x, zeros)]] = QQ(hv)
        return CorrelatorForm(sc, tuple(c), QQ(ineq.bound))

    if ineq.param == ParamTag.FULL_PROBABILITY:
        h, h0 = functional_full_to_ns(sc, ineq.coeffs, ineq.bound)
    elif ineq.param == ParamTag.NO_SIGNALLING:
        h, h0 = tuple(ineq.coeffs), QQ(ineq.bound)
    elif ineq.param == ParamTag.CORRELATOR:
        ckeys, _ = cg_index(n, m, k)
        for key, hv in zip(ckeys, ineq.coeffs):
            if hv:
                c[pos[key]] = QQ(hv)
        return CorrelatorForm(sc, tuple(c), QQ(ineq.bound))
    else:
        raise UnsupportedParametrization(str(ineq.param))

    # p(a_J|x_J) = k^{-|J|} sum_{L subset J} E(a_L|x_L), E(empty) = 1
    ckeys, _ = cg_index(n, m, k)
    const = ZERO
    for (parties, x, a), hv in zip(ckeys, h):
        if not hv:
            continue
        size = len(parties)
        w = hv / k ** size
        const += w
        idx = range(size)
        for lsize in range(1, size + 1):
            for sel in itertools.combinations(idx, lsize):
                key = (tuple(parties[t] for t in sel),
                       tuple(x[t] for t in sel),
                       tuple(a[t] for t in sel))
                c[pos[key]] += w
    return CorrelatorForm(sc, tuple(c), h0 - const)


# ---------------------------------------------------------------------------
# unique normalization

def _normalize_block(values: list, size: int, k: int) -> list:
    """Apply prod_t (Id - (1/k) sum_{a_t}) to one (parties, settings)
    block laid out in mixed-radix outcome order."""
    vals = list(values)
    stride = 1
    for _ in range(size):
        # subtract the mean over the digit with the current stride
        for start in range(0, len(vals), stride * k):
            for off in range(stride):
                base = start + off
                total = ZERO
                for t in range(k):
                    total += vals[base + t * stride]
                mean = total / k
                if mean:
                    for t in range(k):
                        vals[base + t * stride] -= mean
        stride *= k
    return vals


def normalize(cf: CorrelatorForm) -> CorrelatorForm:
    """The unique gauge: every single-outcome sum of coefficients is
    zero.  Idempotent, value-preserving on no-signalling points."""
    n, m, k = cf.scenario.nmk
    _, _, blocks = corr_full_index(n, m, k)
    out = list(cf.coeffs)
    for (parties, x), (start, length) in blocks.items():
        block = out[start:start + length]
        if any(block):
            out[start:start + length] = _normalize_block(block, len(parties), k)
    return CorrelatorForm(cf.scenario, tuple(out), cf.bound, normalized=True)


def scale_fix(cf: CorrelatorForm) -> CorrelatorForm:
    """Multiply by the positive rational making all entries (bound
    included) integral with gcd one."""
    scaled = integerize(tuple(cf.coeffs) + (QQ(cf.bound),))
    return replace(cf, coeffs=tuple(QQ(v) for v in scaled[:-1]),
                   bound=QQ(scaled[-1]))


# ---------------------------------------------------------------------------
# equivalence keys and group search

@dataclass(frozen=True)
class EquivalenceKey:
    bound: int
    multisets: tuple   # per order 1..n: sorted tuple of integer coefficients

    def as_tuple(self):
        return (self.bound, self.multisets)


def _canonical_form(ineq_or_form) -> CorrelatorForm:
    cf = ineq_or_form
    if isinstance(cf, Inequality):
        cf = to_correlator_form(cf)
    if not cf.normalized:
        cf = normalize(cf)
    return scale_fix(cf)


def invariants(cf) -> EquivalenceKey:
    """Relabeling-invariant key: the local bound plus the sorted
    coefficient multiset of each interaction order."""
    cf = _canonical_form(cf)
    n, m, k = cf.scenario.nmk
    keys, _, _ = corr_full_index(n, m, k)
    per_order: dict[int, list] = {s: [] for s in range(1, n + 1)}
    for (parties, x, a), v in zip(keys, cf.coeffs):
        per_order[len(parties)].append(int(v))
    return EquivalenceKey(int(cf.bound),
                          tuple(tuple(sorted(per_order[s]))
                                for s in range(1, n + 1)))


@lru_cache(maxsize=65536)
def _form_profile(cf: CorrelatorForm):
    """Per-(party, setting, outcome) slot data reused across searches:
    the single-party coefficient blocks and, as a pruning signature, the
    sorted multiset of (order, coefficient) over every key through the
    slot.  Relabelings map slots to slots preserving the signature."""
    n, m, k = cf.scenario.nmk
    keys, _, blocks = corr_full_index(n, m, k)
    single = []
    for i in range(n):
        per_setting = []
        for x in range(m):
            start, length = blocks[((i,), (x,))]
            per_setting.append(tuple(cf.coeffs[start:start + length]))
        single.append(per_setting)
    sig_acc: dict[tuple, list] = {}
    for (parties, x, a), v in zip(keys, cf.coeffs):
        if v:
            order = len(parties)
            for i, xi, ai in zip(parties, x, a):
                sig_acc.setdefault((i, xi, ai), []).append((order, v))
    sig = {}
    for i in range(n):
        for x in range(m):
            for a in range(k):
                sig[(i, x, a)] = tuple(sorted(sig_acc.get((i, x, a), [])))
    return single, sig


class _GroupSearch:
    """Backtracking search for a relabeling mapping one normalized form
    onto another.

    A relabeling is a party permutation, a setting permutation per
    party, and an outcome permutation per party and setting; it acts by
    permuting coefficient keys.  Candidates are generated per party from
    the single-party blocks plus slot signatures (which also constrain
    forms whose marginal blocks vanish, like full-correlator ones), and
    verified incrementally on every block supported inside the assigned
    party set.
    """

    def __init__(self, c1: CorrelatorForm, c2: CorrelatorForm, node_budget: int):
        self.sc = c1.scenario
        self.n, self.m, self.k = self.sc.nmk
        keys, pos, blocks = corr_full_index(self.n, self.m, self.k)
        self.keys, self.pos, self.blocks = keys, pos, blocks
        self.v1, self.v2 = c1.coeffs, c2.coeffs
        self.nodes = 0
        self.node_budget = node_budget
        self.single1, self.sig1 = _form_profile(c1)
        self.single2, self.sig2 = _form_profile(c2)
        # verification triggers: subsets by the largest source party inside
        self.triggers = {i: [] for i in range(self.n)}
        for parties in party_subsets(self.n):
            if len(parties) >= 2:
                self.triggers[max(parties)].append(parties)

    def _party_candidates(self, i, t):
        """All (sigma, tau) making source party i's single blocks and
        slot signatures match target party t: sigma maps settings,
        tau[x] maps outcomes of setting x."""
        res = []
        src = self.single1[i]
        tgt = self.single2[t]
        sig1, sig2 = self.sig1, self.sig2
        outcome_perms = list(itertools.permutations(range(self.k)))
        per_setting_options = []
        for x in range(self.m):
            opts = []
            for xp in range(self.m):
                taus = [tau for tau in outcome_perms
                        if all(tgt[xp][tau[a]] == src[x][a]
                               and sig2[(t, xp, tau[a])] == sig1[(i, x, a)]
                               for a in range(self.k))]
                if taus:
                    opts.append((xp, taus))
            per_setting_options.append(opts)

        def rec(x, used, sigma, tau_list):
            if x == self.m:
                res.append((tuple(sigma), tuple(tau_list)))
                return
            for xp, taus in per_setting_options[x]:
                if xp in used:
                    continue
                used.add(xp)
                sigma.append(xp)
                for tau in taus:
                    tau_list.append(tau)
                    rec(x + 1, used, sigma, tau_list)
                    tau_list.pop()
                sigma.pop()
                used.discard(xp)

        rec(0, set(), [], [])
        return res

    def _check_block(self, parties, assign):
        """Compare every (settings, outcomes) entry of the given source
        party-subset block against its image."""
        v1, v2, pos = self.v1, self.v2, self.pos
        size = len(parties)
        tgt_parties = tuple(assign[p][0] for p in parties)
        order = sorted(range(size), key=lambda t: tgt_parties[t])
        tgt_sorted = tuple(tgt_parties[t] for t in order)
        for x in itertools.product(range(self.m), repeat=size):
            xs = [assign[p][1][xi] for p, xi in zip(parties, x)]
            taus = [assign[p][2][xi] for p, xi in zip(parties, x)]
            xp = tuple(xs[t] for t in order)
            for a in itertools.product(range(self.k), repeat=size):
                val = v1[pos[(parties, x, a)]]
                ap = tuple(taus[t][a[t]] for t in order)
                if v2[pos[(tgt_sorted, xp, ap)]] != val:
                    return False
        return True

    def search(self):
        """True / False, or None when the node budget runs out."""
        cand_lists = []
        for i in range(self.n):
            per_target = {}
            for t in range(self.n):
                cands = self._party_candidates(i, t)
                if cands:
                    per_target[t] = cands
            if not per_target:
                return False
            cand_lists.append(per_target)

        assign: dict[int, tuple] = {}
        used_targets: set[int] = set()

        def rec(i):
            if i == self.n:
                return True
            for t, cands in cand_lists[i].items():
                if t in used_targets:
                    continue
                for sigma, taus in cands:
                    self.nodes += 1
                    if self.nodes > self.node_budget:
                        raise _BudgetUp()
                    assign[i] = (t, sigma, taus)
                    used_targets.add(t)
                    ok = all(self._check_block(parties, assign)
                             for parties in self.triggers[i])
                    if ok and rec(i + 1):
                        return True
                    used_targets.discard(t)
                    del assign[i]
            return False

        try:
            return rec(0)
        except _BudgetUp:
            return None


class _BudgetUp(Exception):
    pass


def are_equivalent(ineq1, ineq2, node_budget: int = 2_000_000):
    """Decide relabeling equivalence of two inequalities (or correlator
    forms) over the same scenario.

    Returns True / False, or None ("undecided") if the group search
    exceeds its node budget; keys are compared first, so unequal keys
    answer False immediately.
    """
    c1 = _canonical_form(ineq1)
    c2 = _canonical_form(ineq2)
    if c1.scenario.nmk != c2.scenario.nmk:
        raise PreconditionError("inequalities live in different scenarios")
    if invariants(c1) != invariants(c2):
        return False
    if c1.coeffs == c2.coeffs and c1.bound == c2.bound:
        return True
    return _GroupSearch(c1, c2, node_budget).search()


# ---------------------------------------------------------------------------
# classification

@dataclass
class EquivalenceClass:
    representative: Inequality
    form: CorrelatorForm
    key: EquivalenceKey
    members: list           # indices into the classified input list
    undecided: bool = False


def classify(ineqs: list, node_budget: int = 2_000_000,
             on_progress=None) -> list:
    """Group inequalities into relabeling-equivalence classes.

    Keys split the input into buckets; within a bucket the pruned group
    search decides membership against each class representative.  A
    search that exhausts its budget marks the class as undecided and
    starts a fresh class (conservative: never merges unproven pairs).
    """
    classes: list[EquivalenceClass] = []
    buckets: dict[tuple, list] = {}
    for idx, ineq in enumerate(ineqs):
        form = _canonical_form(ineq)
        key = invariants(form)
        bucket = buckets.setdefault(key.as_tuple(), [])
        placed = False
        for class_id in bucket:
            cls = classes[class_id]
            verdict = _GroupSearch(cls.form, form, node_budget).search()
            if verdict is True:
                cls.members.append(idx)
                placed = True
                break
            if verdict is None:
                cls.undecided = True
        if not placed:
            cls = EquivalenceClass(representative=ineq, form=form, key=key,
                                   members=[idx])
            bucket.append(len(classes))
            classes.append(cls)
        if on_progress is not None:
            on_progress(idx + 1, len(ineqs), len(classes))
    return classes


# ---------------------------------------------------------------------------
# lifting detection

@dataclass
class LiftingReport:
    genuine: bool
    setting_liftings: list    # (party, setting) pairs whose coefficients vanish
    outcome_liftings: list    # (party, setting, o1, o2) mergeable outcome pairs


def _marginal_rep(cf: CorrelatorForm):
    """Coefficients D with form value = D0 + sum D(a_J,x_J) p(a_J|x_J)
    over full-outcome marginal probabilities."""
    n, m, k = cf.scenario.nmk
    keys, pos, _ = corr_full_index(n, m, k)
    D = [ZERO] * len(keys)
    D0 = ZERO
    for (parties, x, a), cv in zip(keys, cf.coeffs):
        if not cv:
            continue
        size = len(parties)
        idx = range(size)
        for jsize in range(size + 1):
            sign = QQ(-1) ** (size - jsize)
            for sel in itertools.combinations(idx, jsize):
                if jsize == 0:
                    D0 += sign * cv
                    continue
                key = (tuple(parties[t] for t in sel),
                       tuple(x[t] for t in sel),
                       tuple(a[t] for t in sel))
                D[pos[key]] += sign * (k ** jsize) * cv
    return D, D0


def _merge_test(cf: CorrelatorForm, D, party: int, setting: int,
                o1: int, o2: int) -> bool:
    """Does the form depend on the outputs of (party, setting) only
    through the merged pair {o1, o2}?  Reduces the difference functional
    over the remaining parties to its unique normalized gauge."""
    n, m, k = cf.scenario.nmk
    _, pos, _ = corr_full_index(n, m, k)
    others = [q for q in range(n) if q != party]
    const = ZERO
    # correlator coefficients of the difference functional, over subsets
    # of the remaining parties
    c_delta: dict[tuple, object] = {}
    for jp_size in range(0, n):
        for jp in itertools.combinations(others, jp_size):
            full = tuple(sorted(jp + (party,)))
            slot = full.index(party)
            for x_rest in itertools.product(range(m), repeat=jp_size):
                for a_rest in itertools.product(range(k), repeat=jp_size):
                    xx = list(x_rest)
                    xx.insert(slot, setting)
                    a2 = list(a_rest)
                    a2.insert(slot, o2)
                    a1 = list(a_rest)
                    a1.insert(slot, o1)
                    delta = (D[pos[(full, tuple(xx), tuple(a2))]]
                             - D[pos[(full, tuple(xx), tuple(a1))]])
                    if not delta:
                        continue
                    w = delta / k ** jp_size
                    const += w
                    idx = range(jp_size)
                    for lsize in range(1, jp_size + 1):
                        for sel in itertools.combinations(idx, lsize):
                            key = (tuple(jp[t] for t in sel),
                                   tuple(x_rest[t] for t in sel),
                                   tuple(a_rest[t] for t in sel))
                            c_delta[key] = c_delta.get(key, ZERO) + w
    if const != 0:
        return False
    if not c_delta:
        return True
    # normalize the difference functional block by block; zero everywhere
    # means it vanishes on the whole no-signalling space
    by_block: dict[tuple, dict] = {}
    for (parties, x, a), v in c_delta.items():
        by_block.setdefault((parties, x), {})[a] = v
    for (parties, x), entries in by_block.items():
        size = len(parties)
        block = [entries.get(a, ZERO)
                 for a in itertools.product(range(k), repeat=size)]
        normd = _normalize_block(block, size, k)
        if any(normd):
            return False
    return True


def detect_lifting(cf) -> LiftingReport:
    """Flag inequalities that are embeddings of smaller scenarios:
    settings with all-vanishing coefficients, or outcome pairs of one
    setting of one party that the form never distinguishes."""
    cf = _canonical_form(cf)
    n, m, k = cf.scenario.nmk
    keys, _, _ = corr_full_index(n, m, k)
    used = {(i, x): False for i in range(n) for x in range(m)}
    for (parties, x, a), v in zip(keys, cf.coeffs):
        if v:
            for i, xi in zip(parties, x):
                used[(i, xi)] = True
    setting_liftings = sorted(key for key, u in used.items() if not u)

    outcome_liftings = []
    D, _ = _marginal_rep(cf)
    for i in range(n):
        for x in range(m):
            if (i, x) in setting_liftings:
                continue
            for o1, o2 in itertools.combinations(range(k), 2):
                if _merge_test(cf, D, i, x, o1, o2):
                    outcome_liftings.append((i, x, o1, o2))
    genuine = not setting_liftings and not outcome_liftings
    return LiftingReport(genuine, setting_liftings, outcome_liftings)


# ---------------------------------------------------------------------------
# noise resistance

def noise_resistance(cf: CorrelatorForm, violation_value):
    """Critical visibility under white-noise mixing: bound / violation.
    White noise zeroes every correlator, so the form value scales with
    the violating part only."""
    if isinstance(violation_value, float):
        bound = float(cf.bound)
        if violation_value <= bound:
            raise NoViolationError("value does not exceed the bound")
        return bound / violation_value
    v = QQ(violation_value)
    if v <= cf.bound:
        raise NoViolationError("value does not exceed the bound")
    return QQ(cf.bound) / v
