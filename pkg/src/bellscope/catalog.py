"""End-to-end pipeline, catalog persistence, and table rendering.

A catalog is the classified output of one enumeration run: vertex and
dimension counts, one record per inequality class (normalized
coefficients, invariant key, facet and lifting flags, table rendering),
plus enough metadata to re-verify every record from scratch.
Catalogs are written atomically as JSON with decimal-string rationals.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import time
from dataclasses import dataclass

from . import __version__
from .canon import (CorrelatorForm, _canonical_form, classify,
                    detect_lifting, functional_full_to_ns, invariants)
from .dd import DDState
from .errors import BudgetExhausted, ScenarioError, VerificationError
from .linalg import affine_rank
from .nsface import NSFaceContext, face_dim_in_subspace
from .polytope import (Inequality, facet_enumeration, is_facet, is_valid,
                       polytope_hull, saturating_vertices, symmetric_extension)
from .rational import QQ, rat_to_pair
from .scenario import Model, ParamTag, Scenario, cg_index, fullcorr_index
from .symmetry import build_symmetric_subspace, project_vertices_symmetric
from .vertices import (Polytope, enumerate_local_vertices,
                       enumerate_svetlichny_vertices, project_full_correlators)

__all__ = ["Catalog", "ClassRecord", "run_pipeline", "render_cg_table",
           "verify_catalog", "local_polytope_correlator_param"]


# ---------------------------------------------------------------------------
# rendering

_PARTY_LETTERS = "abcdefgh"


def _render_block_table(ineq: Inequality) -> str:
    """The bipartite Collins-Gisin block table: marginal headers around
    the joint body, one block of k-1 outcome columns per setting."""
    sc = ineq.scenario
    n, m, k = sc.nmk
    nf = ineq.normal_form()
    _, pos = cg_index(n, m, k)
    slots = [(x, a) for x in range(m) for a in range(k - 1)]
    alice = [nf.coeffs[pos[((0,), (x,), (a,))]] for x, a in slots]
    bob = [nf.coeffs[pos[((1,), (y,), (b,))]] for y, b in slots]
    body = [[nf.coeffs[pos[((0, 1), (x, y), (a, b))]] for y, b in slots]
            for x, a in slots]
    width = max(len(str(int(v)))
                for v in itertools.chain(alice, bob, [0], *body)) + 2

    def cell(v):
        return str(int(v)).rjust(width)

    def row_text(head, cells):
        parts = []
        for i, v in enumerate(cells):
            if i > 0 and i % (k - 1) == 0:
                parts.append(" |")
            parts.append(cell(v))
        return head + " ||" + "".join(parts)

    lines = [row_text(" " * width, bob)]
    sep = "-" * width + "-++" + "-".join([])
    block_width = len(lines[0]) - (width + 3)
    lines.insert(1, "=" * width + "=++" + "=" * block_width)
    for idx, (x, a) in enumerate(slots):
        if idx > 0 and idx % (k - 1) == 0:
            lines.append("-" * width + "-++" + "-" * block_width)
        lines.append(row_text(cell(alice[idx]), body[idx]))
    lines.append(f"<= {int(nf.bound)}")
    return "\n".join(lines)


def _term_name(parties, x, a, k) -> str:
    bits = []
    for i, xi, ai in zip(parties, x, a):
        t = f"{_PARTY_LETTERS[i]}{xi + 1}"
        if k > 2 and ai != 0:
            t += f"^{ai}"
        bits.append(t)
    return "p(" + "".join(bits) + ")"


def _render_terms(ineq: Inequality) -> str:
    """Sum-of-terms rendering for inequalities that are not bipartite
    tables: Collins-Gisin marginal terms or full correlators."""
    sc = ineq.scenario
    n, m, k = sc.nmk
    nf = ineq.normal_form()
    parts = []
    if ineq.param == ParamTag.FULL_CORRELATOR_ONLY:
        keys, _ = fullcorr_index(n, m)
        for s, v in zip(keys, nf.coeffs):
            if v:
                name = "<" + "".join(f"{_PARTY_LETTERS[i].upper()}{xi + 1}"
                                     for i, xi in enumerate(s)) + ">"
                parts.append((v, name))
    else:
        keys, _ = cg_index(n, m, k)
        for (parties, x, a), v in zip(keys, nf.coeffs):
            if v:
                parts.append((v, _term_name(parties, x, a, k)))
    if not parts:
        return f"0 <= {int(nf.bound)}"
    chunks = []
    for v, name in parts:
        iv = int(v)
        sign = "-" if iv < 0 else "+"
        mag = abs(iv)
        coeff = "" if mag == 1 else f"{mag} "
        chunks.append(f"{sign} {coeff}{name}")
    text = " ".join(chunks)
    if text.startswith("+ "):
        text = text[2:]
    return f"{text} <= {int(nf.bound)}"


def render_cg_table(ineq: Inequality) -> str:
    """Deterministic text rendering of an inequality: the block table
    for bipartite marginal forms, a term sum otherwise."""
    if ineq.basis is not None:
        ineq = symmetric_extension(ineq)
    if ineq.scenario.n == 2 and ineq.param == ParamTag.NO_SIGNALLING:
        return _render_block_table(ineq)
    return _render_terms(ineq)


# ---------------------------------------------------------------------------
# catalog records

@dataclass
class ClassRecord:
    index: int
    members: int
    representative: Inequality          # full-space extension
    normalized: CorrelatorForm
    key_bound: int
    key_multisets: tuple
    facet: bool
    lifting_settings: list
    lifting_outcomes: list
    genuine: bool
    cg_table: str
    facet_alt: bool | None = None       # Svetlichny: facet of the raw polytope

    def to_json(self) -> dict:
        n, m, k = self.normalized.scenario.nmk
        from .canon import corr_full_index
        keys, _, _ = corr_full_index(n, m, k)
        entries = []
        for (parties, x, a), v in zip(keys, self.normalized.coeffs):
            if v:
                entries.append([list(parties), list(x), list(a),
                                *rat_to_pair(QQ(v))])
        data = {
            "index": self.index,
            "members": self.members,
            "representative": self.representative.to_json(),
            "normalized_coeffs": entries,
            "normalized_bound": rat_to_pair(QQ(self.normalized.bound)),
            "key": {"bound": self.key_bound,
                    "multisets": [list(t) for t in self.key_multisets]},
            "facet": self.facet,
            "lifting_settings": [list(t) for t in self.lifting_settings],
            "lifting_outcomes": [list(t) for t in self.lifting_outcomes],
            "genuine": self.genuine,
            "cg_table": self.cg_table,
        }
        if self.facet_alt is not None:
            data["facet_unprojected"] = self.facet_alt
        return data


@dataclass
class Catalog:
    scenario: Scenario
    model: Model
    meta: dict
    classes: list

    def to_json(self) -> dict:
        return {
            "tool": f"bellscope {__version__}",
            "scenario": self.scenario.to_json(),
            "model": self.model.value,
            "meta": self.meta,
            "classes": [c.to_json() for c in self.classes],
        }

    def write(self, path: str) -> None:
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")
        os.replace(tmp, path)


# ---------------------------------------------------------------------------
# model-specific vertex stages

def _vertex_stage(scenario: Scenario, model: Model, cap: int):
    if model == Model.LOCAL:
        P = enumerate_local_vertices(scenario, ParamTag.NO_SIGNALLING, cap=cap)
        return P, ParamTag.NO_SIGNALLING
    if model == Model.SVETLICHNY:
        P = enumerate_svetlichny_vertices(scenario, cap=cap)
        return P, ParamTag.FULL_PROBABILITY
    if model == Model.FULL_CORRELATOR:
        full = enumerate_local_vertices(scenario, ParamTag.FULL_PROBABILITY, cap=cap)
        return project_full_correlators(full), ParamTag.FULL_CORRELATOR_ONLY
    raise ScenarioError(f"unknown model {model}")


def local_polytope_correlator_param(scenario: Scenario) -> Polytope:
    """The local polytope with vertices in correlator coordinates (exact
    +-1 products for deterministic strategies, k = 2)."""
    n, m, k = scenario.nmk
    keys, _ = cg_index(n, m, k)
    outs = []
    for flat in itertools.product(range(k), repeat=n * m):
        table = [flat[i * m:(i + 1) * m] for i in range(n)]
        coords = []
        for parties, x, a in keys:
            val = QQ(1)
            for i, xi, ai in zip(parties, x, a):
                val *= k * (1 if table[i][xi] == ai else 0) - 1
            coords.append(val)
        outs.append(tuple(coords))
    return Polytope(scenario, ParamTag.CORRELATOR, outs)


def _fullcorr_to_correlator_param(ineq: Inequality) -> Inequality:
    """Embed a full-correlator inequality into the correlator
    parametrization (support on the top-order, all-first-outcome keys)."""
    n, m, k = ineq.scenario.nmk
    keys, pos = cg_index(n, m, k)
    coeffs = [QQ(0)] * len(keys)
    fkeys, _ = fullcorr_index(n, m)
    parties = tuple(range(n))
    zeros = (0,) * n
    for x, v in zip(fkeys, ineq.coeffs):
        if v:
            coeffs[pos[(parties, x, zeros)]] = QQ(v)
    return Inequality(ineq.scenario, ParamTag.CORRELATOR, tuple(coeffs),
                      QQ(ineq.bound), provenance=ineq.provenance)


# ---------------------------------------------------------------------------
# the pipeline

def _problem_fingerprint(polytope: Polytope) -> str:
    h = hashlib.sha256()
    for v in polytope.vertices:
        h.update(repr(v).encode())
    return h.hexdigest()[:16]


def run_pipeline(scenario: Scenario, model: Model = Model.LOCAL, *,
                 budget_secs: float | None = None,
                 checkpoint_path: str | None = None,
                 ns_project: bool = True,
                 vertex_cap: int = 10 ** 7,
                 out_path: str | None = None,
                 threads: int = 1,
                 log=None) -> Catalog:
    """vertices -> symmetrize -> facets -> extend -> classify -> flags.

    ``budget_secs`` bounds the facet enumeration; on exhaustion a
    checkpoint is written (when a path is given) along with a partial
    catalog flagged incomplete, and BudgetExhausted propagates.  A
    matching checkpoint file is picked up automatically on the next run.
    ``threads`` is accepted for interface compatibility; stages run
    sequentially and output is deterministic regardless of its value.
    """
    t_start = time.monotonic()
    deadline = t_start + budget_secs if budget_secs else None
    say = log or (lambda *_: None)
    meta: dict = {"options": {"budget_secs": budget_secs,
                              "ns_project": ns_project, "threads": threads}}

    scenario = Scenario(scenario.n, scenario.m, scenario.k, model)
    P, param = _vertex_stage(scenario, model, vertex_cap)
    say(f"vertices: {len(P)} in dim {P.dim_ambient} ({param.value})")
    sub = build_symmetric_subspace(scenario, param)
    Ps = project_vertices_symmetric(P, sub, deadline=deadline)
    hull = polytope_hull(Ps)
    say(f"symmetrized: {len(Ps)} vertices, {sub.d_s} orbit classes, hull dim {hull.dim}")

    counts = {
        "vertices": len(P), "d_ambient": P.dim_ambient,
        "orbit_classes": sub.d_s, "sym_vertices": len(Ps), "d_s": hull.dim,
    }
    meta["counts"] = counts

    fingerprint = _problem_fingerprint(Ps)
    state = None
    if checkpoint_path and os.path.exists(checkpoint_path):
        with open(checkpoint_path) as fh:
            saved = json.load(fh)
        if saved.get("fingerprint") == fingerprint:
            state = DDState.from_json(saved["dd_state"])
            say(f"resuming facet enumeration at constraint {state.inserted}")

    try:
        raw_facets = facet_enumeration(Ps, deadline=deadline, state=state)
    except BudgetExhausted as exc:
        meta["incomplete"] = "facet enumeration over budget"
        if checkpoint_path and exc.checkpoint is not None:
            with open(checkpoint_path + ".tmp", "w") as fh:
                json.dump({"fingerprint": fingerprint,
                           "dd_state": exc.checkpoint}, fh)
            os.replace(checkpoint_path + ".tmp", checkpoint_path)
            say(f"checkpoint written to {checkpoint_path}")
        partial = Catalog(scenario, model, meta, [])
        if out_path:
            partial.write(out_path)
        raise
    if checkpoint_path and os.path.exists(checkpoint_path):
        os.remove(checkpoint_path)
    counts["raw_facets"] = len(raw_facets)
    say(f"raw symmetric facets: {len(raw_facets)}")

    # extensions and the inequalities entering classification
    extensions = [symmetric_extension(f) for f in raw_facets]
    if model == Model.SVETLICHNY:
        # classify the restrictions to the no-signalling subspace; facets
        # parallel to it restrict to tautologies and carry no inequality
        kept, to_classify, vacuous = [], [], 0
        for ext in extensions:
            h, h0 = functional_full_to_ns(scenario, ext.coeffs, ext.bound)
            if all(c == 0 for c in h):
                vacuous += 1
                continue
            kept.append(ext)
            to_classify.append(Inequality(scenario, ParamTag.NO_SIGNALLING,
                                          h, h0, provenance="ns_restriction"))
        extensions = kept
        counts["vacuous_ns_restrictions"] = vacuous
    else:
        to_classify = extensions

    t0 = time.monotonic()
    classes = classify(to_classify)
    say(f"{len(classes)} equivalence classes [{time.monotonic() - t0:.1f}s]")
    counts["classes"] = len(classes)

    # facet flags
    t0 = time.monotonic()
    rep_indices = [cls.members[0] for cls in classes]
    if model == Model.LOCAL:
        flags = [is_facet(extensions[i], P) for i in rep_indices]
        alt_flags = [None] * len(classes)
    elif model == Model.FULL_CORRELATOR:
        full_local = local_polytope_correlator_param(scenario)
        flags = []
        for i in rep_indices:
            emb = _fullcorr_to_correlator_param(extensions[i])
            flags.append(is_facet(emb, full_local))
        alt_flags = [None] * len(classes)
    else:
        # Svetlichny readings.  Documented: a class is facet-defining
        # when one of its members (equal on the no-signalling space,
        # different off it) is a facet of the Svetlichny polytope; the
        # representative is then chosen as such a member so stored
        # records re-verify from the representative alone.  Alternate
        # reading: the inequality cuts a facet of the polytope's
        # no-signalling slice.
        ctx = NSFaceContext(scenario)
        local_full = enumerate_local_vertices(
            Scenario(scenario.n, scenario.m, scenario.k, Model.LOCAL),
            ParamTag.FULL_PROBABILITY)
        qdim = affine_rank(local_full.vertices) - 1
        counts["ns_slice_dim"] = qdim
        svet_hull_dim = affine_rank(P.vertices) - 1
        counts["svet_hull_dim"] = svet_hull_dim
        rank_flags = []
        slice_flags = []
        for ci, cls in enumerate(classes):
            member_facet = False
            for midx in cls.members:
                W = saturating_vertices(extensions[midx], P)
                if affine_rank(W) - 1 == svet_hull_dim - 1:
                    member_facet = True
                    rep_indices[ci] = midx
                    break
            rank_flags.append(member_facet)
            W0 = saturating_vertices(extensions[rep_indices[ci]], P)
            dim_f = face_dim_in_subspace(W0, ctx, upper_target=qdim - 1)
            slice_flags.append(dim_f == qdim - 1)
        counts["facet_classes_ns_slice"] = sum(1 for f in slice_flags if f)
        counts["facet_classes_svet_polytope"] = sum(1 for f in rank_flags if f)
        if ns_project:
            flags, alt_flags = rank_flags, slice_flags
        else:
            flags, alt_flags = slice_flags, rank_flags
    say(f"facet flags [{time.monotonic() - t0:.1f}s]")

    records = []
    n_facets = 0
    for idx, (cls, rep_idx, facet_flag, alt) in enumerate(
            zip(classes, rep_indices, flags, alt_flags)):
        rep = extensions[rep_idx]
        lifting = detect_lifting(cls.form)
        table = render_cg_table(to_classify[rep_idx])
        records.append(ClassRecord(
            index=idx, members=len(cls.members), representative=rep,
            normalized=cls.form, key_bound=cls.key.bound,
            key_multisets=cls.key.multisets, facet=bool(facet_flag),
            lifting_settings=lifting.setting_liftings,
            lifting_outcomes=lifting.outcome_liftings,
            genuine=lifting.genuine, cg_table=table, facet_alt=alt))
        if facet_flag:
            n_facets += 1
    counts["facet_classes"] = n_facets
    if model == Model.SVETLICHNY:
        counts["facet_classes_unprojected"] = sum(1 for a in alt_flags if a)
    counts["genuine_classes"] = sum(1 for r in records if r.genuine)
    counts["facet_genuine_classes"] = sum(1 for r in records if r.genuine and r.facet)
    # classes using every setting of every party (input-complete)
    counts["full_input_classes"] = sum(
        1 for r in records if not r.lifting_settings)
    counts["full_input_facet_classes"] = sum(
        1 for r in records if not r.lifting_settings and r.facet)
    meta["elapsed_secs"] = round(time.monotonic() - t_start, 2)

    catalog = Catalog(scenario, model, meta, records)
    if out_path:
        catalog.write(out_path)
        say(f"catalog written to {out_path}")
    return catalog


# ---------------------------------------------------------------------------
# verification of stored catalogs

def verify_catalog(data: dict) -> None:
    """Re-verify a stored catalog: representatives valid, facet flags and
    keys reproducible.  Raises VerificationError on any mismatch."""
    scenario = Scenario.from_json(data["scenario"])
    model = Model(data["model"])
    P, param = _vertex_stage(scenario, model, cap=10 ** 7)
    if model == Model.FULL_CORRELATOR:
        full_local = local_polytope_correlator_param(scenario)
    if model == Model.SVETLICHNY:
        ns_project = data["meta"].get("options", {}).get("ns_project", True)
        if ns_project:
            svet_hull_dim = affine_rank(P.vertices) - 1
        else:
            ctx = NSFaceContext(scenario)
            local_full = enumerate_local_vertices(
                Scenario(scenario.n, scenario.m, scenario.k, Model.LOCAL),
                ParamTag.FULL_PROBABILITY)
            qdim = affine_rank(local_full.vertices) - 1
    for cdata in data["classes"]:
        rep = Inequality.from_json(cdata["representative"])
        if model == Model.SVETLICHNY:
            if not is_valid(rep, P):
                raise VerificationError(f"class {cdata['index']}: not valid")
            W = saturating_vertices(rep, P)
            if ns_project:
                facet = affine_rank(W) - 1 == svet_hull_dim - 1
            else:
                facet = face_dim_in_subspace(W, ctx, upper_target=qdim - 1) == qdim - 1
        elif model == Model.FULL_CORRELATOR:
            emb = _fullcorr_to_correlator_param(rep)
            if not is_valid(emb, full_local):
                raise VerificationError(f"class {cdata['index']}: not valid")
            facet = is_facet(emb, full_local)
        else:
            if not is_valid(rep, P):
                raise VerificationError(f"class {cdata['index']}: not valid")
            facet = is_facet(rep, P)
        if facet != cdata["facet"]:
            raise VerificationError(f"class {cdata['index']}: facet flag mismatch")
        if model == Model.SVETLICHNY:
            h, h0 = functional_full_to_ns(scenario, rep.coeffs, rep.bound)
            key_src = Inequality(scenario, ParamTag.NO_SIGNALLING, h, h0)
        else:
            key_src = rep
        key = invariants(_canonical_form(key_src))
        if key.bound != cdata["key"]["bound"] or \
                [list(t) for t in key.multisets] != cdata["key"]["multisets"]:
            raise VerificationError(f"class {cdata['index']}: key mismatch")
