"""Quantum correlations of small qubit states under planar measurements.

This is the only floating-point module in the package: quantum values
like 1/sqrt(2) are irrational, so the physics runs in double precision
while the polytope geometry stays rational.  States are W_n, GHZ(theta)
or a custom density matrix; every party measures observables
cos(phi) sigma_x + sin(phi) sigma_y selected by its setting, optionally
mixed with white noise (visibility v).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, ScenarioError
from .polytope import Inequality
from .rational import rationalize
from .scenario import (CorrelationVector, ParamTag, Scenario, cg_index,
                       full_index, fullcorr_index)

__all__ = [
    "QuantumSetup", "QuantumPoint", "w_state", "ghz_state",
    "correlations", "evaluate", "visibility_threshold",
    "optimize_symmetric_angles", "distribution_residuals",
]

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_ID = np.eye(2, dtype=complex)


def w_state(n: int) -> np.ndarray:
    """Density matrix of the n-qubit W state."""
    dim = 2 ** n
    psi = np.zeros(dim, dtype=complex)
    for i in range(n):
        psi[1 << (n - 1 - i)] = 1 / math.sqrt(n)
    return np.outer(psi, psi.conj())


def ghz_state(n: int, theta: float = math.pi / 4) -> np.ndarray:
    """cos(theta)|0...0> + sin(theta)|1...1>."""
    dim = 2 ** n
    psi = np.zeros(dim, dtype=complex)
    psi[0] = math.cos(theta)
    psi[dim - 1] = math.sin(theta)
    return np.outer(psi, psi.conj())


def _check_state(rho: np.ndarray, n: int, tol: float = 1e-10):
    dim = 2 ** n
    if rho.shape != (dim, dim):
        raise ScenarioError(f"density matrix must be {dim}x{dim}")
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise ScenarioError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise ScenarioError("density matrix trace is not one")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ScenarioError("density matrix is not positive semidefinite")


@dataclass
class QuantumSetup:
    """n qubits, a state, planar measurement angles, and a visibility.

    ``angles[i][x]`` is the x-y-plane angle of party i's setting x; the
    measured observable is cos(phi) sigma_x + sin(phi) sigma_y, with
    the +1 eigenspace mapped to outcome 0.
    """
    scenario: Scenario
    state: np.ndarray
    angles: list
    visibility: float = 1.0

    def __post_init__(self):
        n, m, k = self.scenario.nmk
        if k != 2:
            raise ScenarioError("planar qubit measurements produce two outcomes")
        _check_state(np.asarray(self.state, dtype=complex), n)
        if len(self.angles) != n or any(len(row) != m for row in self.angles):
            raise ScenarioError("angles must be an n x m table")
        if not 0.0 <= self.visibility <= 1.0:
            raise ScenarioError("visibility must lie in [0, 1]")

    def mixed_state(self) -> np.ndarray:
        n = self.scenario.n
        dim = 2 ** n
        rho = np.asarray(self.state, dtype=complex)
        return self.visibility * rho + (1 - self.visibility) * np.eye(dim) / dim


@dataclass
class QuantumPoint:
    """Floating-point correlation vector produced by quantum evaluation."""
    scenario: Scenario
    param: ParamTag
    coords: np.ndarray

    def rationalize(self, max_denominator: int = 10 ** 12) -> CorrelationVector:
        """Continued-fraction approximation for feeding the exact pipeline
        (diagnostic bridge; the geometry itself never sees floats)."""
        return CorrelationVector(
            self.scenario, self.param,
            tuple(rationalize(float(c), max_denominator) for c in self.coords))


def _projector(phi: float, outcome: int) -> np.ndarray:
    obs = math.cos(phi) * _SX + math.sin(phi) * _SY
    sign = 1 if outcome == 0 else -1
    return (_ID + sign * obs) / 2


def correlations(setup: QuantumSetup) -> QuantumPoint:
    """Full joint distribution p(r|s) = Tr[rho_v  prod_i P^{r_i}_{phi_i,s_i}]."""
    n, m, k = setup.scenario.nmk
    rho = setup.mixed_state()
    keys, _ = full_index(n, m, k)
    # cache single-party projectors
    proj = [[[_projector(setup.angles[i][x], r) for r in range(2)]
             for x in range(m)] for i in range(n)]
    out = np.empty(len(keys))
    for idx, (s, r) in enumerate(keys):
        op = proj[0][s[0]][r[0]]
        for i in range(1, n):
            op = np.kron(op, proj[i][s[i]][r[i]])
        out[idx] = np.trace(rho @ op).real
    return QuantumPoint(setup.scenario, ParamTag.FULL_PROBABILITY, out)


def distribution_residuals(p: QuantumPoint) -> dict:
    """Max float residuals of normalization / no-signalling / negativity."""
    n, m, k = p.scenario.nmk
    _, pos = full_index(n, m, k)
    coords = p.coords
    norm_res = 0.0
    for s in itertools.product(range(m), repeat=n):
        total = sum(coords[pos[(s, r)]]
                    for r in itertools.product(range(k), repeat=n))
        norm_res = max(norm_res, abs(total - 1))
    ns_res = 0.0
    for i in range(n):
        rest = [q for q in range(n) if q != i]
        for x_rest in itertools.product(range(m), repeat=n - 1):
            for a_rest in itertools.product(range(k), repeat=n - 1):
                vals = []
                for xi in range(m):
                    s = [0] * n
                    s[i] = xi
                    for q, xq in zip(rest, x_rest):
                        s[q] = xq
                    total = 0.0
                    for ri in range(k):
                        r = [0] * n
                        r[i] = ri
                        for q, aq in zip(rest, a_rest):
                            r[q] = aq
                        total += coords[pos[(tuple(s), tuple(r))]]
                    vals.append(total)
                ns_res = max(ns_res, max(vals) - min(vals))
    neg = max(0.0, -coords.min())
    return {"normalization": norm_res, "no_signalling": ns_res, "negativity": neg}


def point_in_param(p: QuantumPoint, tag: ParamTag) -> np.ndarray:
    """Float coordinates of a quantum point in another parametrization."""
    n, m, k = p.scenario.nmk
    if tag == p.param:
        return p.coords
    if p.param != ParamTag.FULL_PROBABILITY:
        raise PreconditionError("quantum points start in full-probability form")
    _, fpos = full_index(n, m, k)
    if tag == ParamTag.NO_SIGNALLING or tag == ParamTag.CORRELATOR:
        keys, _ = cg_index(n, m, k)
        out = np.empty(len(keys))
        for idx, (parties, x, a) in enumerate(keys):
            rest = [q for q in range(n) if q not in parties]
            s = [0] * n
            for q, xi in zip(parties, x):
                s[q] = xi
            total = 0.0
            for r_rest in itertools.product(range(k), repeat=len(rest)):
                r = [0] * n
                for q, ai in zip(parties, a):
                    r[q] = ai
                for q, ri in zip(rest, r_rest):
                    r[q] = ri
                total += p.coords[fpos[(tuple(s), tuple(r))]]
            out[idx] = total
        if tag == ParamTag.NO_SIGNALLING:
            return out
        # correlators from marginals by inclusion-exclusion
        keys_c, posn = cg_index(n, m, k)
        corr = np.empty(len(keys_c))
        for idx, (parties, x, a) in enumerate(keys_c):
            size = len(parties)
            total = (-1.0) ** size
            for jsize in range(1, size + 1):
                for sel in itertools.combinations(range(size), jsize):
                    key = (tuple(parties[t] for t in sel),
                           tuple(x[t] for t in sel),
                           tuple(a[t] for t in sel))
                    total += ((-1.0) ** (size - jsize)) * (k ** jsize) * out[posn[key]]
            corr[idx] = total
        return corr
    if tag == ParamTag.FULL_CORRELATOR_ONLY:
        keys, _ = fullcorr_index(n, m)
        out = np.empty(len(keys))
        for idx, s in enumerate(keys):
            total = 0.0
            for r in itertools.product(range(2), repeat=n):
                val = p.coords[fpos[(s, r)]]
                total += val if sum(r) % 2 == 0 else -val
            out[idx] = total
        return out
    raise PreconditionError(f"unsupported target parametrization {tag}")


def evaluate(ineq: Inequality, p) -> float:
    """h.p - h0 as a float; positive values are violations."""
    if isinstance(p, CorrelationVector):
        if p.scenario.nmk != ineq.scenario.nmk:
            raise ScenarioError("inequality and point scenarios differ")
        from .scenario import convert
        pc = convert(p, ineq.param)
        return float(ineq.evaluate(pc.coords))
    if p.scenario.nmk != ineq.scenario.nmk:
        raise ScenarioError("inequality and point scenarios differ")
    coords = point_in_param(p, ineq.param)
    h = np.array([float(c) for c in ineq.coeffs])
    return float(h @ coords - float(ineq.bound))


def visibility_threshold(ineq: Inequality, setup: QuantumSetup,
                         tol: float = 1e-9) -> float | None:
    """Smallest visibility at which the setup violates the inequality,
    located by bisection (no linearity in v is assumed).  None when even
    v = 1 does not violate."""
    def value_at(v: float) -> float:
        s = QuantumSetup(setup.scenario, setup.state, setup.angles, v)
        return evaluate(ineq, correlations(s))
    if value_at(1.0) <= 0:
        return None
    lo, hi = 0.0, 1.0
    if value_at(0.0) > 0:
        return 0.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if value_at(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def _fullcorr_objective(state: np.ndarray, scenario: Scenario):
    """Vectorized n-party planar correlators: for the anti-diagonal
    entries rho[~b, b], <prod sigma_phi> = sum_b rho[~b,b] e^{i sum_j
    (1-2 b_j) phi_j}; returns (entries, sign patterns, setting keys)."""
    n, m, _ = scenario.nmk
    dim = 2 ** n
    rho = np.asarray(state, dtype=complex)
    entries = []
    signs = []
    for b in range(dim):
        flip = (dim - 1) ^ b
        val = rho[flip, b]
        if abs(val) > 0:
            entries.append(val)
            signs.append([1 - 2 * ((b >> (n - 1 - j)) & 1) for j in range(n)])
    keys, _ = fullcorr_index(n, m)
    return np.array(entries), np.array(signs, dtype=float), keys


def optimize_symmetric_angles(ineq: Inequality, state: np.ndarray,
                              grid_points: int = 721,
                              refine_rounds: int = 60) -> tuple[list, float]:
    """Maximize a full-correlator inequality value over party-symmetric
    planar angles (one angle per setting, shared by all parties):
    coarse grid over [-pi, pi]^m, then coordinate-wise golden-section
    refinement.  Returns (angles per setting, maximal value h.p)."""
    if ineq.param != ParamTag.FULL_CORRELATOR_ONLY:
        raise PreconditionError("symmetric angle search expects a "
                                "full-correlator inequality")
    n, m, _ = ineq.scenario.nmk
    entries, signs, keys = _fullcorr_objective(state, ineq.scenario)
    coeffs = np.array([float(c) for c in ineq.coeffs])

    def value(phis: np.ndarray) -> float:
        total = 0.0
        for coeff, s in zip(coeffs, keys):
            if coeff == 0:
                continue
            ang = signs @ np.array([phis[x] for x in s])
            total += coeff * float(np.real(np.sum(entries * np.exp(1j * ang))))
        return total

    grid = np.linspace(-math.pi, math.pi, grid_points)
    if m == 2:
        # full 2-d grid, vectorized over the (alpha, beta) plane
        A, B = np.meshgrid(grid, grid, indexing="ij")
        total = np.zeros_like(A)
        for coeff, s in zip(coeffs, keys):
            if coeff == 0:
                continue
            phase = np.zeros_like(A, dtype=complex)
            for val, srow in zip(entries, signs):
                ang = np.zeros_like(A)
                for j, xj in enumerate(s):
                    ang = ang + srow[j] * (A if xj == 0 else B)
                phase += val * np.exp(1j * ang)
            total += coeff * np.real(phase)
        best_idx = np.unravel_index(np.argmax(total), total.shape)
        best = np.array([grid[best_idx[0]], grid[best_idx[1]]])
    else:
        best = None
        best_val = -math.inf
        for combo in itertools.product(grid[::max(1, grid_points // 60)], repeat=m):
            v = value(np.array(combo))
            if v > best_val:
                best_val = v
                best = np.array(combo)

    # golden-section refinement, one coordinate at a time
    gr = (math.sqrt(5) - 1) / 2
    step = 2 * math.pi / (grid_points - 1)
    for _ in range(refine_rounds):
        for x in range(m):
            lo = best[x] - step
            hi = best[x] + step
            c = hi - gr * (hi - lo)
            d = lo + gr * (hi - lo)
            for _ in range(40):
                pc, pd = best.copy(), best.copy()
                pc[x], pd[x] = c, d
                if value(pc) > value(pd):
                    hi = d
                else:
                    lo = c
                c = hi - gr * (hi - lo)
                d = lo + gr * (hi - lo)
            best[x] = (lo + hi) / 2
        step *= 0.5
    return list(best), value(best)
