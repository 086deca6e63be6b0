"""Maximize the Bell quantity over local measurements and squeezing.

Two local-search methods are available:

``"lbfgs"`` (default)
    Quasi-Newton ascent with exact gradients.  In the full scheme each
    unitary is moved as ``U0 @ expm(iH)`` with Hermitian ``H`` and the base
    ``U0`` is re-centred after every round, which keeps the coordinates
    well conditioned everywhere on the unitary group.  A free squeezing
    parameter is optimized jointly, inside box bounds.
``"nelder-mead"``
    Derivative-free simplex search directly on the scheme parameters, with
    a nested bounded scalar search over a free squeezing parameter.

Restart 0 always starts near the CGLMP-type settings; restart ``i`` draws
its start from a generator seeded by ``sub_seed(seed, i)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import kernels
from .errors import check_dimension
from .functional import bell_from_distributions, bell_weights, coefficient_tables
from .quantum import (
    SCHEMES,
    UnitaryParams,
    cglmp_params,
    decompose_unitary,
    fourier_matrix,
    joint_probabilities,
    nopa_coefficients,
    nopa_coefficients_derivative,
    parametrize_unitary,
    unitary_matrix,
)

DEFAULT_RESTARTS = {"full": 20, "phase-fourier": 8}
METHODS = ("lbfgs", "nelder-mead")
WARM_START_JITTER = 1e-3
REEVAL_TOL = 1e-10
TIE_TOL = 1e-15


@dataclass(frozen=True)
class StateSpec:
    """Which two-mode state the settings are optimized for."""

    kind: str  # "epr" | "nopa-fixed" | "nopa-free"
    r: float | None = None
    r_min: float = 0.1
    r_max: float = 4.0

    def __post_init__(self):
        if self.kind not in ("epr", "nopa-fixed", "nopa-free"):
            raise ValueError(f"unknown state kind {self.kind!r}")
        if self.kind == "nopa-fixed" and (self.r is None or not self.r >= 0):
            raise ValueError("nopa-fixed needs r >= 0")
        if self.kind == "nopa-free" and not (0 <= self.r_min < self.r_max < math.inf):
            raise ValueError(f"invalid r range [{self.r_min}, {self.r_max}]")

    @classmethod
    def epr(cls):
        return cls("epr")

    @classmethod
    def fixed(cls, r: float):
        if math.isinf(r):
            return cls("epr")
        return cls("nopa-fixed", r=float(r))

    @classmethod
    def free(cls, r_min: float = 0.1, r_max: float = 4.0):
        return cls("nopa-free", r_min=float(r_min), r_max=float(r_max))

    @property
    def free_r(self) -> bool:
        return self.kind == "nopa-free"

    def coefficients(self, d: int, r: float | None = None) -> np.ndarray:
        if self.kind == "epr":
            return nopa_coefficients(d, math.inf)
        return nopa_coefficients(d, self.r if r is None else r)


@dataclass(frozen=True)
class OptimizationProblem:
    d: int
    state: StateSpec
    scheme: str = "full"
    restarts: int | None = None
    seed: int = 42
    tolerance: float = 1e-8
    method: str = "lbfgs"
    max_evaluations: int = 20_000
    workers: int = 1

    def __post_init__(self):
        check_dimension(self.d)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")

    @property
    def n_restarts(self) -> int:
        return DEFAULT_RESTARTS[self.scheme] if self.restarts is None else self.restarts


@dataclass
class RestartRecord:
    index: int
    seed: int
    value: float
    iterations: int
    evaluations: int
    r: float | None
    converged: bool


@dataclass
class OptimizationResult:
    d: int
    scheme: str
    method: str
    best_bell: float
    best_params: tuple[UnitaryParams, ...]
    best_r: float | None
    per_restart: list[RestartRecord]
    converged: bool
    reevaluated_bell: float = float("nan")
    unitaries: tuple[np.ndarray, ...] = field(default=(), repr=False)


def sub_seed(seed: int, index: int) -> int:
    """Seed of restart ``index``; depends only on ``(seed, index)``."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint32)[0])


# --- Hermitian coordinates -------------------------------------------------------

def _hermitian(x: np.ndarray, d: int) -> np.ndarray:
    iu = np.triu_indices(d, 1)
    k = iu[0].size
    H = np.zeros((d, d), dtype=complex)
    H[iu] = x[:k] + 1j * x[k:2 * k]
    H = H + H.conj().T
    H[np.diag_indices(d)] = x[2 * k:]
    return H


def _hermitian_grad(G: np.ndarray, d: int) -> np.ndarray:
    """Gradient w.r.t. the coordinates of ``_hermitian`` given ``df = Re tr(G^H dH)``."""
    iu = np.triu_indices(d, 1)
    Gt = G.T
    return np.concatenate([(G[iu] + Gt[iu]).real, (G[iu] - Gt[iu]).imag, np.diag(G).real])


class _ExpMap:
    """``expm(iH(x))`` together with the pullback of a matrix gradient."""

    def __init__(self, x: np.ndarray, d: int):
        w, V = np.linalg.eigh(_hermitian(x, d))
        e = np.exp(1j * w)
        self.d, self.V = d, V
        self.U = (V * e) @ V.conj().T
        dw = w[:, None] - w[None, :]
        close = np.abs(dw) < 1e-12
        de = e[:, None] - e[None, :]
        self.phi = np.where(close, 1j * e[:, None] * np.ones((1, d)),
                            de / np.where(close, 1.0, dw))

    def pullback(self, E: np.ndarray) -> np.ndarray:
        V = self.V
        C = V.conj().T @ E @ V
        return _hermitian_grad(V @ (C * self.phi.conj()) @ V.conj().T, self.d)


# --- objective ------------------------------------------------------------------

class _Objective:
    """Negated Bell value on local coordinates around base settings.

    Coordinates: four blocks (one per setting) followed by ``r`` when the
    squeezing parameter is free.  Full scheme blocks are Hermitian
    generators (``d*d`` each); phase-Fourier blocks are phase shifts in
    turns (``d`` each).
    """

    def __init__(self, d: int, scheme: str, state: StateSpec):
        self.d, self.scheme, self.state = d, scheme, state
        self.K = coefficient_tables(d)
        self.block = d * d if scheme == "full" else d
        self.F = fourier_matrix(d) if scheme == "phase-fourier" else None
        self.nfev = 0

    def lam(self, r):
        return self.state.coefficients(self.d, r)

    def settings(self, base, x):
        d, b = self.d, self.block
        if self.scheme == "full":
            maps = [_ExpMap(x[k * b:(k + 1) * b], d) for k in range(4)]
            U = np.stack([base[k] @ maps[k].U for k in range(4)])
            return U, maps
        U = np.stack([base[k] * np.exp(2j * np.pi * x[k * b:(k + 1) * b])[None, :] for k in range(4)])
        return U, None

    def __call__(self, x, base):
        self.nfev += 1
        r = x[-1] if self.state.free_r else None
        U, maps = self.settings(base, x)
        lam = self.lam(r)
        val, E, dlam = kernels.bell_value_grad(np.ascontiguousarray(U), lam, self.K)
        parts = []
        for k in range(4):
            if maps is not None:
                parts.append(maps[k].pullback(base[k].conj().T @ E[k]))
            else:
                parts.append(np.sum((E[k].conj() * (2j * np.pi * U[k])).real, axis=0))
        if self.state.free_r:
            parts.append([dlam @ nopa_coefficients_derivative(self.d, r)])
        return -val, -np.concatenate(parts)

    def value(self, U, r=None):
        return kernels.bell_value(np.ascontiguousarray(U), self.lam(r), self.K)


def _lbfgs_local(obj: _Objective, base, r0, budget, tol):
    """Rounds of L-BFGS-B with re-centring; returns (U, r, value, nit, nfev, converged)."""
    d, b = obj.d, obj.block
    base = np.array(base, dtype=complex)
    n = 4 * b + (1 if obj.state.free_r else 0)
    bounds = [(None, None)] * (4 * b)
    if obj.state.free_r:
        bounds.append((obj.state.r_min, obj.state.r_max))
    r = r0
    prev, value = -math.inf, obj.value(base, r)
    nit = nfev = 0
    converged = False
    while nfev < budget:
        x0 = np.zeros(n)
        if obj.state.free_r:
            x0[-1] = r
        res = minimize(obj, x0, args=(base,), jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": 1000, "maxfun": max(budget - nfev, 1),
                                "ftol": 1e-16, "gtol": 1e-11, "maxcor": 30})
        nit += res.nit
        nfev += res.nfev
        base, _ = obj.settings(base, res.x)
        if obj.state.free_r:
            r = float(res.x[-1])
        value = -float(res.fun)
        if value - prev < tol:
            converged = True
            break
        prev = value
    return base, r, obj.value(base, r), nit, nfev, converged


def _nelder_mead_local(d, scheme, state, params0, r0, budget, tol):
    K = coefficient_tables(d)
    n = 4 * (d * (d - 1) if scheme == "full" else d)

    def mats(x):
        return np.stack([unitary_matrix(UnitaryParams(scheme, x[k * n // 4:(k + 1) * n // 4]), d)
                         for k in range(4)])

    def solve(x0, lam, maxfev):
        f = lambda x: -kernels.bell_value(mats(x), lam, K)
        res = minimize(f, x0, method="Nelder-Mead",
                       options={"maxfev": maxfev, "fatol": tol, "xatol": 1e-10, "adaptive": True})
        return res

    if not state.free_r:
        res = solve(params0, state.coefficients(d), budget)
        return mats(res.x), None, -float(res.fun), res.nit, res.nfev, bool(res.success)

    chain = {"x": params0, "nit": 0, "nfev": 0, "ok": True}
    per_call = max(budget // 20, 200)

    def outer(r):
        res = solve(chain["x"], state.coefficients(d, r), per_call)
        chain["x"] = res.x
        chain["nit"] += res.nit
        chain["nfev"] += res.nfev
        return float(res.fun)

    out = minimize_scalar(outer, bounds=(state.r_min, state.r_max), method="bounded",
                          options={"xatol": 1e-5})
    r = float(out.x)
    res = solve(chain["x"], state.coefficients(d, r), per_call)
    return (mats(res.x), r, -float(res.fun), chain["nit"] + res.nit,
            chain["nfev"] + res.nfev, bool(out.success))


# --- starts -------------------------------------------------------------------------

def _cglmp_start_r(d: int, state: StateSpec) -> float | None:
    """Squeezing that maximizes the CGLMP-settings value (free-r warm start)."""
    if not state.free_r:
        return None
    K = coefficient_tables(d)
    U = np.stack([unitary_matrix(p, d) for p in cglmp_params(d)])
    res = minimize_scalar(lambda r: -kernels.bell_value(U, nopa_coefficients(d, r), K),
                          bounds=(state.r_min, state.r_max), method="bounded",
                          options={"xatol": 1e-6})
    return float(res.x)


def _start(problem: OptimizationProblem, index: int, rng: np.random.Generator):
    """Initial scheme parameters (4 blocks concatenated) and r."""
    d, scheme, state = problem.d, problem.scheme, problem.state
    if index == 0:
        phases = np.concatenate([p.params for p in cglmp_params(d)])
        if scheme == "phase-fourier":
            x = phases + WARM_START_JITTER * rng.standard_normal(phases.size)
        else:
            mats = [unitary_matrix(p, d) for p in cglmp_params(d)]
            x = np.concatenate([decompose_unitary(M).params for M in mats])
            x = x + WARM_START_JITTER * rng.standard_normal(x.size)
        return x, _cglmp_start_r(d, state)
    if scheme == "full":
        x = rng.uniform(0.0, 2 * np.pi, 4 * d * (d - 1))
    else:
        x = rng.uniform(0.0, 1.0, 4 * d)
    r = rng.uniform(state.r_min, state.r_max) if state.free_r else None
    return x, r


def _run_restart(problem: OptimizationProblem, index: int) -> tuple[RestartRecord, np.ndarray]:
    seed = sub_seed(problem.seed, index)
    rng = np.random.default_rng(seed)
    d, scheme = problem.d, problem.scheme
    x0, r0 = _start(problem, index, rng)
    if problem.method == "nelder-mead":
        U, r, val, nit, nfev, ok = _nelder_mead_local(d, scheme, problem.state, x0, r0,
                                                      problem.max_evaluations, problem.tolerance)
    else:
        obj = _Objective(d, scheme, problem.state)
        n = x0.size // 4
        if scheme == "full":
            base = [unitary_matrix(UnitaryParams("full", x0[k * n:(k + 1) * n]), d) for k in range(4)]
        else:
            base = [fourier_matrix(d) * np.exp(2j * np.pi * x0[k * n:(k + 1) * n])[None, :]
                    for k in range(4)]
        U, r, val, nit, nfev, ok = _lbfgs_local(obj, base, r0, problem.max_evaluations,
                                                problem.tolerance)
    return RestartRecord(index, seed, float(val), int(nit), int(nfev), r, ok), U


def _params_for(U: np.ndarray, scheme: str, d: int) -> UnitaryParams:
    if scheme == "full":
        return decompose_unitary(U)
    # U = F diag(exp(2 pi i x)) up to row phases: read phases relative to row 0
    phases = np.angle(U[0] * np.sqrt(d)) / (2 * np.pi)
    return UnitaryParams("phase-fourier", np.mod(phases, 1.0))


def reevaluate(d: int, params, coeffs: np.ndarray) -> float:
    """Bell total through the reference path: matrices, joint tables, vectors."""
    from .quantum import SchmidtDiagonalState
    state = SchmidtDiagonalState(d, coeffs)
    A1, A2, B1, B2 = (parametrize_unitary(p, d) for p in params)
    tables = [joint_probabilities(state, A, B) for A in (A1, A2) for B in (B1, B2)]
    return bell_from_distributions(*tables).total


def _finish(problem: OptimizationProblem, records, mats) -> OptimizationResult:
    d, scheme = problem.d, problem.scheme
    best = 0
    for i, rec in enumerate(records):
        if rec.value > records[best].value + TIE_TOL:
            best = i
    rec = records[best]
    params = tuple(_params_for(U, scheme, d) for U in mats[best])
    coeffs = problem.state.coefficients(d, rec.r)
    check = reevaluate(d, params, coeffs)
    if abs(check - rec.value) > REEVAL_TOL:
        raise RuntimeError(f"re-evaluated Bell value {check!r} differs from optimizer value {rec.value!r}")
    bound = 4.0 * float(bell_weights(d).sum())
    if rec.value > bound + 1e-9:
        raise RuntimeError(f"Bell value {rec.value} exceeds algebraic maximum {bound}")
    return OptimizationResult(
        d=d, scheme=scheme, method=problem.method, best_bell=rec.value, best_params=params,
        best_r=rec.r if problem.state.free_r else problem.state.r, per_restart=list(records), converged=rec.converged,
        reevaluated_bell=check, unitaries=tuple(parametrize_unitary(p, d).matrix for p in params),
    )


def maximize_bell(problem: OptimizationProblem) -> OptimizationResult:
    """Multi-restart maximization of the Bell total for ``problem``.

    The result is independent of ``problem.workers``: each restart has its
    own seed and ties go to the lowest restart index.
    """
    indices = range(problem.n_restarts)
    if problem.workers > 1:
        with ThreadPoolExecutor(problem.workers) as pool:
            out = list(pool.map(lambda i: _run_restart(problem, i), indices))
    else:
        out = [_run_restart(problem, i) for i in indices]
    return _finish(problem, [o[0] for o in out], [o[1] for o in out])


def bell_for_settings(d: int, unitaries, r: float = math.inf) -> float:
    """Bell total of four setting matrices (A1, A2, B1, B2) on the state at ``r``."""
    U = np.ascontiguousarray(np.stack([np.asarray(u, dtype=complex) for u in unitaries]))
    return kernels.bell_value(U, nopa_coefficients(d, r), coefficient_tables(d))


@dataclass
class ProfilePoint:
    r: float
    bell: float
    converged: bool


def r_profile(d: int, r_grid, scheme: str = "full", restarts: int | None = None,
              seed: int = 42, tolerance: float = 1e-8, method: str = "lbfgs",
              max_evaluations: int = 20_000) -> list[ProfilePoint]:
    """Best Bell value over settings at each squeezing value in ``r_grid``.

    The first point gets a full multi-restart search; every later point is
    started from its predecessor's optimum and from the CGLMP-type settings,
    keeping the better of the two.  ``math.inf`` denotes the EPR limit.
    """
    d = check_dimension(d)
    out: list[ProfilePoint] = []
    prev = None
    for r in r_grid:
        r = float(r)
        if r < 0:
            raise ValueError(f"squeezing parameter must be >= 0, got {r}")
        problem = OptimizationProblem(d, StateSpec.fixed(r), scheme, restarts, seed,
                                      tolerance, method, max_evaluations)
        if prev is None or method != "lbfgs":
            res = maximize_bell(problem)
            prev, value, ok = np.stack(res.unitaries), res.best_bell, res.converged
        else:
            obj = _Objective(d, scheme, problem.state)
            rng = np.random.default_rng(sub_seed(seed, len(out)))
            best = None
            for base in (_jitter(prev, scheme, rng), _cglmp_base(d, scheme, rng)):
                U, _, val, _, _, ok = _lbfgs_local(obj, base, None, max_evaluations, tolerance)
                if best is None or val > best[1] + TIE_TOL:
                    best = (U, val, ok)
            prev, value, ok = best
        out.append(ProfilePoint(r, float(value), bool(ok)))
    return out


def _jitter(U, scheme, rng):
    d = U.shape[-1]
    if scheme == "phase-fourier":
        return U * np.exp(2j * np.pi * WARM_START_JITTER * rng.standard_normal((4, 1, d)))
    return np.stack([u @ _ExpMap(WARM_START_JITTER * rng.standard_normal(d * d), d).U for u in U])


def _cglmp_base(d, scheme, rng):
    return _jitter(np.stack([unitary_matrix(p, d) for p in cglmp_params(d)]), scheme, rng)
