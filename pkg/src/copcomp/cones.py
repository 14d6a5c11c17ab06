"""Membership tests for the copositive and completely positive cones.

The copositivity test is exact at desk scale: it enumerates KKT supports
of the quadratic t' X t over the standard simplex.  A barycentric grid
oracle provides an independent cross-check, and CP membership is decided
relative to a supplied finite generator set by nonnegative least squares.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, nnls

from .symcore import Tolerances, symmetrize

EXACT_COPOSITIVITY_LIMIT = 12

NOT_IN_SPAN = "NOT_IN_SPAN"


class OrderLimitError(ValueError):
    """Exact copositivity path refused; use simplex_min_oracle instead."""


@dataclass
class CopVerdict:
    member: bool
    min_value: float
    argmin: np.ndarray
    # non-membership: witness simplex vector; membership: per-support facts
    witness: np.ndarray | None = None
    supports_checked: int = 0

    def to_json(self) -> dict:
        out = {
            "member": self.member,
            "min_value": self.min_value,
            "argmin": self.argmin.tolist(),
            "supports_checked": self.supports_checked,
        }
        if self.witness is not None:
            out["witness"] = self.witness.tolist()
        return out


@dataclass
class CpCertificate:
    status: str  # "MEMBER" or NOT_IN_SPAN
    generators: list = field(default_factory=list)
    weights: np.ndarray | None = None
    residual: float = 0.0
    doubly_nonnegative: bool | None = None

    @property
    def member(self) -> bool:
        return self.status == "MEMBER"

    def reconstruct(self, p: int) -> np.ndarray:
        u = np.zeros((p, p))
        if self.weights is not None:
            for w, g in zip(self.weights, self.generators):
                u += w * np.outer(g, g)
        return u

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "generators": [np.asarray(g).tolist() for g in self.generators],
            "weights": None if self.weights is None else self.weights.tolist(),
            "residual": self.residual,
            "doubly_nonnegative": self.doubly_nonnegative,
        }


def _face_minima(x: np.ndarray, support: tuple[int, ...], tol: Tolerances):
    """Stationary candidates of t'Xt on the face with the given support.

    Solves the KKT system 2 X_I t = lam * 1, sum(t) = 1 on the face and
    keeps nonnegative solutions.  Singular faces are handled by least
    squares; sub-face minima are covered by smaller supports.
    """
    idx = np.asarray(support)
    xi = x[np.ix_(idx, idx)]
    k = len(idx)
    if k == 1:
        t = np.zeros(x.shape[0])
        t[idx[0]] = 1.0
        return [(float(xi[0, 0]), t)]
    a = np.zeros((k + 1, k + 1))
    a[:k, :k] = 2.0 * xi
    a[:k, k] = -1.0
    a[k, :k] = 1.0
    b = np.zeros(k + 1)
    b[k] = 1.0
    sol, _, _, _ = np.linalg.lstsq(a, b, rcond=None)
    if np.linalg.norm(a @ sol - b, ord=np.inf) > 1e-8:
        return []
    ti = sol[:k]
    if np.min(ti) < -tol.zero_tol:
        # The critical value is constant on the KKT solution set; when the
        # system is rank deficient, search that set for a feasible point.
        ns = null_space(a)
        if ns.shape[1] == 0:
            return []
        # max gamma s.t. ti + N z >= gamma on the face coordinates
        nz = ns[:k, :]
        res = linprog(
            c=np.concatenate([np.zeros(ns.shape[1]), [-1.0]]),
            A_ub=np.hstack([-nz, np.ones((k, 1))]),
            b_ub=ti,
            bounds=[(None, None)] * ns.shape[1] + [(None, 1.0)],
            method="highs",
        )
        if not res.success or -res.fun < -tol.zero_tol:
            return []
        ti = ti + nz @ res.x[:-1]
    ti = np.clip(ti, 0.0, None)
    s = ti.sum()
    if s <= 0.0:
        return []
    ti /= s
    t = np.zeros(x.shape[0])
    t[idx] = ti
    return [(float(t @ x @ t), t)]


def is_copositive(x: np.ndarray, tol: Tolerances = Tolerances()) -> CopVerdict:
    """Exact combinatorial copositivity decision for small orders.

    Minimizes t'Xt over the simplex by enumerating KKT supports; member
    iff the minimum is >= -zero_tol.  A negative diagonal entry short
    circuits with a coordinate-vector witness.
    """
    x = symmetrize(x)
    p = x.shape[0]
    if p > EXACT_COPOSITIVITY_LIMIT:
        raise OrderLimitError(
            f"exact copositivity limited to p <= {EXACT_COPOSITIVITY_LIMIT} "
            f"(got {p}); use simplex_min_oracle for an upper bound"
        )
    diag = np.diag(x)
    k = int(np.argmin(diag))
    if diag[k] < -tol.zero_tol:
        t = np.zeros(p)
        t[k] = 1.0
        return CopVerdict(member=False, min_value=float(diag[k]), argmin=t,
                          witness=t, supports_checked=0)

    best_val = np.inf
    best_t = None
    checked = 0
    for size in range(1, p + 1):
        for support in itertools.combinations(range(p), size):
            checked += 1
            for val, t in _face_minima(x, support, tol):
                if val < best_val:
                    best_val, best_t = val, t
    member = best_val >= -tol.zero_tol
    witness = None if member else best_t
    return CopVerdict(member=member, min_value=float(best_val), argmin=best_t,
                      witness=witness, supports_checked=checked)


def _simplex_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the standard simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, len(v) + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.clip(v - theta, 0.0, None)


def simplex_min_oracle(x: np.ndarray, grid_depth: int) -> tuple[float, np.ndarray]:
    """Upper bound on min t'Xt over the simplex.

    Barycentric grid of mesh 1/grid_depth followed by projected-gradient
    refinement from the best grid point.
    """
    if grid_depth < 1:
        raise ValueError("grid_depth must be >= 1")
    x = symmetrize(x)
    p = x.shape[0]
    best_val = np.inf
    best_t = None
    batch = []
    for comp in itertools.combinations(range(grid_depth + p - 1), p - 1):
        prev = -1
        t = np.empty(p)
        bounds = comp + (grid_depth + p - 1,)
        for i, c in enumerate(bounds):
            t[i] = c - prev - 1
            prev = c
        batch.append(t / grid_depth)
        if len(batch) == 4096:
            tb = np.asarray(batch)
            vals = np.einsum("ij,jk,ik->i", tb, x, tb)
            i = int(np.argmin(vals))
            if vals[i] < best_val:
                best_val, best_t = float(vals[i]), tb[i]
            batch = []
    if batch:
        tb = np.asarray(batch)
        vals = np.einsum("ij,jk,ik->i", tb, x, tb)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_t = float(vals[i]), tb[i]

    # local refinement: projected gradient with exact line search (the
    # objective is quadratic along any segment, so the best step is
    # closed-form; this stays fast in flat valleys where a fixed
    # 1/Lipschitz step crawls)
    t = best_t.copy()
    lip = max(1.0, 2.0 * float(np.linalg.norm(x, 2)))
    for _ in range(500):
        d = _simplex_project(t - (2.0 * x @ t) / lip) - t
        if np.linalg.norm(d, ord=np.inf) < 1e-14:
            break
        # sum(d) == 0, so feasibility along d is limited only by t >= 0
        neg = d < -1e-15
        alpha_max = float(np.min(-t[neg] / d[neg])) if np.any(neg) else 1.0
        c2 = float(d @ x @ d)
        c1 = 2.0 * float(t @ x @ d)
        if c2 > 0.0:
            alpha = min(alpha_max, max(0.0, -c1 / (2.0 * c2)))
        else:
            alpha = alpha_max if c1 + c2 * alpha_max < 0.0 else 0.0
        if alpha == 0.0:
            break
        t = np.clip(t + alpha * d, 0.0, None)
        t /= t.sum()
    val = float(t @ x @ t)
    if val < best_val:
        best_val, best_t = val, t
    return best_val, best_t


def doubly_nonnegative(u: np.ndarray, tol: Tolerances) -> bool:
    """Necessary CP test: entrywise nonnegative and PSD (exact CP for p <= 4)."""
    u = symmetrize(u)
    if u.size and np.min(u) < -tol.zero_tol:
        return False
    lam = np.linalg.eigvalsh(u) if u.size else np.array([0.0])
    return bool(lam[0] >= -tol.psd_tol)


def cp_membership(u: np.ndarray, generators, tol: Tolerances = Tolerances()) -> CpCertificate:
    """CP membership relative to a finite nonnegative generator set.

    Solves min ||sum_i a_i g_i g_i' - U||_F over a >= 0 (Lawson-Hanson
    active set via scipy); certificate when the residual is <= zero_tol.
    The doubly-nonnegative necessary test is reported alongside.
    """
    u = symmetrize(u)
    p = u.shape[0]
    gens = [np.asarray(g, dtype=float) for g in generators]
    if not gens:
        raise ValueError("generator set must be nonempty")
    for g in gens:
        if g.shape != (p,):
            raise ValueError(f"generator dimension {g.shape} does not match p={p}")
        if np.min(g) < -tol.zero_tol:
            raise ValueError("generators must be entrywise nonnegative")
    dnn = doubly_nonnegative(u, tol)
    a = np.column_stack([np.outer(g, g).ravel() for g in gens])
    w, _ = nnls(a, u.ravel())
    resid = float(np.linalg.norm(a @ w - u.ravel()))
    if resid <= tol.zero_tol:
        return CpCertificate("MEMBER", gens, w, resid, dnn)
    return CpCertificate(NOT_IN_SPAN, gens, None, resid, dnn)
