"""Solvers: brute-force oracles, equioscillation, minimax and maximin.

The brute oracles enumerate ordered node tuples on a uniform grid (plus exact
piece endpoints) and take grid maxima in t, which makes them an independent
low-resolution route against the exact sup engine.  The equioscillation
solver drives the difference map

    Phi(x) = (m_1 - m_0, ..., m_n - m_{n-1})

to zero: scalar bisection with breakpoint snapping for n = 1, a damped
quasi-Newton iteration with finite-difference Jacobians, feasibility repair
and optional strictification continuation for n >= 2.  Minimax and maximin
are pattern searches on the max and min of the interval maxima, warm-started
from the equioscillation result.

Determinism: identical options (including the seed) give identical reports;
ties between candidates are broken lexicographically.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from itertools import combinations_with_replacement
from typing import Callable, NamedTuple

import numpy as np

from .core import ExtendedReal, NEG_INF, NodeSystem
from .fields import finiteness_domain
from .kernels import strictify
from .sumtrans import Problem, interval_maxima

__all__ = [
    "SolveOptions",
    "SolveReport",
    "TraceRecord",
    "brute_minimax",
    "brute_maximin",
    "solve_equioscillation",
    "solve_minimax",
    "solve_maximin",
    "sample_regular",
]


@dataclass(frozen=True)
class SolveOptions:
    tol_residual: float = 1e-8
    tol_step: float = 1e-10
    max_iters: int = 200
    multistarts: int = 16
    continuation_etas: tuple[float, ...] = (0.2, 0.1, 0.05, 0.02, 0.01, 0.0)
    fd_step: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tol_residual <= 0 or self.tol_step <= 0 or self.fd_step <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1 or self.multistarts < 1:
            raise ValueError("iteration budgets must be positive")
        etas = tuple(float(e) for e in self.continuation_etas)
        if not etas or etas[-1] != 0.0 or any(a <= b for a, b in zip(etas, etas[1:])):
            raise ValueError("continuation etas must strictly decrease and end at 0")
        object.__setattr__(self, "continuation_etas", etas)


class TraceRecord(NamedTuple):
    iteration: int
    residual: float
    value: float
    x: tuple[float, ...]


@dataclass(frozen=True)
class SolveReport:
    x: NodeSystem | None
    value: ExtendedReal
    residual: float
    status: str  # converged | stalled | infeasible
    iterations: int
    trace: tuple[TraceRecord, ...] = ()
    solutions: tuple[NodeSystem, ...] = ()
    note: str = ""


# ---------------------------------------------------------------------------
# shared numeric helpers


def _ns(arr) -> NodeSystem:
    return NodeSystem(tuple(float(v) for v in arr))


def _m_vec(p: Problem, arr) -> np.ndarray | None:
    """Interval maxima as floats, or None when some maximum is -inf."""
    m = interval_maxima(p, _ns(arr))
    vals = np.array(m.floats())
    return None if np.any(np.isneginf(vals)) else vals


def _phi(p: Problem, arr) -> np.ndarray | None:
    m = _m_vec(p, arr)
    return None if m is None else np.diff(m)


def _mbar(p: Problem, arr) -> float:
    m = interval_maxima(p, _ns(arr))
    return m.max_value.as_float()


def _mlow(p: Problem, arr) -> float:
    m = interval_maxima(p, _ns(arr))
    return m.min_value.as_float()


def _nearest_finite(p: Problem, t: float) -> float:
    """The point of the field's finiteness domain closest to t."""
    best, dist = t, math.inf
    for part in finiteness_domain(p.field).parts():
        c = min(max(t, part.a), part.b)
        d = abs(c - t)
        if d < dist:
            best, dist = c, d
    return best


def _repair(p: Problem, arr) -> np.ndarray:
    """Project a raw coordinate tuple toward the regular set Y.

    Clips to [0,1], restores ordering, separates coincident nodes when the
    kernel is singular, and nudges nodes so every inter-node interval meets
    the field's finiteness domain away from the singular points.
    """
    x = np.minimum(np.maximum(np.asarray(arr, dtype=float), 0.0), 1.0)
    x = np.maximum.accumulate(x)
    n = len(x)
    if p.any_singular():
        sep = 1e-7
        lo = sep
        for i in range(n):
            x[i] = min(max(x[i], lo), 1.0 - sep)
            lo = x[i] + sep
        for i in range(n - 2, -1, -1):
            x[i] = min(x[i], x[i + 1] - sep)
        x = np.minimum(np.maximum(x, 0.0), 1.0)

    if not p.field.is_piecewise:
        return x
    from .sumtrans import regularity

    for _ in range(6):
        reg = regularity(p, _ns(np.maximum.accumulate(x)))
        if reg.in_Y:
            break
        j = reg.singular_intervals[0]
        s = (0.0, *x, 1.0)
        mid = 0.5 * (s[j] + s[j + 1])
        u = _nearest_finite(p, mid)
        if u < s[j] and j >= 1:
            x[j - 1] = max(u - 1e-6, 0.0)
        elif u > s[j + 1] and j <= n - 1:
            x[j] = min(u + 1e-6, 1.0)
        else:
            # the target sits inside but coincides with a singular node
            if j >= 1:
                x[j - 1] = max(min(x[j - 1], u - 1e-4), 0.0)
            if j <= n - 1:
                x[j] = min(max(x[j], u + 1e-4), 1.0)
        x = np.maximum.accumulate(np.minimum(np.maximum(x, 0.0), 1.0))
    return x


def sample_regular(p: Problem, rng: random.Random, attempts: int = 10) -> NodeSystem:
    """A random node system in Y: rejection first, nudging repair afterwards."""
    from .sumtrans import regularity

    for _ in range(attempts):
        cand = sorted(rng.uniform(0.0, 1.0) for _ in range(p.n))
        ns = _ns(cand)
        if regularity(p, ns).in_Y:
            return ns
    return _ns(_repair(p, sorted(rng.uniform(0.0, 1.0) for _ in range(p.n))))


# ---------------------------------------------------------------------------
# brute-force oracles


_MAX_TUPLES = 3_000_000


def _oracle_grids(p: Problem, h: float) -> tuple[np.ndarray, np.ndarray]:
    if not (0 < h <= 0.5):
        raise ValueError("grid step h must lie in (0, 0.5]")
    m = max(2, round(1.0 / h))
    xg = [np.linspace(0.0, 1.0, m + 1)]
    probes = []
    if p.field.is_piecewise:
        ends = sorted({e for piece in p.field.pieces
                       for e in (piece.interval.a, piece.interval.b)})
        xg.append(np.array(ends))
        for e in ends:
            probes.extend([e - 1e-9, e + 1e-9])
    if probes:
        # nodes hugging a piece boundary matter when the sup lives in a
        # one-sided limit there (half-open pieces)
        xg.append(np.clip(np.array(probes), 0.0, 1.0))
    xgrid = np.unique(np.concatenate(xg))
    tg = np.unique(np.clip(np.concatenate([xgrid, np.array(probes)] if probes else [xgrid]),
                           0.0, 1.0))
    return xgrid, tg


def _oracle_rows(p: Problem, xgrid: np.ndarray, tg: np.ndarray) -> list[np.ndarray]:
    rows = []
    for w, k in p.translates():
        rows.append(w * k.eval_many(tg[None, :] - xgrid[:, None]))
    return rows


def _check_budget(m: int, n: int) -> None:
    if n > 4:
        raise ValueError("brute-force oracles support n <= 4")
    tuples = math.comb(m + n - 1, n)
    if tuples > _MAX_TUPLES:
        raise ValueError(f"{tuples} candidate tuples exceed the oracle budget; "
                         "use a coarser step h")


def brute_minimax(p: Problem, h: float = 1.0 / 1024) -> tuple[NodeSystem, ExtendedReal]:
    """Grid minimizer of the overall maximum; independent of the sup engine."""
    xgrid, tg = _oracle_grids(p, h)
    _check_budget(len(xgrid), p.n)
    jvals = p.field.eval_many(tg)
    rows = _oracle_rows(p, xgrid, tg)
    best = math.inf
    best_idx: tuple[int, ...] | None = None
    for idx in combinations_with_replacement(range(len(xgrid)), p.n):
        f = jvals + rows[0][idx[0]]
        for j in range(1, p.n):
            f = f + rows[j][idx[j]]
        v = float(np.max(f))
        if v < best:
            best, best_idx = v, idx
    return _ns(xgrid[list(best_idx)]), ExtendedReal.of(best)


def brute_maximin(p: Problem, h: float = 1.0 / 1024) -> tuple[NodeSystem, ExtendedReal]:
    """Grid maximizer of the smallest interval maximum."""
    xgrid, tg = _oracle_grids(p, h)
    _check_budget(len(xgrid), p.n)
    jvals = p.field.eval_many(tg)
    rows = _oracle_rows(p, xgrid, tg)
    pos = np.searchsorted(tg, xgrid)
    last = len(tg) - 1
    best = -math.inf
    best_idx: tuple[int, ...] | None = None
    for idx in combinations_with_replacement(range(len(xgrid)), p.n):
        f = jvals + rows[0][idx[0]]
        for j in range(1, p.n):
            f = f + rows[j][idx[j]]
        cuts = [0, *[pos[i] for i in idx], last]
        low = math.inf
        for a, b in zip(cuts, cuts[1:]):
            seg = float(np.max(f[a:b + 1]))
            if seg < low:
                low = seg
            if low == -math.inf:
                break
        if low > best:
            best, best_idx = low, idx
    if best_idx is None:
        return _ns([0.5] * p.n), NEG_INF
    return _ns(xgrid[list(best_idx)]), ExtendedReal.of(best)


# ---------------------------------------------------------------------------
# equioscillation


def _with_eta(p: Problem, eta: float) -> Problem:
    if eta <= 0:
        return p
    if p.kernels is not None:
        ks = tuple(strictify(k, eta) if k.flags.monotone else k for k in p.kernels)
        return replace(p, kernels=ks)
    if not p.kernel.flags.monotone:
        return p
    return replace(p, kernel=strictify(p.kernel, eta))


def _interior_breakpoints(p: Problem) -> list[float]:
    if not p.field.is_piecewise:
        return []
    return [t for t in p.field.breakpoints() if 0.0 < t < 1.0]


_PHANTOM_JUMP = 1e-3


def _solve_eq_1d(p: Problem, o: SolveOptions) -> SolveReport:
    bps = _interior_breakpoints(p)
    scan = sorted(set(np.linspace(1.0 / 256, 1.0 - 1.0 / 256, 129).tolist()) | set(bps))
    evals = 0

    def phi1(v: float) -> float | None:
        nonlocal evals
        evals += 1
        ph = _phi(p, [v])
        return None if ph is None else float(ph[0])

    pts = [(v, phi1(v)) for v in scan]
    defined = [(v, f) for v, f in pts if f is not None]
    if not defined:
        return SolveReport(None, NEG_INF, math.inf, "infeasible", evals,
                           note="no scan point had finite interval maxima")

    best_x, best_f = min(defined, key=lambda c: (abs(c[1]), c[0]))
    trace = [TraceRecord(0, abs(best_f), _mbar(p, [best_x]), (best_x,))]

    brackets = [(a, fa, b, fb) for (a, fa), (b, fb) in zip(defined, defined[1:])
                if fa == 0.0 or (fa > 0) != (fb > 0)]
    jumps = []
    for a, fa, b, fb in brackets:
        if abs(best_f) == 0.0:
            break
        while b - a > o.tol_step:
            mid = 0.5 * (a + b)
            fm = phi1(mid)
            if fm is None:
                break
            if abs(fm) < abs(best_f) or (abs(fm) == abs(best_f) and mid < best_x):
                best_x, best_f = mid, fm
            if fm == 0.0:
                break
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b, fb = mid, fm
        if b - a <= o.tol_step and min(abs(fa), abs(fb)) > o.tol_residual:
            # the sign change is a jump across zero, not a root
            jumps.append(0.5 * (a + b))

    # snap to exact breakpoints near the incumbent
    for c in bps:
        if abs(c - best_x) <= 1e-6:
            fc = phi1(c)
            if fc is not None and abs(fc) < abs(best_f):
                best_x, best_f = c, fc

    residual = abs(best_f)
    note = ""
    converged = residual <= o.tol_residual
    if converged and residual > 0.0:
        for c in bps:
            if c != best_x and abs(c - best_x) <= 1e-6:
                fc = phi1(c)
                if fc is None or abs(fc) > max(1e4 * o.tol_residual, _PHANTOM_JUMP):
                    converged = False
                    note = (f"none-found: the residual vanishes only in the limit "
                            f"toward the field discontinuity at t={c}")
                    break
    if not converged and not note:
        if not brackets:
            note = ("none-found: the difference map never changes sign on the "
                    f"scan; min |Phi| = {residual:.3g} at x = {best_x:.9g}")
        elif jumps:
            note = ("none-found: the difference map only jumps across zero "
                    f"near x = {jumps[0]:.9g} without attaining it")

    x = _ns([best_x])
    value = ExtendedReal.of(_mbar(p, [best_x]))
    trace.append(TraceRecord(1, residual, value.as_float(), (best_x,)))
    status = "converged" if converged else "stalled"
    sols = (x,) if converged else ()
    return SolveReport(x, value, residual, status, evals, tuple(trace), sols, note)


def _fd_jacobian(p: Problem, x: np.ndarray, phi: np.ndarray, o: SolveOptions):
    n = len(x)
    jac = np.zeros((n, n))
    s = (0.0, *x, 1.0)
    for j in range(n):
        scale = max(s[j + 2] - s[j], 1e-3)
        h = o.fd_step * scale
        forward = x[j] + h <= s[j + 2]
        xp = x.copy()
        xp[j] = x[j] + h if forward else x[j] - h
        php = _phi(p, xp)
        if php is None:
            continue
        jac[:, j] = (php - phi) / (h if forward else -h)
    return jac


def _newton(p: Problem, x0: np.ndarray, o: SolveOptions):
    x = x0.copy()
    phi = _phi(p, x)
    if phi is None:
        x = _repair(p, x)
        phi = _phi(p, x)
        if phi is None:
            return x, math.inf, 0, []
    res = float(np.max(np.abs(phi)))
    lam = 1e-10
    trace = [TraceRecord(0, res, _mbar(p, x), tuple(x))]
    iters = 0
    while iters < o.max_iters and res > o.tol_residual:
        iters += 1
        jac = _fd_jacobian(p, x, phi, o)
        a = jac.T @ jac + lam * np.eye(len(x))
        try:
            d = np.linalg.solve(a, -jac.T @ phi)
        except np.linalg.LinAlgError:
            lam *= 10
            continue
        accepted = False
        for alpha in (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125):
            xc = _repair(p, x + alpha * d)
            phc = _phi(p, xc)
            if phc is None:
                continue
            rc = float(np.max(np.abs(phc)))
            if rc < res:
                step = float(np.max(np.abs(xc - x)))
                x, phi, res = xc, phc, rc
                lam = max(lam / 3.0, 1e-12)
                accepted = True
                trace.append(TraceRecord(iters, res, _mbar(p, x), tuple(x)))
                if step < o.tol_step:
                    iters = o.max_iters
                break
        if not accepted:
            lam *= 10
            if lam > 1e8:
                break
    return x, res, iters, trace


def _starts(p: Problem, o: SolveOptions) -> list[np.ndarray]:
    n = p.n
    base = np.array([(j + 1.0) / (n + 1.0) for j in range(n)])
    starts = [_repair(p, base)]
    rng = random.Random(o.seed)
    for _ in range(o.multistarts - 1):
        cand = sorted(rng.uniform(0.0, 1.0) for _ in range(n))
        starts.append(_repair(p, cand))
    return starts


def _snap_to_breakpoints(p: Problem, x: np.ndarray, res: float, o: SolveOptions):
    bps = _interior_breakpoints(p)
    if not bps:
        return x, res
    for j in range(len(x)):
        for c in bps:
            if c == x[j] or abs(c - x[j]) > 1e-6:
                continue
            xc = x.copy()
            xc[j] = c
            if np.any(np.diff(xc) < 0):
                continue
            phc = _phi(p, xc)
            if phc is not None:
                rc = float(np.max(np.abs(phc)))
                if rc < res:
                    x, res = xc, rc
    return x, res


def solve_equioscillation(p: Problem, o: SolveOptions = SolveOptions()) -> SolveReport:
    """Find node systems where all interval maxima coincide.

    Multistart; each start runs the continuation schedule (only useful for
    monotone kernels that are not already strictly concave) and then the
    damped Newton iteration on the unmodified problem.  All distinct
    converged points are reported in ``solutions``; the representative is the
    one with the smallest residual, ties broken lexicographically.
    """
    if p.n == 1:
        return _solve_eq_1d(p, o)

    shared_strict = (p.kernel.flags.strictly_concave if p.kernels is None
                     else all(k.flags.strictly_concave for k in p.kernels))
    shared_monotone = (p.kernel.flags.monotone if p.kernels is None
                       else all(k.flags.monotone for k in p.kernels))
    etas = o.continuation_etas if (shared_monotone and not shared_strict) else (0.0,)

    results = []
    total_iters = 0
    for x0 in _starts(p, o):
        x = x0
        res, trace = math.inf, []
        for eta in etas:
            pe = _with_eta(p, eta)
            x, res, iters, trace = _newton(pe, x, o)
            total_iters += iters
        x, res = _snap_to_breakpoints(p, x, res, o)
        results.append((res, tuple(x), trace))

    results.sort(key=lambda r: (r[0], r[1]))
    best_res, best_x, best_trace = results[0]
    if not math.isfinite(best_res):
        return SolveReport(None, NEG_INF, math.inf, "infeasible", total_iters,
                           note="no start produced finite interval maxima")

    sols: list[tuple[float, ...]] = []
    for res, xt, _ in results:
        if res <= o.tol_residual:
            if all(max(abs(a - b) for a, b in zip(xt, s)) > 1e-5 for s in sols):
                sols.append(xt)
    sols.sort()

    x = _ns(best_x)
    value = ExtendedReal.of(_mbar(p, best_x))
    status = "converged" if best_res <= o.tol_residual else "stalled"
    return SolveReport(x, value, best_res, status, total_iters, tuple(best_trace),
                       tuple(_ns(s) for s in sols))


# ---------------------------------------------------------------------------
# pattern searches for minimax and maximin


def _pattern(p: Problem, obj: Callable[[np.ndarray], float], x0: np.ndarray,
             o: SolveOptions, sign: float) -> tuple[np.ndarray, float, float, int]:
    """Coordinate pattern search; sign=+1 maximizes, sign=-1 minimizes."""
    x = x0.copy()
    fx = obj(x)
    step = 0.125
    iters = 0
    budget = o.max_iters * 6
    while step >= o.tol_step and iters < budget:
        iters += 1
        improved = False
        for j in range(len(x)):
            for delta in (step, -step):
                c = x.copy()
                c[j] += delta
                if not 0.0 <= c[j] <= 1.0:
                    continue
                if j > 0 and c[j] < c[j - 1]:
                    continue
                if j < len(x) - 1 and c[j] > c[j + 1]:
                    continue
                fc = obj(c)
                if sign * fc > sign * fx:
                    x, fx = c, fc
                    improved = True
        if not improved:
            step *= 0.5
    return x, fx, step, iters


def solve_minimax(p: Problem, o: SolveOptions = SolveOptions()) -> SolveReport:
    """Minimize the overall maximum over node systems.

    Runs the equioscillation solver and a direct pattern search on the
    continuous objective, returning whichever achieves the smaller value.
    """
    eq = solve_equioscillation(p, o)
    starts = []
    if eq.x is not None:
        starts.append(np.array(eq.x.nodes))
    starts.append(_repair(p, np.array([(j + 1.0) / (p.n + 1.0) for j in range(p.n)])))

    best = None
    iters = eq.iterations
    for x0 in starts:
        x, fx, step, it = _pattern(p, lambda a: _mbar(p, a), x0, o, sign=-1.0)
        iters += it
        cand = (fx, tuple(x), step)
        if best is None or (cand[0], cand[1]) < (best[0], best[1]):
            best = cand
    value, xt, step = best
    status = "converged" if step < o.tol_step else "stalled"
    note = ""
    if eq.status == "converged" and abs(eq.value.as_float() - value) <= max(
            10 * o.tol_residual, 1e-9) + 1e-12:
        note = "matches the equioscillation value"
    return SolveReport(_ns(xt), ExtendedReal.of(value), step, status, iters,
                       eq.trace, eq.solutions, note)


def solve_maximin(p: Problem, o: SolveOptions = SolveOptions()) -> SolveReport:
    """Maximize the smallest interval maximum over the regular set Y."""
    eq = solve_equioscillation(p, o)
    rng = random.Random(o.seed + 1)
    starts = []
    if eq.x is not None:
        starts.append(np.array(eq.x.nodes))
    for _ in range(3):
        starts.append(np.array(sample_regular(p, rng).nodes))

    best = None
    iters = eq.iterations
    for x0 in starts:
        x0 = _repair(p, x0)
        if not math.isfinite(_mlow(p, x0)):
            continue
        x, fx, step, it = _pattern(p, lambda a: _mlow(p, a), x0, o, sign=+1.0)
        iters += it
        cand = (fx, tuple(x), step)
        if best is None or (-cand[0], cand[1]) < (-best[0], best[1]):
            best = cand
    if best is None:
        return SolveReport(None, NEG_INF, math.inf, "infeasible", iters,
                           note="no feasible start: every sampled system leaves "
                                "some interval at -inf")
    value, xt, step = best
    status = "converged" if step < o.tol_step else "stalled"
    return SolveReport(_ns(xt), ExtendedReal.of(value), step, status, iters,
                       eq.trace, eq.solutions)
