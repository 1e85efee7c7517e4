"""Derivative-free maximization of concave functions on a closed interval."""

from __future__ import annotations

import math
from typing import Callable, Iterable, NamedTuple

__all__ = ["GOLDEN_TOL", "concave_max", "MaxResult"]

GOLDEN_TOL = 1e-12
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class MaxResult(NamedTuple):
    value: float
    argmax: float
    err: float
    interior: bool


def concave_max(
    g: Callable[[float], float],
    a: float,
    b: float,
    tol: float = GOLDEN_TOL,
    extra_points: Iterable[float] = (),
) -> MaxResult:
    """Maximize a concave g over [a, b].

    Endpoints and ``extra_points`` are evaluated exactly, so maxima attained
    there carry err 0.  The interior search is golden section down to bracket
    width ``tol``; when an interior probe wins, err is the function variation
    across the final bracket.  Ties go to the exactly evaluated candidates and
    then to the smaller abscissa, which keeps results deterministic.
    """
    if b < a:
        raise ValueError("empty interval")
    exact = [(g(a), a), (g(b), b)]
    for p in extra_points:
        if a <= p <= b:
            exact.append((g(p), p))

    best_exact = max(exact, key=lambda c: (c[0], -c[1]))
    if b - a <= tol:
        return MaxResult(best_exact[0], best_exact[1], 0.0, False)

    lo, hi = a, b
    w = hi - lo
    x1 = hi - _INV_PHI * w
    x2 = lo + _INV_PHI * w
    f1, f2 = g(x1), g(x2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            if not lo < x1 < hi:
                break
            f1 = g(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            if not lo < x2 < hi:
                break
            f2 = g(x2)

    xm = 0.5 * (lo + hi)
    fm = g(xm) if lo < xm < hi else -math.inf
    probes = [(f1, x1), (f2, x2), (fm, xm)]
    probes = [(v, t) for v, t in probes if a < t < b]
    if not probes:
        return MaxResult(best_exact[0], best_exact[1], 0.0, False)
    best_probe = max(probes, key=lambda c: (c[0], -c[1]))

    if best_exact[0] >= best_probe[0]:
        return MaxResult(best_exact[0], best_exact[1], 0.0, False)
    finite = [v for v, _ in probes if v > -math.inf]
    err = (max(finite) - min(finite)) if len(finite) >= 2 else 0.0
    return MaxResult(best_probe[0], best_probe[1], err, True)
