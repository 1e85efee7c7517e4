"""Kernel functions on [-1, 1].

A kernel is real-valued and concave on (-1, 0) and on (0, 1), extended
continuously to the closed interval; the value at 0 may be -inf ("singular").
Kernels declare structural flags which downstream code relies on:

``singular``          K(0) = -inf
``monotone``          non-increasing on [-1, 0), non-decreasing on (0, 1]
``strictly_monotone`` strict version of the above
``strictly_concave``  strictly concave on each side
``cusp``              one-sided divided differences at 0 blow up

Declared flags are cheap to trust and expensive to prove, so
``kernel_validate`` is a numeric falsifier: it hunts for counterexamples on a
grid and reports any it finds, but a clean report is evidence, not proof.

Two transforms are provided.  ``strictify`` adds ``eta * sqrt(|t|)``, which
makes a monotone kernel strictly concave and strictly monotone while keeping
it above the original and converging back to it as eta drops to 0.
``singularize`` adds ``min(log(|t| / eta), 0)``, which forces a -inf value at
0 while leaving the kernel untouched wherever ``|t| >= eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .core import ExtendedReal
from .formulas import Formula, formula_from_json, formula_to_json

__all__ = [
    "KernelFlags",
    "Kernel",
    "zero_kernel",
    "log_kernel",
    "sqrt_kernel",
    "power_kernel",
    "custom_kernel",
    "kernel_eval",
    "kernel_validate",
    "strictify",
    "singularize",
    "ValidationReport",
    "kernel_to_json",
    "kernel_from_json",
]


@dataclass(frozen=True)
class KernelFlags:
    singular: bool
    monotone: bool
    strictly_monotone: bool
    strictly_concave: bool
    cusp: bool


_FAMILIES = ("zero", "log", "sqrt", "power", "custom")


@dataclass(frozen=True)
class Kernel:
    """A kernel with declared flags and optional transform layers.

    ``scale`` multiplies the whole function (used to fold a positive weight
    into the kernel); ``strictify_eta`` and ``singularize_etas`` record the
    transform layers so evaluation stays exact and serializable.
    """

    family: str
    flags: KernelFlags
    params: tuple[float, ...] = ()
    scale: float = 1.0
    strictify_eta: float = 0.0
    singularize_etas: tuple[float, ...] = ()
    neg_formula: Formula | None = None
    pos_formula: Formula | None = None

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.scale <= 0:
            raise ValueError("kernel scale must be positive")
        if self.strictify_eta < 0 or any(e <= 0 for e in self.singularize_etas):
            raise ValueError("transform parameters must be positive")
        if self.family == "custom" and (self.neg_formula is None or self.pos_formula is None):
            raise ValueError("custom kernels need one formula per side")

    def eval(self, t: float) -> float:
        """Raw float value at t in [-1, 1]; -inf allowed, never NaN or +inf."""
        if not -1.0 <= t <= 1.0:
            raise ValueError(f"kernel argument {t} outside [-1, 1]")
        return _evaluator(self)(t)

    def eval_many(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; same domain rules as ``eval``."""
        ts = np.asarray(ts, dtype=float)
        if ts.size and (ts.min() < -1.0 or ts.max() > 1.0):
            raise ValueError("kernel argument outside [-1, 1]")
        a = np.abs(ts)
        with np.errstate(divide="ignore"):
            if self.family == "zero":
                v = np.zeros_like(ts)
            elif self.family == "log":
                v = np.log(a)
            elif self.family == "sqrt":
                v = np.sqrt(a)
            elif self.family == "power":
                s = self.params[0]
                safe = np.where(a == 0.0, 1.0, a)
                v = np.where(a == 0.0, -np.inf, -(safe ** (-s)))
            else:
                v = np.where(ts < 0, self.neg_formula.values(ts), self.pos_formula.values(ts))
            if self.strictify_eta:
                v = v + self.strictify_eta * np.sqrt(a)
            for eta in self.singularize_etas:
                v = v + np.minimum(np.log(a / eta), 0.0)
        return self.scale * v

    def scaled(self, factor: float) -> "Kernel":
        if factor <= 0:
            raise ValueError("kernel weights must be positive")
        return replace(self, scale=self.scale * factor)


def _base_evaluator(k: Kernel) -> Callable[[float], float]:
    if k.family == "zero":
        return lambda t: 0.0
    if k.family == "log":
        return lambda t: math.log(abs(t)) if t != 0.0 else -math.inf
    if k.family == "sqrt":
        return lambda t: math.sqrt(abs(t))
    if k.family == "power":
        s = k.params[0]
        return lambda t: -(abs(t) ** (-s)) if t != 0.0 else -math.inf
    neg, pos = k.neg_formula, k.pos_formula
    return lambda t: neg.value(t) if t < 0.0 else pos.value(t)


@lru_cache(maxsize=None)
def _evaluator(k: Kernel) -> Callable[[float], float]:
    base = _base_evaluator(k)
    eta = k.strictify_eta
    sing = k.singularize_etas
    scale = k.scale
    if not eta and not sing and scale == 1.0:
        return base

    def f(t: float) -> float:
        v = base(t)
        if eta:
            v += eta * math.sqrt(abs(t))
        for e in sing:
            a = abs(t)
            if a == 0.0:
                v = -math.inf
            elif a < e:
                v += math.log(a / e)
        return scale * v

    return f


def zero_kernel() -> Kernel:
    return Kernel(
        "zero",
        KernelFlags(singular=False, monotone=True, strictly_monotone=False,
                    strictly_concave=False, cusp=False),
    )


def log_kernel() -> Kernel:
    return Kernel(
        "log",
        KernelFlags(singular=True, monotone=True, strictly_monotone=True,
                    strictly_concave=True, cusp=True),
    )


def sqrt_kernel() -> Kernel:
    """K(t) = sqrt(|t|): bounded, monotone, strictly concave per side."""
    return Kernel(
        "sqrt",
        KernelFlags(singular=False, monotone=True, strictly_monotone=True,
                    strictly_concave=True, cusp=True),
    )


def power_kernel(s: float) -> Kernel:
    """K(t) = -|t| ** (-s) for s > 0."""
    if s <= 0:
        raise ValueError("power kernels need s > 0")
    return Kernel(
        "power",
        KernelFlags(singular=True, monotone=True, strictly_monotone=True,
                    strictly_concave=True, cusp=True),
        params=(float(s),),
    )


def custom_kernel(neg: Formula, pos: Formula, flags: KernelFlags) -> Kernel:
    """A kernel from one concave formula per side of 0.

    The two sides must agree at 0 (extended continuity); concavity per side
    comes from the formula classes themselves.  Declared flags are the
    caller's claim and can be fed to ``kernel_validate``.
    """
    k = Kernel("custom", flags, neg_formula=neg, pos_formula=pos)
    v0_neg, v0_pos = neg.value(0.0), pos.value(0.0)
    if abs(v0_neg - v0_pos) > 1e-9:
        raise ValueError("custom kernel sides disagree at 0")
    return k


def kernel_eval(k: Kernel, t: float) -> ExtendedReal:
    """Evaluate with the extended-real wrapper; errors outside [-1, 1]."""
    return ExtendedReal.of(k.eval(t))


def strictify(k: Kernel, eta: float) -> Kernel:
    """K + eta * sqrt(|t|): strictly concave, strictly monotone, >= K."""
    if eta <= 0:
        raise ValueError("strictify needs eta > 0")
    if not k.flags.monotone:
        raise ValueError("strictify requires a monotone kernel")
    flags = KernelFlags(singular=k.flags.singular, monotone=True,
                        strictly_monotone=True, strictly_concave=True, cusp=True)
    return replace(k, strictify_eta=k.strictify_eta + eta, flags=flags)


def singularize(k: Kernel, eta: float) -> Kernel:
    """K + min(log(|t| / eta), 0): singular at 0, equal to K for |t| >= eta."""
    if eta <= 0:
        raise ValueError("singularize needs eta > 0")
    flags = KernelFlags(singular=True, monotone=k.flags.monotone,
                        strictly_monotone=k.flags.strictly_monotone,
                        strictly_concave=k.flags.strictly_concave, cusp=True)
    return replace(k, singularize_etas=k.singularize_etas + (float(eta),), flags=flags)


@dataclass
class Violation:
    flag: str
    witness: tuple[float, ...]
    detail: str


@dataclass
class ValidationReport:
    kernel: Kernel
    grid_size: int
    confirmed: dict[str, bool] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)
    sup_estimate: float = -math.inf
    cusp_rate: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations


_CUSP_THRESHOLD = 1e3


def kernel_validate(k: Kernel, grid_size: int = 10_000) -> ValidationReport:
    """Hunt for numeric counterexamples to the kernel contract and flags.

    Checks midpoint concavity per side, the two-sided limit at 0, upper
    boundedness, and each declared flag.  Finding nothing does not prove the
    flags, it only fails to refute them.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    rep = ValidationReport(kernel=k, grid_size=grid_size)
    fl = k.flags

    def bad(flag, witness, detail):
        rep.violations.append(Violation(flag, witness, detail))

    sides = []
    for sign in (-1.0, 1.0):
        ts = sign * np.linspace(1e-9, 1.0, grid_size)
        ts.sort()
        vs = k.eval_many(ts)
        sides.append((sign, ts, vs))
        finite = vs[np.isfinite(vs)]
        if finite.size:
            rep.sup_estimate = max(rep.sup_estimate, float(finite.max()))
        if not np.all(vs < math.inf):
            bad("upper-bounded", (float(ts[np.argmax(vs)]),), "+inf value on grid")

        # midpoint concavity: K((u+v)/2) >= (K(u)+K(v))/2 - 1e-12
        u, v = ts[:-2], ts[2:]
        mid = 0.5 * (u + v)
        vm = k.eval_many(mid)
        lhs, rhs = vm, 0.5 * (vs[:-2] + vs[2:])
        mask = np.isfinite(lhs) & np.isfinite(rhs)
        viol = mask & (lhs < rhs - 1e-12)
        if viol.any():
            i = int(np.argmax(viol))
            bad("concavity", (float(u[i]), float(v[i])),
                f"midpoint dips {float(rhs[i] - lhs[i]):.3e} below the chord")

        diffs = np.diff(vs)
        finite_d = np.isfinite(vs[:-1]) & np.isfinite(vs[1:])
        inc_ok = np.all(diffs[finite_d] >= -1e-12) if sign > 0 else np.all(diffs[finite_d] <= 1e-12)
        if fl.monotone and not inc_ok:
            j = int(np.argmax((diffs < -1e-12) if sign > 0 else (diffs > 1e-12)))
            bad("monotone", (float(ts[j]), float(ts[j + 1])), "wrong-way difference")
        if fl.strictly_monotone:
            strict = np.all(diffs[finite_d] > 0) if sign > 0 else np.all(diffs[finite_d] < 0)
            if not strict:
                bad("strictly_monotone", (float(ts[0]),), "a flat or wrong-way step")
        if fl.strictly_concave:
            flat = mask & (lhs <= rhs)
            if flat.any():
                i = int(np.argmax(flat))
                bad("strictly_concave", (float(u[i]), float(v[i])), "no strict midpoint gain")

    # limits at 0 from both sides agree (possibly both -inf)
    eps = 1e-9
    l0, r0 = k.eval(-eps), k.eval(eps)
    both_sink = l0 < -1e8 and r0 < -1e8
    if not both_sink and abs(l0 - r0) > 1e-6:
        bad("zero-limit", (0.0,), f"left {l0} vs right {r0} near 0")

    v0 = k.eval(0.0)
    if fl.singular and v0 != -math.inf:
        bad("singular", (0.0,), f"declared singular but K(0) = {v0}")
    if not fl.singular and v0 == -math.inf:
        bad("singular", (0.0,), "declared non-singular but K(0) = -inf")

    # cusp: divided differences (K(2h) - K(h)) / h on a shrinking schedule
    rates = []
    for side in (-1.0, 1.0):
        h = 0.01
        rate = 0.0
        for _ in range(12):
            va, vb = k.eval(side * h), k.eval(side * 2 * h)
            if math.isfinite(va) and math.isfinite(vb):
                rate = abs(vb - va) / h
            h *= 0.25
        rates.append(rate)
    rep.cusp_rate = min(rates)
    if fl.cusp and rep.cusp_rate < _CUSP_THRESHOLD:
        bad("cusp", (0.0,), f"divided differences stay near {rep.cusp_rate:.3e}")
    if not fl.cusp and rep.cusp_rate > _CUSP_THRESHOLD:
        bad("cusp", (0.0,), "undeclared blow-up of divided differences near 0")

    for name in ("singular", "monotone", "strictly_monotone", "strictly_concave", "cusp"):
        rep.confirmed[name] = not any(v.flag == name for v in rep.violations)
    return rep


def kernel_to_json(k: Kernel) -> dict:
    d: dict = {"family": k.family, "params": {}}
    if k.family == "power":
        d["params"]["s"] = k.params[0]
    if k.family == "custom":
        d["params"]["neg"] = formula_to_json(k.neg_formula)
        d["params"]["pos"] = formula_to_json(k.pos_formula)
        d["params"]["flags"] = {
            "singular": k.flags.singular,
            "monotone": k.flags.monotone,
            "strictly_monotone": k.flags.strictly_monotone,
            "strictly_concave": k.flags.strictly_concave,
            "cusp": k.flags.cusp,
        }
    if k.scale != 1.0:
        d["scale"] = k.scale
    if k.strictify_eta:
        d["strictify_eta"] = k.strictify_eta
    if k.singularize_etas:
        d["singularize_eta"] = (k.singularize_etas[0] if len(k.singularize_etas) == 1
                                else list(k.singularize_etas))
    return d


def kernel_from_json(d: dict) -> Kernel:
    if not isinstance(d, dict) or "family" not in d:
        raise ValueError(f"kernel descriptor must be an object with a family, got {d!r}")
    family = d["family"]
    params = d.get("params") or {}
    if family == "zero":
        k = zero_kernel()
    elif family == "log":
        k = log_kernel()
    elif family == "sqrt":
        k = sqrt_kernel()
    elif family == "power":
        if "s" not in params:
            raise ValueError("power kernels need params.s")
        k = power_kernel(float(params["s"]))
    elif family == "custom":
        try:
            fd = params["flags"]
            flags = KernelFlags(bool(fd["singular"]), bool(fd["monotone"]),
                                bool(fd["strictly_monotone"]), bool(fd["strictly_concave"]),
                                bool(fd["cusp"]))
            k = custom_kernel(formula_from_json(params["neg"]),
                              formula_from_json(params["pos"]), flags)
        except KeyError as exc:
            raise ValueError(f"custom kernel descriptor missing {exc}") from exc
    else:
        raise ValueError(f"unknown kernel family {family!r}")
    if d.get("scale") is not None:
        k = k.scaled(float(d["scale"]))
    if d.get("strictify_eta") is not None:
        k = strictify(k, float(d["strictify_eta"]))
    se = d.get("singularize_eta")
    if se is not None:
        for eta in se if isinstance(se, list) else [se]:
            k = singularize(k, float(eta))
    return k
