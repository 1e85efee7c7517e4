"""Named example problems for the verification checks and the CLI.

The battery spans the kernel families (logarithmic, power, square-root and
the degenerate zero kernel), several field shapes (flat, concave bump, a
half-open ramp, two disjoint bands) and node counts 1-3.  Checks pick
sub-batteries by what they need: oracle comparisons stay at n <= 2 to keep
the grid enumeration cheap, continuity checks skip the zero kernel (its
overall maximum does not respond to node perturbations), and the usc checks
want fields with genuine discontinuities.
"""

from __future__ import annotations

from .core import Interval
from .fields import Field, FieldPiece
from .formulas import Affine, Constant, Quadratic
from .kernels import log_kernel, power_kernel, sqrt_kernel, zero_kernel
from .sumtrans import Problem

__all__ = [
    "BATTERY",
    "flat_field",
    "bump_field",
    "ramp_field",
    "two_band_field",
    "gate_field",
    "battery_problem",
    "oracle_battery",
    "majorization_battery",
    "continuity_battery",
    "usc_battery",
    "kernel_limit_battery",
    "single_node_battery",
]


def flat_field() -> Field:
    """J = 0 on all of [0, 1]."""
    return Field(pieces=(FieldPiece(Interval(0.0, 1.0), Constant(0.0)),))


def bump_field() -> Field:
    """J(t) = -(t - 1/2)^2, a smooth concave bump."""
    return Field(pieces=(FieldPiece(Interval(0.0, 1.0), Quadratic(-1.0, 1.0, -0.25)),))


def ramp_field() -> Field:
    """J(t) = t on [0, 1/2) and -inf from 1/2 on; jumps down at the break."""
    return Field(pieces=(FieldPiece(Interval(0.0, 0.5, closed_right=False),
                                    Affine(1.0, 0.0)),))


def two_band_field() -> Field:
    """J = 0 on [0.1, 0.4] and [0.6, 0.9], -inf in between and outside."""
    return Field(pieces=(
        FieldPiece(Interval(0.1, 0.4), Constant(0.0)),
        FieldPiece(Interval(0.6, 0.9), Constant(0.0)),
    ))


def gate_field() -> Field:
    """J = 0 on [0, 1/2) and -inf from 1/2 on; flat but half-open."""
    return Field(pieces=(FieldPiece(Interval(0.0, 0.5, closed_right=False),
                                    Constant(0.0)),))


def _mk(n, field, kernel) -> Problem:
    return Problem(n=n, field=field, kernel=kernel)


BATTERY: dict[str, Problem] = {
    "log-n1-flat": _mk(1, flat_field(), log_kernel()),
    "log-n2-flat": _mk(2, flat_field(), log_kernel()),
    "log-n3-flat": _mk(3, flat_field(), log_kernel()),
    "log-n2-bump": _mk(2, bump_field(), log_kernel()),
    "log-n3-bump": _mk(3, bump_field(), log_kernel()),
    "log-n1-ramp": _mk(1, ramp_field(), log_kernel()),
    "log-n1-gate": _mk(1, gate_field(), log_kernel()),
    "log-n2-bands": _mk(2, two_band_field(), log_kernel()),
    "sqrt-n2-flat": _mk(2, flat_field(), sqrt_kernel()),
    "sqrt-n3-bump": _mk(3, bump_field(), sqrt_kernel()),
    "power05-n1-flat": _mk(1, flat_field(), power_kernel(0.5)),
    "power05-n2-bump": _mk(2, bump_field(), power_kernel(0.5)),
    "zero-n1-bands": _mk(1, two_band_field(), zero_kernel()),
    "zero-n2-bands": _mk(2, two_band_field(), zero_kernel()),
    "zero-n1-gate": _mk(1, gate_field(), zero_kernel()),
    "zero-n1-ramp": _mk(1, ramp_field(), zero_kernel()),
}


def battery_problem(name: str) -> Problem:
    try:
        return BATTERY[name]
    except KeyError:
        raise KeyError(f"unknown battery problem {name!r}; "
                       f"known: {', '.join(sorted(BATTERY))}") from None


def oracle_battery() -> dict[str, Problem]:
    """Small problems (n <= 2) cheap enough for grid enumeration."""
    return {k: v for k, v in BATTERY.items() if v.n <= 2}


def majorization_battery() -> dict[str, Problem]:
    """Problems used for the no-strict-majorization check."""
    names = ("log-n1-flat", "log-n2-flat", "log-n2-bump",
             "sqrt-n2-flat", "power05-n2-bump")
    return {k: BATTERY[k] for k in names}


def continuity_battery() -> dict[str, Problem]:
    """Non-degenerate kernels only: the zero kernel gives a constant overall
    maximum, so node perturbations cannot move it."""
    return {k: v for k, v in BATTERY.items()
            if v.kernel is not None and v.kernel.family != "zero"}


def usc_battery() -> dict[str, Problem]:
    """Problems whose field has a discontinuity or a gap."""
    names = ("log-n1-ramp", "log-n1-gate", "log-n2-bands",
             "zero-n1-bands", "zero-n2-bands", "zero-n1-gate", "zero-n1-ramp")
    return {k: BATTERY[k] for k in names}


def kernel_limit_battery() -> dict[str, Problem]:
    """Monotone singular kernels, for strictify/singularize limit checks."""
    names = ("log-n1-flat", "log-n2-flat", "power05-n2-bump", "sqrt-n2-flat")
    return {k: BATTERY[k] for k in names}


def single_node_battery() -> dict[str, Problem]:
    return {k: v for k, v in BATTERY.items() if v.n == 1}
