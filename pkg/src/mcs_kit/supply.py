"""Two-level periodic resource model and its supply bound function.

An interface guarantees ``cap_lo`` units of processor per period while the
component behind it stays in LC mode and ``cap_hi`` once the component's
external mode switch is signalled.  Capacities live on a fixed-point grid
(default resolution 1/100 tick) so that capacity searches have exact
equality tests; internally everything is scaled to a common integer
denominator.

The minimum supply over an interval [0, t) with the external switch at
``ems`` is attained by one of two adversarial budget placements:

* pattern A parks the period grid so the first budget arrives as early as
  possible and every later one as late as possible (maximal initial
  blackout), and
* pattern B shifts that grid so the budget of the period containing the
  switch is exhausted exactly at the switch instant.

``sbf`` takes the minimum of the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .model import CriticalityLevel

LC = CriticalityLevel.LC
HC = CriticalityLevel.HC

#: default capacity resolution (of one tick)
DELTA = Fraction(1, 100)


@dataclass(frozen=True, slots=True)
class MCPRInterface:
    """Periodic resource abstraction of a component: (T, L, cap_lo, cap_hi)."""

    period: int
    criticality: CriticalityLevel
    cap_lo: Fraction
    cap_hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "cap_lo", Fraction(self.cap_lo))
        object.__setattr__(self, "cap_hi", Fraction(self.cap_hi))
        if not (0 <= self.cap_lo <= self.cap_hi <= self.period):
            raise ValueError(
                f"need 0 <= cap_lo <= cap_hi <= period, got "
                f"{self.cap_lo} / {self.cap_hi} / {self.period}"
            )
        if self.criticality is LC and self.cap_lo != self.cap_hi:
            raise ValueError("LC interface must have cap_lo == cap_hi")


@dataclass(frozen=True, slots=True)
class SupplyPatternContext:
    """Period-grid bookkeeping for one worst-case supply pattern."""

    s_1: Fraction
    n: int
    n_e: int
    s_e: Fraction
    e_e: Fraction
    e: Fraction
    x_e: int | None = None


def _scale(iface: MCPRInterface) -> tuple[int, int, int, int]:
    d = lcm(iface.cap_lo.denominator, iface.cap_hi.denominator)
    return (
        d,
        iface.period * d,
        int(iface.cap_lo * d),
        int(iface.cap_hi * d),
    )


def sbf_lc(iface: MCPRInterface, t: int) -> Fraction:
    """Minimum supply with no external switch in the interval.

    The classic periodic-resource bound: after a worst-case blackout of
    twice the per-period idle gap, full budgets arrive once per period.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    d, T, cl, _ = _scale(iface)
    tt = t * d
    n = max(0, (tt - (T - cl)) // T)
    return Fraction(n * cl + max(0, tt - 2 * (T - cl) - n * T), d)


def pattern_a_context(iface: MCPRInterface, ems: int, t: int) -> SupplyPatternContext:
    d, T, cl, _ = _scale(iface)
    te, tt = ems * d, t * d
    s1 = T - cl
    n_e = max(0, (te - s1) // T)
    n = max(0, (tt - s1) // T)
    s_e = n_e * T + s1
    e = s1 + n * T + T
    return SupplyPatternContext(
        s_1=Fraction(s1, d),
        n=n,
        n_e=n_e,
        s_e=Fraction(s_e, d),
        e_e=Fraction(s_e + T, d),
        e=Fraction(e, d),
    )


def sbf_pattern_a(iface: MCPRInterface, ems: int, t: int) -> Fraction:
    """Minimum supply under the maximal-initial-blackout placement."""
    if not (0 <= ems < t):
        raise ValueError("pattern bounds need 0 <= ems < t")
    d, T, cl, ch = _scale(iface)
    te, tt = ems * d, t * d
    s1 = T - cl
    n_e = max(0, (te - s1) // T)
    n = max(0, (tt - s1) // T)
    s_e = n_e * T + s1
    e = s1 + n * T + T
    e_e = s_e + T
    tail = max(0, tt - (2 * T - cl - ch) - n * T)
    if te - s_e < cl:
        val = n_e * cl + (n - n_e) * ch + tail
    elif e != e_e:
        val = (n_e + 1) * cl + (n - n_e - 1) * ch + tail
    else:
        val = n_e * cl + min(cl, tail)
    return Fraction(val, d)


def pattern_b_context(iface: MCPRInterface, ems: int, t: int) -> SupplyPatternContext:
    d, T, cl, _ = _scale(iface)
    te, tt = ems * d, t * d
    x_e = -((-te) // T) * T
    s1 = T - cl - (x_e - te)
    n_e = max(0, (te - s1) // T)
    n = max(0, (tt - s1) // T)
    e = n * T + T + s1
    return SupplyPatternContext(
        s_1=Fraction(s1, d),
        n=n,
        n_e=n_e,
        s_e=Fraction(te - cl, d),
        e_e=Fraction(te - cl + T, d),
        e=Fraction(e, d),
        x_e=x_e,
    )


def _walk_min_supply(T: int, cl: int, ch: int, te: int, tt: int, start: int) -> int:
    """Minimal in-window supply of one period grid, by direct accounting.

    Used where the closed forms do not apply (the switch-aligned budget
    would start at or before the window start).  Every period owes its
    budget somewhere inside itself; the switch period owes only the low
    budget if that can be exhausted before the switch, and either way may
    instead deliver the high budget as late as possible.
    """

    def min_overlap(budget: int, lo: int, hi: int) -> int:
        escape = max(0, min(hi, 0) - lo) + max(0, hi - max(lo, tt))
        return max(0, budget - escape)

    total = 0
    a = start - T  # include the period straddling the window start
    while a < tt:
        b = a + T
        if te >= tt or b <= te:
            total += min_overlap(cl, a, b)
        elif a <= te:
            upgraded = min_overlap(ch, a, b)
            if te - a >= cl:
                total += min(min_overlap(cl, a, te), upgraded)
            else:
                total += upgraded
        else:
            total += min_overlap(ch, a, b)
        a = b
    return total


def sbf_pattern_b(iface: MCPRInterface, ems: int, t: int) -> Fraction:
    """Minimum supply under the switch-aligned placement.

    The closed form assumes the switch period's low budget fits entirely
    inside the window before the switch; when it cannot (``ems`` earlier
    than one low budget) the minimum on this pattern's period grid is
    computed by direct accounting instead.
    """
    if not (0 <= ems < t):
        raise ValueError("pattern bounds need 0 <= ems < t")
    d, T, cl, ch = _scale(iface)
    te, tt = ems * d, t * d
    x_e = -((-te) // T) * T
    s1 = T - cl - (x_e - te)
    if te < max(cl, 1):
        return Fraction(_walk_min_supply(T, cl, ch, te, tt, s1 % T if T else 0), d)
    n_e = max(0, (te - s1) // T)
    n = max(0, (tt - s1) // T)
    e_e = te - cl + T
    e = n * T + T + s1
    tail = max(0, tt - s1 - (T - ch) - n * T)
    if e != e_e:
        val = (n_e + 1) * cl + (n - n_e - 1) * ch + tail
    else:
        val = n_e * cl + min(cl, tail)
    return Fraction(val, d)


def sbf(iface: MCPRInterface, ems: int, t: int) -> Fraction:
    """Guaranteed minimum supply in [0, t) with the external switch at ``ems``.

    With the switch at or beyond the interval end the LC-mode bound
    applies; otherwise the worse of the two adversarial placements.
    """
    if not (0 <= ems <= t):
        raise ValueError("need 0 <= ems <= t")
    if ems == t:
        return sbf_lc(iface, t)
    value = min(sbf_pattern_a(iface, ems, t), sbf_pattern_b(iface, ems, t))
    return max(value, Fraction(0))


# ---------------------------------------------------------------------------
# Vectorized evaluation (scaled integers) for the capacity searches
# ---------------------------------------------------------------------------


def sbf_lc_array(iface: MCPRInterface, horizon: int) -> tuple[np.ndarray, int]:
    """``sbf_lc`` for every interval length in [0, horizon], as scaled ints."""
    d, T, cl, _ = _scale(iface)
    tt = np.arange(horizon + 1, dtype=np.int64) * d
    n = np.maximum(0, (tt - (T - cl)) // T)
    return n * cl + np.maximum(0, tt - 2 * (T - cl) - n * T), d


def sbf_array(iface: MCPRInterface, t: int, ems: np.ndarray) -> tuple[np.ndarray, int]:
    """``sbf`` for every switch instant in ``ems`` (ticks), as scaled ints.

    Returns ``(numerators, scale)`` where the supply value for ``ems[i]``
    is ``numerators[i] / scale``.  Instants equal to ``t`` get the LC-mode
    value, matching the scalar dispatch.
    """
    d, T, cl, ch = _scale(iface)
    te = np.asarray(ems, dtype=np.int64) * d
    tt = t * d

    # LC-mode bound (for entries with ems == t)
    n_flat = max(0, (tt - (T - cl)) // T)
    flat = n_flat * cl + max(0, tt - 2 * (T - cl) - n_flat * T)

    # pattern A
    s1a = T - cl
    n_e = np.maximum(0, (te - s1a) // T)
    n_a = max(0, (tt - s1a) // T)
    s_e = n_e * T + s1a
    e_a = s1a + n_a * T + T
    e_e_a = s_e + T
    tail_a = max(0, tt - (2 * T - cl - ch) - n_a * T)
    val_a = np.where(
        te - s_e < cl,
        n_e * cl + (n_a - n_e) * ch + tail_a,
        np.where(
            e_a != e_e_a,
            (n_e + 1) * cl + (n_a - n_e - 1) * ch + tail_a,
            n_e * cl + min(cl, tail_a),
        ),
    )

    # pattern B
    x_e = -((-te) // T) * T
    s1b = T - cl - (x_e - te)
    n_e_b = np.maximum(0, (te - s1b) // T)
    n_b = np.maximum(0, (tt - s1b) // T)
    e_e_b = te - cl + T
    e_b = n_b * T + T + s1b
    tail_b = np.maximum(0, tt - s1b - (T - ch) - n_b * T)
    val_b = np.where(
        e_b != e_e_b,
        (n_e_b + 1) * cl + (n_b - n_e_b - 1) * ch + tail_b,
        n_e_b * cl + np.minimum(cl, tail_b),
    )

    out = np.minimum(val_a, val_b)

    # entries where the switch-aligned closed form does not apply
    degenerate = (te < max(cl, 1)) & (te < tt)
    if degenerate.any():
        fixed = np.array(
            [
                min(
                    val_a[i],
                    _walk_min_supply(T, cl, ch, int(te[i]), tt, int(s1b[i]) % T if T else 0),
                )
                for i in np.flatnonzero(degenerate)
            ],
            dtype=np.int64,
        )
        out[np.flatnonzero(degenerate)] = fixed

    out = np.maximum(out, 0)
    out = np.where(te == tt, flat, out)
    return out, d
