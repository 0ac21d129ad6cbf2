"""Closed-form cost lower bounds: pure scalar formulas over supplied quantities.

Every evaluator returns a :class:`BoundReport`. None of them optimizes
anything; heuristic provenance of the inputs is carried in `flags`. Values
can be negative (vacuous bounds are returned, not clipped). A bound is
reported divergent exactly when the gap is positive and the error parameter
is zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import Observable, spread
from .channels import Povm


def f(x: float) -> float:
    """4x + x^2."""
    return 4.0 * x + x * x


def g(a: float, b: float) -> float:
    s = a + b
    if s <= 1.0:
        raise ValueError("g requires a + b > 1")
    return (1.0 / s) ** (1.0 / (s - 1.0)) * (1.0 - 1.0 / s)


def plus_part(x: float) -> float:
    return x if x > 0.0 else 0.0


@dataclass
class BoundReport:
    theorem: str
    value: float | None  # None means divergent
    intermediates: dict = field(default_factory=dict)
    flags: tuple = ()

    @property
    def divergent(self) -> bool:
        return self.value is None

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "value": "divergent" if self.divergent else self.value,
            "intermediates": dict(self.intermediates),
            "flags": list(self.flags),
        }


def _divergent(gap: float, err: float) -> bool:
    return gap > 0.0 and err == 0.0


def general_tradeoff(gap: float, K: float, a: float, b: float,
                     error: float, c_max: float = 0.0,
                     a_prime: float | None = None,
                     flags=()) -> BoundReport:
    """Cost lower bound from the gain/power gap, in its finite-exponent and
    infinite-exponent (logarithmic) forms."""
    pg = plus_part(gap)
    inter = {"gap": gap, "K": K, "a": a, "b": b, "error": error,
             "c_max": c_max}
    if math.isinf(a):
        if a_prime is None:
            raise ValueError("infinite-a form requires a_prime")
        inter["a_prime"] = a_prime
        if pg == 0.0:
            return BoundReport("general-tradeoff", -c_max, inter, flags)
        if error == 0.0:
            return BoundReport("general-tradeoff", None, inter, flags)
        s = a_prime + b
        value = (pg / s) * math.log(pg / (K * f(error) ** b * s)) \
            - pg * (1.0 + 1.0 / s) - c_max
        return BoundReport("general-tradeoff", value, inter, flags)
    if a + b <= 1.0:
        raise ValueError("general_tradeoff requires a + b > 1")
    if pg == 0.0:
        return BoundReport("general-tradeoff", -c_max, inter, flags)
    if _divergent(pg, error):
        return BoundReport("general-tradeoff", None, inter, flags)
    s = a + b
    value = g(a, b) * pg ** (s / (s - 1.0)) \
        / (K * f(error) ** b) ** (1.0 / (s - 1.0)) - pg - c_max
    return BoundReport("general-tradeoff", value, inter, flags)


def _quadratic_form(theorem: str, gap: float, K: float, err: float,
                    c_max: float, flags, extra=None) -> BoundReport:
    pg = plus_part(gap)
    c_prime = c_max + pg + pg * pg / (64.0 * K) if K > 0 else c_max + pg
    inter = {"gap": gap, "K": K, "error": err, "c_max": c_max,
             "c_prime": c_prime}
    if extra:
        inter.update(extra)
    if _divergent(pg, err):
        return BoundReport(theorem, None, inter, flags)
    if pg == 0.0:
        return BoundReport(theorem, -c_max, inter, flags)
    value = pg * pg / (16.0 * K * err) - c_prime
    return BoundReport(theorem, value, inter, flags)


def simplified_tradeoff(gap: float, K: float, delta: float,
                        c_max: float = 0.0, flags=()) -> BoundReport:
    """Quadratic-in-gap cost bound with the irreversibility in the denominator."""
    return _quadratic_form("simplified-tradeoff", gap, K, delta, c_max, flags)


def povm_tradeoff(gap: float, K: float, p_fail: float,
                  c_max: float = 0.0, flags=()) -> BoundReport:
    """Same form with sqrt(P_fail) of an arbitrary two-valued POVM."""
    return _quadratic_form("povm-tradeoff", gap, K, math.sqrt(p_fail),
                           c_max, flags, extra={"p_fail": p_fail})


def conversion_tradeoff(gap: float, K: float, epsilon: float,
                        c_max: float = 0.0, flags=()) -> BoundReport:
    """Cost of approximately converting an orthogonal pair, error epsilon."""
    return _quadratic_form("conversion-tradeoff", gap, K, epsilon, c_max,
                           flags)


def energy_irrev_bound(c: float, d_h: float, d_hp: float,
                       delta: float, flags=()) -> BoundReport:
    inter = {"C": c, "spread_H": d_h, "spread_Hp": d_hp, "delta": delta}
    if _divergent(c, delta):
        return BoundReport("energy-irreversibility", None, inter, flags)
    if c == 0.0:
        return BoundReport("energy-irreversibility", 0.0, inter, flags)
    value = c * c / (2.0 * (d_h + d_hp) * f(delta)) - c
    return BoundReport("energy-irreversibility", value, inter, flags)


def energy_error_bound(c: float, d_h: float, d_hp: float,
                       eps: float, flags=()) -> BoundReport:
    inter = {"C": c, "spread_H": d_h, "spread_Hp": d_hp, "epsilon": eps}
    if _divergent(c, eps):
        return BoundReport("energy-error", None, inter, flags)
    if c == 0.0:
        return BoundReport("energy-error", -3.0 * d_hp * eps, inter, flags)
    value = c * c / (8.0 * (d_h + d_hp) * eps) - 2.0 * c - 3.0 * d_hp * eps
    return BoundReport("energy-error", value, inter, flags)


def proj_meas_energy_bound(pvm: Povm, h: Observable, eps: float,
                           flags=()) -> BoundReport:
    """Energy cost of reading out a projective measurement to error eps."""
    hm = h.matrix
    norms = [float(np.linalg.norm(p @ hm - hm @ p, 2)) for p in pvm.effects]
    cmax = max(norms)
    d_h = spread(h)
    inter = {"max_commutator_norm": cmax, "spread_H": d_h, "epsilon": eps}
    if _divergent(cmax, eps):
        return BoundReport("projective-measurement-energy", None, inter, flags)
    if cmax == 0.0:
        return BoundReport("projective-measurement-energy", -2.0 * d_h,
                           inter, flags)
    value = cmax * cmax / (2.0 * d_h * eps) - 2.0 * d_h
    return BoundReport("projective-measurement-energy", value, inter, flags)


def unitary_energy_bound(v: np.ndarray, h: Observable, eps: float,
                         flags=()) -> BoundReport:
    """Energy cost of an energy-non-conserving gate to error eps."""
    v = np.asarray(v, dtype=complex)
    diff = h.matrix - v.conj().T @ h.matrix @ v
    d_diff = spread(diff)
    d_h = spread(h)
    inter = {"spread_rotated_diff": d_diff, "spread_H": d_h, "epsilon": eps}
    if _divergent(d_diff, eps):
        return BoundReport("unitary-energy", None, inter, flags)
    if d_diff == 0.0:
        return BoundReport("unitary-energy", -d_h * (2.0 + 3.0 * eps),
                           inter, flags)
    value = d_diff * d_diff / (64.0 * d_h * eps) - d_h * (2.0 + 3.0 * eps)
    return BoundReport("unitary-energy", value, inter, flags)


def athermality_bound(gap: float, K_A: float, beta: float, error: float,
                      flags=()) -> BoundReport:
    """Free-energy cost bound; h' absorbs the athermality c_max = log(2)/beta."""
    pg = plus_part(gap)
    h_prime = math.log(2.0) / beta + pg + (pg * pg / (64.0 * K_A) if K_A > 0
                                           else 0.0)
    inter = {"gap": gap, "K_A": K_A, "beta": beta, "error": error,
             "h_prime": h_prime}
    if _divergent(pg, error):
        return BoundReport("athermality", None, inter, flags)
    if pg == 0.0:
        return BoundReport("athermality", -h_prime, inter, flags)
    value = pg * pg / (16.0 * K_A * error) - h_prime
    return BoundReport("athermality", value, inter, flags)


def work_bound(gap: float, K_A: float, beta: float, error: float,
               flags=()) -> BoundReport:
    """Work cost: the athermality bound minus the work-bit slack log(2)/beta."""
    base = athermality_bound(gap, K_A, beta, error, flags)
    inter = dict(base.intermediates)
    inter["work_bit_slack"] = math.log(2.0) / beta
    if base.divergent:
        return BoundReport("work", None, inter, base.flags)
    return BoundReport("work", base.value - math.log(2.0) / beta, inter,
                       base.flags)


def c_erase_gap_bound(e_j: float, e_jp: float, beta: float) -> float:
    """Lower bound on the gain/power gap for erasing an energy coherence."""
    return abs(e_j - e_jp) / 2.0 - 2.0 * math.log(2.0) / beta


def way_bound(m_em_max: float, probe_power: float, K: float, eps: float,
              c_max: float = 0.0, flags=()) -> BoundReport:
    """Probe-resource lower bound for approximate measurement under the
    free-readout condition."""
    pg = plus_part(m_em_max - probe_power)
    inter = {"m_em_max": m_em_max, "probe_power": probe_power, "K": K,
             "epsilon": eps, "c_max": c_max, "gap": pg}
    if _divergent(pg, eps):
        return BoundReport("way", None, inter, flags)
    if pg == 0.0:
        return BoundReport("way", -c_max, inter, flags)
    value = pg * pg / (16.0 * K * eps) - pg - c_max
    return BoundReport("way", value, inter, flags)
