"""Closed-form Lipschitz and one-sided-Lipschitz constants.

Because each component of the hydraulic nonlinearity depends on one flow
only, its Jacobian over the flow box is diagonal and the sharp Lipschitz
constant is the largest supremum of a per-link derivative:

    pipes    K_P = mu * max_i R_i * c_i**(mu-1),  c_i = max(|q_min|, |q_max|)
    pumps    K_M = max_i nu_i * r_i * q_max_i**(nu_i-1) * s_i**(2-nu_i)
    valves   K_V = mu * max_i o_i * R_i * c_i**(mu-1)

    K = max(K_P, K_M, K_V)

The one-sided constant coincides with K: the log norm of a diagonal matrix
is its largest diagonal entry, and every diagonal entry here is nonnegative.

An empty link class contributes 0, so K stays well defined for networks
without valves (or without pumps, etc.).
"""

from __future__ import annotations

import math

from .bounds import FlowBox
from .estimates import METHOD_ANALYTICAL, MODE_MAX, LipschitzEstimate
from .network import Network


def k_pipes(net: Network, box: FlowBox) -> float:
    best = 0.0
    mu = net.mu
    for i in range(net.n_pipes):
        c = max(abs(float(box.lo[i])), abs(float(box.hi[i])))
        val = mu * float(net.pipe_resistance[i]) * math.pow(c, mu - 1.0)
        if val > best:
            best = val
    return best


def k_pumps(net: Network, box: FlowBox) -> float:
    best = 0.0
    base = net.n_pipes
    for i in range(net.n_pumps):
        nu = float(net.pump_exponent[i])
        val = (nu * float(net.pump_coeff[i])
               * math.pow(float(box.hi[base + i]), nu - 1.0)
               * math.pow(float(net.pump_speed[i]), 2.0 - nu))
        if val > best:
            best = val
    return best


def k_valves(net: Network, box: FlowBox) -> float:
    best = 0.0
    mu = net.mu
    base = net.n_pipes + net.n_pumps
    for i in range(net.n_valves):
        c = max(abs(float(box.lo[base + i])), abs(float(box.hi[base + i])))
        val = (mu * float(net.valve_openness[i]) * float(net.valve_resistance[i])
               * math.pow(c, mu - 1.0))
        if val > best:
            best = val
    return best


def k_network(net: Network, box: FlowBox) -> LipschitzEstimate:
    """Exact Lipschitz constant of the stacked nonlinearity over the box."""
    per_class = {
        "pipes": k_pipes(net, box),
        "pumps": k_pumps(net, box),
        "valves": k_valves(net, box),
    }
    return LipschitzEstimate(
        value=max(per_class.values()),
        method=METHOD_ANALYTICAL,
        mode=MODE_MAX,
        per_class=per_class,
    )


def osl_network(net: Network, box: FlowBox) -> LipschitzEstimate:
    """One-sided Lipschitz constant; identical to k_network by construction."""
    return k_network(net, box)


def diag_log_norm(entries) -> float:
    """Log norm (induced 2-norm) of a diagonal matrix: its largest entry."""
    entries = list(entries)
    if not entries:
        raise ValueError("empty diagonal")
    return max(entries)


def pump_shortcut(coeff: float, exponent: float, s_min: float, s_max: float,
                  q_bar: float) -> float:
    """K_M for a pump set sharing one friction coefficient and exponent.

    With g(s, q) = nu*r*q**(nu-1)*s**(2-nu), the extremal speed is s_max for
    nu <= 2 (exponent 2-nu >= 0) and s_min for nu > 2.
    """
    s_sel = s_max if exponent <= 2.0 else s_min
    return (exponent * coeff * math.pow(q_bar, exponent - 1.0)
            * math.pow(s_sel, 2.0 - exponent))
