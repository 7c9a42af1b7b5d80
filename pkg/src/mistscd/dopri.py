"""Dormand-Prince 5(4) integrator advancing many independent lanes at once.

Every lane keeps its own time and step size, and all arithmetic is
element-wise, so a lane's result does not depend on which other lanes share
the batch.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B_LOW = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b - bl for b, bl in zip(_B, _B_LOW))

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0

OK, LEFT_DOMAIN, STEP_UNDERFLOW = 0, 1, 2


@dataclass
class LaneResult:
    y: np.ndarray
    t: np.ndarray
    status: np.ndarray
    accepted: np.ndarray
    rejected: np.ndarray
    history: list = field(default_factory=list)


def _combine(coeffs, ks, y, h):
    acc = None
    for c, k in zip(coeffs, ks):
        if c == 0.0:
            continue
        term = c * k
        acc = term if acc is None else acc + term
    return y + h[:, None] * acc


def integrate_lanes(
    rhs,
    y0,
    t_end,
    rtol=1e-8,
    atol=1e-10,
    err_components=None,
    h0=None,
    in_domain=None,
    record=False,
    min_step_ratio=1e-15,
):
    """Integrate ``dy/dt = rhs(lanes, y)`` for every row of ``y0`` up to ``t_end``.

    Parameters
    ----------
    rhs : callable
        ``rhs(lanes, y)`` with ``lanes`` the integer row indices being advanced
        and ``y`` their states, shape ``(len(lanes), dim)``.
    err_components : sequence of int, optional
        State columns entering the error norm (default: all).
    in_domain : callable, optional
        ``in_domain(y) -> bool mask``; lanes whose accepted state fails it
        stop with status ``LEFT_DOMAIN``.
    record : bool
        Keep ``(t, y)`` after every accepted step (meant for few lanes).
    """
    y = np.array(y0, dtype=float, copy=True)
    m, dim = y.shape
    cols = list(range(dim)) if err_components is None else list(err_components)
    t = np.zeros(m)
    h = np.full(m, t_end * 1e-6 if h0 is None else h0, dtype=float)
    status = np.zeros(m, dtype=int)
    accepted = np.zeros(m, dtype=int)
    rejected = np.zeros(m, dtype=int)
    active = np.ones(m, dtype=bool)
    history = [(t.copy(), y.copy())] if record else []
    h_min = min_step_ratio * t_end

    while active.any():
        lanes = np.flatnonzero(active)
        ya = y[lanes]
        ha = np.minimum(h[lanes], t_end - t[lanes])
        ks = [rhs(lanes, ya)]
        for s in range(1, 7):
            ks.append(rhs(lanes, _combine(_A[s], ks, ya, ha)))
        y_new = _combine(_B, ks, ya, ha)

        err_sq = np.zeros(len(lanes))
        for c in cols:
            e = ha * sum(coef * k[:, c] for coef, k in zip(_E, ks) if coef != 0.0)
            scale = atol + rtol * np.maximum(np.abs(ya[:, c]), np.abs(y_new[:, c]))
            err_sq = err_sq + (e / scale) ** 2
        err = np.sqrt(err_sq / len(cols))

        ok = err <= 1.0
        with np.errstate(divide="ignore"):
            factor = np.where(err > 0, SAFETY * err ** -0.2, MAX_FACTOR)
        factor = np.clip(factor, MIN_FACTOR, MAX_FACTOR)
        factor = np.where(ok, factor, np.minimum(factor, 1.0))

        acc = lanes[ok]
        y[acc] = y_new[ok]
        t[acc] = np.where(t_end - t[acc] <= ha[ok], t_end, t[acc] + ha[ok])
        accepted[acc] += 1
        rejected[lanes[~ok]] += 1
        h[lanes] = ha * factor

        if in_domain is not None and acc.size:
            bad = acc[~in_domain(y[acc])]
            status[bad] = LEFT_DOMAIN
            active[bad] = False
        tiny = lanes[(h[lanes] < h_min) & active[lanes] & (t[lanes] < t_end)]
        status[tiny] = STEP_UNDERFLOW
        active[tiny] = False
        active[acc] &= t[acc] < t_end

        if record and acc.size:
            history.append((t.copy(), y.copy()))

    return LaneResult(y, t, status, accepted, rejected, history)
