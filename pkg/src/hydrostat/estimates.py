"""Norm records, closed-form bound evaluators and the quantitative lemmas.

The bound evaluators keep the displayed closed forms but treat the
non-explicit constants as configuration (``BoundParams``, default 1);
nothing here claims sharp constants.  Doubly exponential quantities (the
iteration bounds, where terms like delta0^(2^k) underflow long before
k = 40) are handled entirely in log space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .spectral import (SpectralField, grad_h_norm_sq, grad_norm_sq, l2_norm,
                       oversample)


@dataclass
class NormRecord:
    """Norms of a velocity field at one instant (unnormalized L^q)."""

    t: float
    l2: float
    grad_l2: float
    l4: float
    l6: float
    linf: float
    lq: dict = field(default_factory=dict)    # extra q -> ||v||_q
    dz_vbar_l2: float = np.nan                # decomposition extras
    linf_V: float = np.nan
    dissipation: float = np.nan               # cumulative int ||grad v||_2^2


@dataclass(frozen=True)
class BoundParams:
    """Tunable stand-ins for the non-explicit constants depending only on h."""

    c0: float = 1.0
    c: float = 1.0
    c0_star: float = 1.0

    def __post_init__(self):
        if min(self.c0, self.c, self.c0_star) <= 0:
            raise ConfigurationError("bound constants must be positive")


def norms(v: SpectralField, qs=(), t: float = 0.0) -> NormRecord:
    """L2 / gradient norms by Parseval, L^q and sup by oversampled quadrature.

    A single oversampled evaluation of |v| feeds every lattice-quadrature
    norm.
    """
    mag_sq = np.sum(oversample(v).values ** 2, axis=0)
    vol = v.grid.volume

    def _lq(q):
        if float(q).is_integer() and int(q) % 2 == 0:
            moment = np.mean(mag_sq ** (int(q) // 2))
        else:
            moment = np.mean(mag_sq ** (q / 2.0))
        return float((vol * moment) ** (1.0 / q))

    return NormRecord(t=t,
                      l2=l2_norm(v),
                      grad_l2=np.sqrt(grad_norm_sq(v)),
                      l4=_lq(4.0),
                      l6=_lq(6.0),
                      linf=float(np.sqrt(np.max(mag_sq))),
                      lq={float(q): _lq(float(q)) for q in qs})


# ---------------------------------------------------------------------------
# closed-form bound evaluators
# ---------------------------------------------------------------------------

def growth_envelope(t, v0_l4, c):
    """c*(1+||v0||_4)^40 (t+1)^2 exp{c e^{2t}(t+1)(1+||v0||_4)^4}.

    Shared closed form of the sup-norm growth envelope; evaluated through
    the log to postpone overflow (returns inf when e^(...) overflows).
    """
    t = np.asarray(t, dtype=float)
    a = 1.0 + v0_l4
    log_val = (np.log(c) + 40.0 * np.log(a) + 2.0 * np.log1p(t)
               + c * np.exp(2.0 * t) * (t + 1.0) * a ** 4)
    with np.errstate(over="ignore"):
        return np.exp(log_val)


def sup_norm_envelope(t, v0_l4, p: BoundParams):
    """Growth envelope with the uniqueness-theory constant C0."""
    return growth_envelope(t, v0_l4, p.c0)


def linf_growth_bound(t, v0_l4, p: BoundParams):
    """Same closed form with the interior constant C."""
    return growth_envelope(t, v0_l4, p.c)


def perturbation_response(s, v0_l4, h, p: BoundParams):
    """rho(s): the threshold map of the perturbation result; rho(0) = 0."""
    s = np.asarray(s, dtype=float)
    base = 1.0 + v0_l4 + (2.0 * h) ** 0.25 * s
    return p.c0 * base ** 40 * np.exp(p.c0 * base ** 4) * s


def iteration_weight(t, v0_l4, p: BoundParams):
    """S0(t) = [(1+||v0||_4) exp{C e^{2t}(t+1)(1+||v0||_4)^4}]^20."""
    t = np.asarray(t, dtype=float)
    a = 1.0 + v0_l4
    log_val = 20.0 * (np.log(a) + p.c * np.exp(2.0 * t) * (t + 1.0) * a ** 4)
    with np.errstate(over="ignore"):
        return np.exp(log_val)


def iteration_weight_integral(t, v0_l4, p: BoundParams, n: int = 256):
    """S1(t) = int_0^t S0, by composite Simpson quadrature."""
    if t == 0:
        return 0.0
    tau = np.linspace(0.0, t, 2 * n + 1)
    vals = iteration_weight(tau, v0_l4, p)
    ht = tau[1] - tau[0]
    return float(ht / 3.0 * (vals[0] + vals[-1] + 4 * vals[1::2].sum()
                             + 2 * vals[2:-1:2].sum()))


def iteration_base(t, s1, h, p: BoundParams):
    """M0(t) = 2h + (1+C0*) 2^80 (1+S1(t)); always >= 2."""
    return 2.0 * h + (1.0 + p.c0_star) * 2.0 ** 80 * (1.0 + s1)


# ---------------------------------------------------------------------------
# Moser-type iteration (exact numeric routine, log space)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IterationInstance:
    """A candidate sequence for the doubling iteration, stored as log A_k."""

    m0: float
    delta0: float
    log_terms: np.ndarray          # log A_k for k = 1..len

    def __post_init__(self):
        if self.m0 < 2:
            raise ConfigurationError(f"M0={self.m0}: iteration base must be >= 2")
        if self.delta0 <= 0:
            raise ConfigurationError(f"delta0={self.delta0}: must be positive")

    @classmethod
    def from_values(cls, m0, delta0, terms):
        terms = np.asarray(terms, dtype=float)
        if np.any(terms < 0):
            raise ConfigurationError("sequence terms must be nonnegative")
        with np.errstate(divide="ignore"):
            return cls(m0, delta0, np.log(terms))


@dataclass(frozen=True)
class MoserVerdict:
    status: str                    # "ok" | "bound-violated" | "hypothesis-violated"
    log_certified: np.ndarray      # log a_k = log of the certified bounds
    first_violation: int | None = None   # 1-based k where the check failed

    @property
    def ok(self):
        return self.status == "ok"


_LOG_SLACK = 1e-9   # forgives round-off on exactly saturated recursions


def certified_log_bounds(m0, delta0, kmax):
    """log a_k = -(k+2) log M0 + 2^(k-1) (4 log M0 + 2 log delta0), k = 1..kmax."""
    k = np.arange(1, kmax + 1, dtype=float)
    return -(k + 2) * np.log(m0) + 2.0 ** (k - 1) * (4 * np.log(m0) + 2 * np.log(delta0))


def moser_bound_check(inst: IterationInstance) -> MoserVerdict:
    """Check the hypothesis, then the certified bound A_k <= a_k, in log space."""
    log_a = certified_log_bounds(inst.m0, inst.delta0, len(inst.log_terms))
    lm, ld = np.log(inst.m0), np.log(inst.delta0)
    la = inst.log_terms

    if la[0] > lm + 2 * ld + _LOG_SLACK:
        return MoserVerdict("hypothesis-violated", log_a, 1)
    for k in range(1, len(la)):           # recursion index k, sequence A_{k+1}
        bound = np.logaddexp(lm + 2.0 ** (k + 1) * ld, k * lm + 2 * la[k - 1])
        if la[k] > bound + _LOG_SLACK:
            return MoserVerdict("hypothesis-violated", log_a, k + 1)

    bad = np.nonzero(la > log_a + _LOG_SLACK)[0]
    if bad.size:
        return MoserVerdict("bound-violated", log_a, int(bad[0]) + 1)
    return MoserVerdict("ok", log_a)


def saturated_instance(m0, delta0, kmax, damping=None) -> IterationInstance:
    """Sequence saturating the recursion, optionally damped by factors in (0, 1].

    ``damping`` are multiplicative factors u_k applied to each saturated
    term; any such sequence still satisfies the hypothesis.
    """
    lm, ld = np.log(m0), np.log(delta0)
    log_u = np.zeros(kmax) if damping is None else np.log(np.asarray(damping, dtype=float))
    if log_u.shape != (kmax,) or np.any(log_u > 0):
        raise ConfigurationError("damping must be kmax factors in (0, 1]")
    la = np.empty(kmax)
    la[0] = lm + 2 * ld + log_u[0]
    for k in range(1, kmax):
        la[k] = np.logaddexp(lm + 2.0 ** (k + 1) * ld, k * lm + 2 * la[k - 1]) + log_u[k]
    return IterationInstance(m0, delta0, la)


def random_instance(rng, kmax_limit=40) -> IterationInstance:
    """Random hypothesis-satisfying instance: M0 in [2,10], delta0 in (0,1)."""
    m0 = rng.uniform(2.0, 10.0)
    delta0 = rng.uniform(1e-6, 1.0 - 1e-12)
    kmax = int(rng.integers(1, kmax_limit + 1))
    damping = None
    if rng.random() < 0.5:
        damping = rng.uniform(1e-3, 1.0, size=kmax)
    return saturated_instance(m0, delta0, kmax, damping)


# ---------------------------------------------------------------------------
# anisotropic Ladyzhenskaya inequality (empirical checker)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LadyzhenskayaRatios:
    lhs: float
    rhs1: float       # without the constant C
    rhs2: float
    ratio1: float
    ratio2: float


def ladyzhenskaya_ratio(phi: SpectralField, varphi: SpectralField,
                        psi: SpectralField, factor: int = 2) -> LadyzhenskayaRatios:
    """Empirical constant demand of the layer interpolation inequality.

    lhs = int_M (int |phi| dz)(int |varphi psi| dz) dx_H by oversampled
    lattice quadrature; both right-hand sides are returned without their
    constant, so lhs/rhs is the constant an inequality proof would need.
    """
    for f in (phi, varphi, psi):
        if f.ncomp != 1:
            raise ConfigurationError("ratio checker expects scalar fields")
    g = phi.grid
    pv = oversample(phi, factor).values[0]
    vv = oversample(varphi, factor).values[0]
    sv = oversample(psi, factor).values[0]
    col_phi = np.mean(np.abs(pv), axis=2) * g.volume
    col_mix = np.mean(np.abs(vv * sv), axis=2) * g.volume
    lhs = float(np.mean(col_phi * col_mix))

    def _pair(f):
        n2 = l2_norm(f)
        nh = np.sqrt(grad_h_norm_sq(f))
        return n2, np.sqrt(n2 * (n2 + nh))

    phi2, phi_mix = _pair(phi)
    var2, var_mix = _pair(varphi)
    psi2, psi_mix = _pair(psi)
    rhs1 = phi2 * var_mix * psi_mix
    rhs2 = phi_mix * var_mix * psi2
    tiny = np.finfo(float).tiny
    return LadyzhenskayaRatios(lhs, rhs1, rhs2,
                               lhs / max(rhs1, tiny), lhs / max(rhs2, tiny))


# ---------------------------------------------------------------------------
# envelope fitting for the non-explicit bounds
# ---------------------------------------------------------------------------

def fit_constant(measured) -> float:
    """Minimal constant dominating the measured series."""
    measured = np.asarray(measured, dtype=float)
    if measured.size == 0:
        raise ConfigurationError("cannot fit an empty series")
    return float(np.max(measured))


def fit_sup_envelope_c0(t, linf_V, linf_V0, v0_l4) -> float:
    """Minimal C0 with growth_envelope(t, .., C0) * ||V0||_inf >= ||V||_inf(t).

    The envelope is strictly increasing in C0, so each time gives a unique
    root; the fit is the largest of them.
    """
    t = np.asarray(t, dtype=float)
    linf_V = np.asarray(linf_V, dtype=float)
    if t.size == 0:
        raise ConfigurationError("cannot fit an empty series")
    if linf_V0 <= 0:
        return 0.0
    a = 1.0 + v0_l4
    need = 0.0
    for ti, vi in zip(t, linf_V):
        target = np.log(vi / linf_V0) if vi > 0 else -np.inf
        if target == -np.inf:
            continue
        b = np.exp(2.0 * ti) * (ti + 1.0) * a ** 4
        offset = 40.0 * np.log(a) + 2.0 * np.log1p(ti)

        def short(c):
            return np.log(c) + offset + c * b - target

        lo, hi = 1e-300, 1.0
        while short(hi) < 0:
            hi *= 2.0
            if hi > 1e12:
                break
        for _ in range(200):
            mid = np.sqrt(lo * hi) if hi / lo > 4 else 0.5 * (lo + hi)
            if short(mid) < 0:
                lo = mid
            else:
                hi = mid
        need = max(need, hi)
    return float(need)


def fit_l4_growth_c(t, l4, v0_l2, v0_l4) -> float:
    """Minimal C with exp{C e^{2t}(t+1)(1+||v0||_2^2)^2}(1+||v0||_4) >= ||v||_4(t)."""
    t = np.asarray(t, dtype=float)
    l4 = np.asarray(l4, dtype=float)
    if t.size == 0:
        raise ConfigurationError("cannot fit an empty series")
    denom = np.exp(2.0 * t) * (t + 1.0) * (1.0 + v0_l2 ** 2) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        need = (np.log(l4) - np.log1p(v0_l4)) / denom
    need = need[np.isfinite(need)]
    return float(max(0.0, need.max())) if need.size else 0.0


def fit_envelope(form, t, measured, **context) -> float:
    """Dispatch: minimal dominating constant for the named bound form."""
    if form == "constant":
        return fit_constant(measured)
    if form == "sup_envelope":
        return fit_sup_envelope_c0(t, measured, context["linf_V0"], context["v0_l4"])
    if form == "l4_growth":
        return fit_l4_growth_c(t, measured, context["v0_l2"], context["v0_l4"])
    raise ConfigurationError(f"unknown bound form {form!r}")
