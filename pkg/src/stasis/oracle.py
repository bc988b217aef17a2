"""High-accuracy reference evaluation of the oscillatory integrals.

Two independent routes to the same numbers:

* ``integrate_oscillatory`` sums Gauss panels over the flattened side
  integrals int_0^{s_j} k_j(s) s^(mu_j-1) e^(+-i w s^rho_j) ds, with panel
  edges at phase increments of pi and the endpoint weight absorbed exactly
  by the substitution v = s^mu on a first panel.

* ``integrate_by_parts_check`` rebuilds each side integral from the
  primitive of s^(mu-1) e^(+-i w s^rho) -- a ray integral in the complex
  plane along s + t e^(+-i pi/(2 rho)), where the oscillation turns into
  e^(-w t^rho) decay -- as boundary terms minus int_0^{s_j} Phi(s) k'(s) ds.

Within their combined error estimates the two must agree; every certified
bound in the package is checked against these values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError
from .model import PhaseModel, SingularAmplitude, SubstitutionFrame, build_frame
from .quadrules import panel_complex, geometric_edges
from .specfun import theta

__all__ = [
    "OracleValue",
    "integrate_oscillatory",
    "phi_primitive",
    "integrate_by_parts_check",
    "reconstruct_total",
]

RAY_CUTOFF = 46.0          # e^-46 ~ 1e-20: ray truncation at w t^rho = 46
DEFAULT_BUDGET = 10_000_000  # panel evaluations per oracle call


@dataclass(frozen=True)
class OracleValue:
    value: complex
    abs_error_estimate: float
    panel_count: int
    method: str

    def __post_init__(self):
        if not (self.abs_error_estimate >= 0.0 and math.isfinite(self.abs_error_estimate)):
            raise DomainError("error estimate must be finite and non-negative")
        if self.panel_count < 1:
            raise DomainError("panel_count must be at least 1")


def _sig(side: int) -> float:
    """Sign of the oscillation exponent: +1 on side 1, -1 on side 2."""
    return 1.0 if side == 1 else -1.0


def _phase_edges(omega, rho, s_lo, s_hi, cap):
    """Edges of [s_lo, s_hi] with phase increments w*(s^rho) of at most pi
    and panel length of at most ``cap``."""
    if s_hi <= s_lo:
        return np.array([s_lo, s_hi])
    if omega <= 0.0:
        n = max(1, int(np.ceil((s_hi - s_lo) / cap)))
        return np.linspace(s_lo, s_hi, n + 1)
    n = int(np.ceil(omega * (s_hi ** rho - s_lo ** rho) / math.pi))
    k = np.arange(n + 1, dtype=float)
    edges = (s_lo ** rho + k * math.pi / omega) ** (1.0 / rho)
    edges[-1] = s_hi
    edges = np.clip(edges, s_lo, s_hi)
    # enforce the length cap (can bind near s = 0 when rho > 1)
    out = [edges[0]]
    for i in range(edges.size - 1):
        width = edges[i + 1] - edges[i]
        if width > cap:
            m = int(np.ceil(width / cap))
            out.extend(np.linspace(edges[i], edges[i + 1], m + 1)[1:])
        else:
            out.append(edges[i + 1])
    return np.unique(np.asarray(out))


def _refine(f, edges, tol_abs, budget_panels, label):
    """Panel sum with offender splitting until the estimate meets tol_abs."""
    value, err = panel_complex(f, edges)
    rounds = 0
    while err.sum() > tol_abs and rounds < 12:
        if edges.size - 1 >= budget_panels:
            raise BudgetError(
                f"{label}: error {err.sum():.3e} > tol {tol_abs:.3e} at panel budget",
                diagnostics={"panels": edges.size - 1, "error": float(err.sum()),
                             "value": complex(value)})
        bad = err > tol_abs / max(1, err.size)
        if not bad.any():
            break
        keep = [edges[0]]
        for i in range(edges.size - 1):
            if bad[i]:
                keep.append(0.5 * (edges[i] + edges[i + 1]))
            keep.append(edges[i + 1])
        edges = np.asarray(keep)
        value, err = panel_complex(f, edges)
        rounds += 1
    return value, float(err.sum()), edges.size - 1


def _side_integral(frame: SubstitutionFrame, omega: float, tol_abs: float,
                   budget_panels: int):
    """M_j = int_0^{s_end} k(s) s^(mu-1) e^(sig i w s^rho) ds."""
    geo = frame.geometry
    mu, rho, s_end = geo.mu, geo.rho, frame.s_end
    sig = _sig(frame.side)
    est = omega * s_end ** rho / math.pi + 16
    if est > budget_panels:
        raise BudgetError(
            f"side {frame.side}: ~{est:.0f} panels exceed budget {budget_panels}",
            diagnostics={"panels_needed": est, "omega": omega})

    a0 = s_end / 8.0
    if omega > 0.0:
        a0 = min(a0, (math.pi / omega) ** (1.0 / rho))

    # head [0, a0]: weight absorbed by v = s^mu, geometric subdivision
    if mu != 1.0:
        v_hi = a0 ** mu

        def f_head(v):
            s = v ** (1.0 / mu)
            return (1.0 / mu) * geo.k(s) * np.exp(sig * 1j * omega * s ** rho)

        head_edges = np.concatenate(([0.0], v_hi * 0.25 ** np.arange(5, -1, -1.0)))
    else:
        def f_head(s):
            return geo.k(s) * np.exp(sig * 1j * omega * s ** rho)

        head_edges = np.concatenate(([0.0], a0 * 0.25 ** np.arange(5, -1, -1.0)))
    v_head, e_head, n_head = _refine(f_head, head_edges, 0.25 * tol_abs,
                                     budget_panels, "head")

    def f_tail(s):
        return geo.k(s) * s ** (mu - 1.0) * np.exp(sig * 1j * omega * s ** rho)

    tail_edges = _phase_edges(omega, rho, a0, s_end, s_end / 8.0)
    v_tail, e_tail, n_tail = _refine(f_tail, tail_edges, 0.75 * tol_abs,
                                     budget_panels, "tail")
    return v_head + v_tail, e_head + e_tail, n_head + n_tail


def integrate_oscillatory(phase: PhaseModel, amp: SingularAmplitude,
                          omega: float, tol: float,
                          budget: int = DEFAULT_BUDGET) -> OracleValue:
    """int_{p1}^{p2} U(p) e^(i w psi(p)) dp by panel summation.

    The integral is split at the interval midpoint (the value does not
    depend on the split), each side substituted and summed over
    pi-phase Gauss panels.  |value - true| <= max(tol, abs_error_estimate).
    """
    omega = float(omega)
    if omega < 0.0:
        raise DomainError("omega must be >= 0")
    if tol < 1e-12:
        raise DomainError("tol below the supported floor 1e-12")
    q = 0.5 * (phase.p1 + phase.p2)
    budget_panels = budget // 22
    total = 0j
    err = 0.0
    count = 0
    for side in (1, 2):
        frame = build_frame(phase, amp, side, q)
        m, e, n = _side_integral(frame, omega, 0.5 * tol, budget_panels)
        ph = np.exp(1j * omega * float(phase.psi(frame.endpoint)))
        total += _sig(side) * ph * m
        err += e
        count += n
    return OracleValue(value=complex(total), abs_error_estimate=err,
                       panel_count=count, method="panels")


# ---------------------------------------------------------------------------
# ray primitive
# ---------------------------------------------------------------------------

def _ray_edges(s, omega, rho, t_max):
    """Edges in t along the ray from s: pi phase increments of w(s+t)^rho,
    capped at t_max."""
    if omega <= 0.0:
        raise DomainError("ray integral needs omega > 0")
    ts = []
    k = 1
    while True:
        t = (s ** rho + k * math.pi / omega) ** (1.0 / rho) - s
        if t >= t_max or k > 100_000:
            break
        ts.append(t)
        k += 1
    return np.concatenate(([0.0], ts, [t_max])) if ts else np.array([0.0, t_max])


def _ray_integral(s, omega, rho, mu, side, rel_tol=1e-11):
    """J(s) = int over the ray of z^(mu-1) e^(sig i w z^rho) dz."""
    sig = _sig(side)
    direction = np.exp(sig * 1j * math.pi / (2.0 * rho))
    t_max = (RAY_CUTOFF / omega) ** (1.0 / rho)

    if s == 0.0:
        # purely decaying: z^rho = +- i t^rho on the ray
        pre = direction * np.exp(sig * 1j * math.pi * (mu - 1.0) / (2.0 * rho))
        if mu != 1.0:
            def f(v):
                t = v ** (1.0 / mu)
                return (1.0 / mu) * np.exp(-omega * t ** rho) + 0j
            v_hi = t_max ** mu
            edges = np.concatenate(([0.0], v_hi * 0.2 ** np.arange(8, -1, -1.0)))
        else:
            def f(t):
                return np.exp(-omega * t ** rho) + 0j
            edges = np.concatenate(([0.0], t_max * 0.2 ** np.arange(8, -1, -1.0)))
        val, errs = panel_complex(f, edges)
        for _ in range(6):
            if errs.sum() <= rel_tol * abs(val):
                break
            mids = 0.5 * (edges[1:] + edges[:-1])
            edges = np.sort(np.concatenate((edges, mids)))
            val, errs = panel_complex(f, edges)
        return pre * val

    def f(t):
        z = s + t * direction
        return z ** (mu - 1.0) * np.exp(sig * 1j * omega * z ** rho) * direction

    edges = _ray_edges(s, omega, rho, t_max)
    # resolve both the decay scale and the |z|^(mu-1) corner at t ~ s
    if edges.size > 1 and edges[1] > 0:
        first = max(min(0.25 * s, edges[1] / 64.0), edges[1] * 1e-12)
        fine = geometric_edges(0.0, edges[1], first)
        edges = np.unique(np.concatenate((fine, edges)))
    val, errs = panel_complex(f, edges)
    for _ in range(6):
        if errs.sum() <= rel_tol * max(abs(val), 1e-300):
            break
        bad = errs > rel_tol * abs(val) / max(1, errs.size)
        keep = [edges[0]]
        for i in range(edges.size - 1):
            if bad[i]:
                keep.append(0.5 * (edges[i] + edges[i + 1]))
            keep.append(edges[i + 1])
        edges = np.asarray(keep)
        val, errs = panel_complex(f, edges)
    return val


def phi_primitive(s: float, omega: float, rho: float, mu: float, side: int,
                  tol: float = 1e-10) -> complex:
    """Ray integral normalised so that the s = 0 value is
    theta(side, rho, mu) * omega^(-mu/rho).

    The sign convention follows the endpoint coefficients: the function
    returned here is (-1)^side times the primitive of
    s^(mu-1) e^((-1)^(side+1) i w s^rho) used in the parts identity.
    """
    s = float(s)
    if s < 0.0:
        raise DomainError("s must be >= 0")
    if not (0.0 < mu <= 1.0) or rho < 1.0:
        raise DomainError("need mu in (0,1] and rho >= 1")
    if side not in (1, 2):
        raise DomainError("side must be 1 or 2")
    sign = 1.0 if side == 1 else -1.0   # (-1)^(side+1)
    return sign * _ray_integral(s, omega, rho, mu, side, rel_tol=tol)


# ---------------------------------------------------------------------------
# parts identity
# ---------------------------------------------------------------------------

_TAU_PANELS = np.array([0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, RAY_CUTOFF])


def _panel_grid(edges, n=15):
    from .quadrules import gauss_nodes
    x, w = gauss_nodes(n)
    edges = np.asarray(edges, dtype=float)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _tau_grid():
    return _panel_grid(_TAU_PANELS)


def _fine_tau_grid():
    head = geometric_edges(0.0, 1.0, 1.0 / 16.0)
    return _panel_grid(np.unique(np.concatenate((head, _TAU_PANELS))))


def _laplace_factor(s_nodes, omega, mu, side):
    """L(s) = int_0^inf (s + sig i tau/w)^(mu-1) e^-tau dtau on an array of
    s with w s >= 1 (rho = 1 fast path).  Uses a common tau grid for
    w s >= 4 and a per-node refined grid below (the integrand has a
    near-singularity at distance w s from the path)."""
    sig = _sig(side)
    s_nodes = np.asarray(s_nodes, dtype=float)
    out = np.empty(s_nodes.shape, dtype=complex)
    big = omega * s_nodes >= 4.0
    if big.any():
        tau, wts = _tau_grid()
        zb = s_nodes[big, None] + sig * 1j * tau[None, :] / omega
        out[big] = (zb ** (mu - 1.0) * np.exp(-tau[None, :])) @ wts
    if (~big).any():
        # 1 <= w s < 4: shared grid refined to 1/16 near tau = 0
        tau, wts = _fine_tau_grid()
        zb = s_nodes[~big, None] + sig * 1j * tau[None, :] / omega
        out[~big] = (zb ** (mu - 1.0) * np.exp(-tau[None, :])) @ wts
    return out


def _series_increment(s_nodes, omega, mu, side, n_terms=24):
    """int_0^s r^(mu-1) e^(sig i w r) dr for w s <= 1, by the power series
    sum_n (sig i w)^n s^(n+mu) / (n! (n+mu))."""
    sig = _sig(side)
    s_nodes = np.asarray(s_nodes, dtype=float)
    acc = np.zeros(s_nodes.shape, dtype=complex)
    term = np.ones(s_nodes.shape, dtype=complex)   # (sig i w s)^n / n!
    smu = s_nodes ** mu
    for n in range(n_terms):
        acc = acc + term * smu / (n + mu)
        term = term * (sig * 1j * omega * s_nodes) / (n + 1)
    return acc


def _primitive_on_nodes(s_nodes, omega, rho, mu, side):
    """Honest primitive Phi(s) of s^(mu-1) e^(sig i w s^rho), node by node
    (slow path for rho != 1)."""
    out = np.empty(len(s_nodes), dtype=complex)
    for i, s in enumerate(np.asarray(s_nodes, dtype=float)):
        out[i] = -_ray_integral(float(s), omega, rho, mu, side, rel_tol=1e-10)
    return out


class _PrimitiveEval:
    """Vectorized Phi(s) with a Chebyshev-in-log accelerator for rho = 1."""

    def __init__(self, omega, rho, mu, side, s_end):
        self.omega, self.rho, self.mu, self.side = omega, rho, mu, side
        self.s_end = s_end
        self.sig = _sig(side)
        self.cheb = None
        self.s_lo = 4.0 / omega if omega > 0 else np.inf
        if rho == 1.0 and s_end > 4.0 * self.s_lo and omega * s_end > 64.0:
            from numpy.polynomial.chebyshev import Chebyshev
            lo, hi = math.log(self.s_lo), math.log(s_end)

            def lf(u):
                return _laplace_factor(np.exp(u), omega, mu, side)

            self.cheb = Chebyshev.interpolate(lf, 120, domain=[lo, hi])

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.rho != 1.0:
            return _primitive_on_nodes(s, self.omega, self.rho, self.mu,
                                       self.side, self.s_end)
        out = np.empty(s.shape, dtype=complex)
        tiny = self.omega * s < 1.0
        if tiny.any():
            # Phi(s) = Phi(0) + int_0^s r^(mu-1) e^(sig i w r) dr
            phi0 = (-1.0) ** self.side * complex(theta(self.side, 1.0, self.mu)) \
                * self.omega ** (-self.mu)
            out[tiny] = phi0 + _series_increment(s[tiny], self.omega, self.mu,
                                                 self.side)
        rest = ~tiny
        if rest.any():
            sr = s[rest]
            if self.cheb is not None:
                L = np.empty(sr.shape, dtype=complex)
                direct = sr < self.s_lo * (1 + 1e-12)
                if direct.any():
                    L[direct] = _laplace_factor(sr[direct], self.omega,
                                                self.mu, self.side)
                L[~direct] = self.cheb(np.log(sr[~direct]))
            else:
                L = _laplace_factor(sr, self.omega, self.mu, self.side)
            out[rest] = -self.sig * 1j \
                * np.exp(self.sig * 1j * self.omega * sr) * L / self.omega
        return out


def integrate_by_parts_check(frame: SubstitutionFrame, phase: PhaseModel,
                             omega: float, tol: float) -> OracleValue:
    """Second oracle for the side integral M_j, via the parts identity

        M_j = Phi(s_j) k(s_j) - Phi(0) k(0) - int_0^{s_j} Phi(s) k'(s) ds.

    Independent of the panel route: Phi comes from the ray representation.
    """
    omega = float(omega)
    if omega <= 0.0:
        raise DomainError("parts identity needs omega > 0")
    geo = frame.geometry
    mu, rho, s_end = geo.mu, geo.rho, frame.s_end
    sig = _sig(frame.side)
    prim = _PrimitiveEval(omega, rho, mu, frame.side, s_end)

    phi_send = -_ray_integral(s_end, omega, rho, mu, frame.side, rel_tol=1e-11)
    phi_zero = -(-1.0) ** (frame.side + 1) * theta(frame.side, rho, mu) \
        * omega ** (-mu / rho)
    boundary = phi_send * frame.k(s_end) - phi_zero * frame.k_at_zero

    def f(s):
        return prim(s) * geo.k_prime(s)

    edges = _phase_edges(omega, rho, 0.0, s_end, s_end / 8.0)
    if edges.size > 1 and edges[1] > 0:
        head = geometric_edges(0.0, edges[1], edges[1] / 64.0)
        edges = np.unique(np.concatenate((head, edges)))
    value, err, count = _refine(f, edges, tol, DEFAULT_BUDGET // 22, "parts")
    return OracleValue(value=complex(boundary - value),
                       abs_error_estimate=float(err),
                       panel_count=count, method="parts-identity")


def reconstruct_total(phase: PhaseModel, amp: SingularAmplitude, omega: float,
                      q: float, tol: float) -> OracleValue:
    """Whole integral rebuilt from the two parts-identity sides at cutting
    point q, re-phased by e^(i w psi(p_j)) and orientation signs."""
    total = 0j
    err = 0.0
    count = 0
    for side in (1, 2):
        frame = build_frame(phase, amp, side, q)
        ov = integrate_by_parts_check(frame, phase, omega, 0.5 * tol)
        ph = np.exp(1j * omega * float(phase.psi(frame.endpoint)))
        total += _sig(side) * ph * ov.value
        err += ov.abs_error_estimate
        count += ov.panel_count
    return OracleValue(value=complex(total), abs_error_estimate=err,
                       panel_count=count, method="parts-identity")
