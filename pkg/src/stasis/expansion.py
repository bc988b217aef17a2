"""One-term stationary-phase expansion with certified remainder bounds.

For each side j of the cutting point the integral contributes a leading term

    A_j(w) = e^(i w psi(p_j)) k_j(0) theta(j, rho_j, mu_j) w^(-mu_j/rho_j)

and two remainders with fully explicit bounds,

    |R1_j| <= Gamma(1/rho_j)/rho_j * int_0^{s_j} s^(mu_j-1) |k_j'(s)| ds * w^(-1/rho_j),
    |R2_j| <= (rho_j-mu_j)/rho_j * Gamma(1/rho_j) * |U(q)/phi_j'(q)| * phi_j(q)^(-rho_j)
              * w^(-(1+1/rho_j)).

When mu_j = 1 the R1 rate above degenerates to the rate of A_j; for
rho_j >= 2 a sharper weighted bound L * int s^(-gamma) |k'| * w^(-delta)
applies, but its prefactor L is not pinned down here, so such terms are
flagged non-certified and excluded from certified totals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import PhaseModel, SingularAmplitude, SubstitutionFrame, build_frame
from .quadrules import adaptive_complex, jacobi_nodes_01
from .specfun import gamma_pos, theta

__all__ = [
    "ExpansionConfig",
    "PowerTerm",
    "ExpansionResult",
    "leading_term",
    "remainder_bound_r1",
    "remainder_bound_r2",
    "expand_integral",
    "weighted_kprime_integral",
]


@dataclass(frozen=True)
class ExpansionConfig:
    """Knobs for the mu = 1 remainder branch.

    delta must equal (gamma + 1)/rho for the side it is applied to;
    L_const defaults to 1 and marks the bound non-certified.
    """

    gamma: float = 0.5
    delta: float | None = None
    L_const: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise DomainError("gamma must lie in (0, 1)")
        if self.L_const <= 0.0:
            raise DomainError("L_const must be positive")

    def delta_for(self, rho: float) -> float:
        d = (self.gamma + 1.0) / rho
        if self.delta is not None and abs(self.delta - d) > 1e-12:
            raise DomainError(
                f"delta={self.delta} inconsistent with (gamma+1)/rho={d}")
        return d


@dataclass(frozen=True)
class PowerTerm:
    """One power-law contribution coeff * gap^(-gap_exp) * w^(-omega_exp).

    Exponents are stored as decay exponents (positive numbers mean decay),
    matching the (alpha_k^1, alpha_k^2) bookkeeping of the quadratic case;
    gap_exp is 0 whenever no gap parameter is in play.
    """

    coeff: complex
    omega_exp: float
    gap_exp: float = 0.0
    origin: str = ""
    non_certified: bool = False

    def __post_init__(self):
        if not math.isfinite(abs(self.coeff)):
            raise DomainError("coefficient must be finite")

    def value(self, omega: float, gap: float = 1.0) -> float:
        return abs(self.coeff) * gap ** (-self.gap_exp) * omega ** (-self.omega_exp)


@dataclass(frozen=True)
class ExpansionResult:
    """Leading terms plus the certified remainder budget.

    ``leading`` holds (complex coefficient, signed omega exponent) pairs so
    that each term evaluates to coeff * w**omega_exp; ``bound_terms`` are
    PowerTerm decay contributions; their sum at (omega, gap) is the
    certified bound on |integral - sum of leading terms|.
    """

    leading: tuple
    bound_terms: tuple
    q_used: float
    config: ExpansionConfig
    omega: float
    gap: float = 1.0

    def __post_init__(self):
        if not self.leading:
            raise DomainError("at least one leading term required")

    def leading_sum(self, omega: float | None = None) -> complex:
        w = self.omega if omega is None else omega
        return sum(c * w ** e for c, e in self.leading)

    def total_bound(self, omega: float | None = None,
                    certified_only: bool = False) -> float:
        w = self.omega if omega is None else omega
        return float(sum(bt.value(w, self.gap) for bt in self.bound_terms
                         if not (certified_only and bt.non_certified)))

    def has_non_certified(self) -> bool:
        return any(bt.non_certified for bt in self.bound_terms)


def leading_term(frame: SubstitutionFrame, phase: PhaseModel,
                 omega: float) -> complex:
    """A_j(w); |A_j| * w^(mu_j/rho_j) is independent of w."""
    if omega <= 0.0:
        raise DomainError("omega must be positive")
    mu, rho = frame.mu, frame.rho
    ph = np.exp(1j * omega * float(phase.psi(frame.endpoint)))
    return complex(ph * frame.k_at_zero * theta(frame.side, rho, mu)
                   * omega ** (-mu / rho))


def _zero_crossing_edges(f, s_end, n_scan=512):
    """Panel edges at sign changes of Re f and Im f on (0, s_end]."""
    grid = np.linspace(s_end / n_scan, s_end, n_scan)
    vals = f(grid)
    edges = set()
    for comp in (np.real(vals), np.imag(vals)):
        flips = np.nonzero(np.sign(comp[:-1]) * np.sign(comp[1:]) < 0)[0]
        for i in flips:
            edges.add(0.5 * (grid[i] + grid[i + 1]))
    return sorted(edges)


def weighted_kprime_integral(frame: SubstitutionFrame, exponent: float,
                             rel_tol: float = 1e-8) -> float:
    """int_0^{s_end} s^exponent |k'(s)| ds with exponent in (-1, 0].

    Gauss-Jacobi absorbs the weight on a first panel [0, s_end/8]; the rest
    is adaptive Gauss with panel edges at detected zero crossings of
    Re k' / Im k' (|k'| loses smoothness where k' passes through zero).
    Results are memoised on the frame.
    """
    key = ("wk", exponent, rel_tol)
    if key in frame.cache:
        return frame.cache[key]
    if not -1.0 < exponent <= 0.0:
        raise DomainError("weight exponent must lie in (-1, 0]")
    geo = frame.geometry
    s_end = frame.s_end
    crossings = _zero_crossing_edges(geo.k_prime, s_end)
    a0 = s_end / 8.0
    if crossings and crossings[0] < a0:
        a0 = 0.8 * crossings[0]    # keep |k'| smooth on the Jacobi panel

    def head_val(n):
        v, w = jacobi_nodes_01(n, exponent)
        s = a0 * v
        return a0 ** (exponent + 1.0) * float(np.abs(geo.k_prime(s)) @ w)

    head, head_ref = head_val(40), head_val(80)
    head_err = abs(head - head_ref)
    head = head_ref

    def f(s):
        return np.abs(geo.k_prime(s)) * s ** exponent + 0j

    edges = [a0] + [e for e in crossings if e > a0] + [s_end]
    edges = np.unique(np.asarray(edges))
    refined = np.unique(np.concatenate([
        np.linspace(edges[i], edges[i + 1], 5) for i in range(edges.size - 1)]))
    tail, tail_err, _ = adaptive_complex(f, refined, rel_tol,
                                         abs_floor=rel_tol * head)
    total = head + float(tail.real)
    if head_err + tail_err > 10.0 * rel_tol * max(total, 1e-300):
        raise DomainError(
            f"weighted k' quadrature stuck at error {head_err + tail_err:.2e}")
    frame.cache[key] = total
    return total


def remainder_bound_r1(frame: SubstitutionFrame, omega: float,
                       config: ExpansionConfig | None = None) -> float:
    """Certified bound for the remainder driven by k' (R1 of the side).

    For mu < 1: Gamma(1/rho)/rho * int s^(mu-1)|k'| ds * w^(-1/rho).
    For mu = 1 (requires rho >= 2 and a config): L * int s^(-gamma)|k'| ds
    * w^(-delta), delta = (gamma+1)/rho -- non-certified prefactor.
    """
    if omega <= 0.0:
        raise DomainError("omega must be positive")
    mu, rho = frame.mu, frame.rho
    if mu < 1.0:
        integral = weighted_kprime_integral(frame, mu - 1.0)
        return gamma_pos(1.0 / rho) / rho * integral * omega ** (-1.0 / rho)
    if rho < 2.0:
        raise DomainError("mu = 1 branch requires rho >= 2")
    if config is None:
        raise DomainError("mu = 1 branch requires an ExpansionConfig")
    delta = config.delta_for(rho)
    integral = weighted_kprime_integral(frame, -config.gamma)
    return config.L_const * integral * omega ** (-delta)


def remainder_bound_r2(frame: SubstitutionFrame, amp: SingularAmplitude,
                       phase: PhaseModel, omega: float) -> float:
    """Certified closed-form bound for the cutting-point remainder."""
    if omega <= 0.0:
        raise DomainError("omega must be positive")
    mu, rho = frame.mu, frame.rho
    q = frame.q
    u_q = abs(amp.value(q))
    dphi_q = abs(frame.geometry.phi_prime(q))
    return ((rho - mu) / rho * gamma_pos(1.0 / rho) * u_q / dphi_q
            * frame.s_end ** (-rho) * omega ** (-(1.0 + 1.0 / rho)))


def expand_integral(phase: PhaseModel, amp: SingularAmplitude, q: float,
                    config: ExpansionConfig, omega: float) -> ExpansionResult:
    """Both leading terms A_1, A_2 and the four remainder bounds at cut q.

    Requires 0 < mu_j < 1 (fully explicit branch) or mu_j = 1 with
    rho_j >= 2 (flagged non-certified R1).
    """
    if omega <= 0.0:
        raise DomainError("omega must be positive")
    for side in (1, 2):
        mu = amp.mu1 if side == 1 else amp.mu2
        rho = phase.rho(side)
        if mu == 1.0 and rho < 2.0:
            raise DomainError(
                f"side {side}: mu = 1 with rho < 2 is outside the expansion's scope")
    leading = []
    bounds = []
    for side in (1, 2):
        frame = build_frame(phase, amp, side, q)
        mu, rho = frame.mu, frame.rho
        a = leading_term(frame, phase, omega)
        leading.append((a * omega ** (mu / rho), -mu / rho))
        r1 = remainder_bound_r1(frame, omega, config)
        if mu < 1.0:
            r1_exp = 1.0 / rho
            r1_flag = False
        else:
            r1_exp = config.delta_for(rho)
            r1_flag = True
        bounds.append(PowerTerm(coeff=r1 * omega ** r1_exp, omega_exp=r1_exp,
                                origin=f"r1_side{side}", non_certified=r1_flag))
        r2 = remainder_bound_r2(frame, amp, phase, omega)
        r2_exp = 1.0 + 1.0 / rho
        bounds.append(PowerTerm(coeff=r2 * omega ** r2_exp, omega_exp=r2_exp,
                                origin=f"r2_side{side}"))
    return ExpansionResult(leading=tuple(leading), bound_terms=tuple(bounds),
                           q_used=float(q), config=config, omega=float(omega))


def check_rate_ordering(result: ExpansionResult, phase: PhaseModel,
                        amp: SingularAmplitude) -> bool:
    """Remainder rates must be strictly faster than the matching side's
    leading rate: omega_exp(bound) >= 1/rho_j > mu_j/rho_j when mu_j < 1."""
    for side in (1, 2):
        mu = amp.mu1 if side == 1 else amp.mu2
        rho = phase.rho(side)
        lead = -mu / rho
        for bt in result.bound_terms:
            if bt.origin.endswith(f"side{side}") and not bt.non_certified:
                if not -bt.omega_exp < lead:
                    return False
    return True
