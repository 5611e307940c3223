"""Physical parameter sets, derived rate algebra, and master-equation builders.

Everything here works in angular frequency (rad/s). The pump phase is folded
into the complex amplitudes alpha, g1, g2; the drive amplitude is calibrated
so that the two-phonon drive eps2 sits on the +i axis, which pins the cat
lobes to the x axis of phase space.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fock import FockSpace, TruncationError, ladder, truncation_guard_dim
from .dynamics import LindbladTerm, ModelSpec

SIDEBAND_RESOLVED = "sideband-resolved"
NON_SIDEBAND_RESOLVED = "non-sideband-resolved"


class RegimeError(ValueError):
    """Parameters outside the validity domain of the requested model."""


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs. Frequencies/rates in rad/s, occupancies dimensionless."""

    g0: float
    omega_m: float
    Gamma: float
    kappa: float
    nbar_b: float
    n_p: float
    eps_d: complex = 0j
    nbar_a: float = 0.0
    Delta: float = None
    Delta_prime: float = None
    pump_phase: float = 0.0
    drive_phase: float = 0.0

    def __post_init__(self):
        if self.omega_m <= 0 or self.kappa <= 0:
            raise ValueError("omega_m and kappa must be positive")
        if self.g0 < 0 or self.Gamma < 0:
            raise ValueError("g0 and Gamma must be non-negative")
        if self.nbar_b < 0 or self.nbar_a < 0 or self.n_p < 0:
            raise ValueError("occupancies must be non-negative")


@dataclass(frozen=True)
class DerivedRates:
    alpha: complex
    g1: complex
    g2: complex
    eps2: complex
    Gamma1: float
    Gamma2: float
    K: float
    delta_w1: float
    delta_w2: float
    omega_m_dressed: float
    delta_wc: float
    Gamma_th: float
    Gamma_lin: float
    Gamma_ex: float
    Gamma_dec: float
    beta_de: float
    beta_kc: float
    regime: str


def _check_regime(p: SystemParams, regime: str):
    if regime not in (SIDEBAND_RESOLVED, NON_SIDEBAND_RESOLVED):
        raise ValueError(f"unknown regime {regime!r}")
    ratio = p.kappa / p.omega_m
    if regime == SIDEBAND_RESOLVED and ratio >= 0.1:
        warnings.warn(
            f"kappa/omega_m = {ratio:.3g} is not deeply sideband-resolved; "
            "derived rates may be inaccurate",
            UserWarning,
            stacklevel=3,
        )
    if regime == NON_SIDEBAND_RESOLVED and ratio <= 10.0:
        warnings.warn(
            f"kappa/omega_m = {ratio:.3g} is not deeply non-sideband-resolved; "
            "derived rates may be inaccurate",
            UserWarning,
            stacklevel=3,
        )


def derive_rates(p: SystemParams, regime: str = SIDEBAND_RESOLVED) -> DerivedRates:
    """All second-order coefficients of the engineered dissipation scheme."""
    _check_regime(p, regime)

    alpha = math.sqrt(p.n_p) * cmath.exp(1j * p.pump_phase)
    g1 = p.g0 * alpha
    g2 = p.g0**2 * alpha / p.omega_m
    eps_d = complex(p.eps_d) * cmath.exp(1j * p.drive_phase)
    eps2 = 2j * eps_d * np.conj(g2) / p.kappa

    g1_sq = abs(g1) ** 2
    g2_sq = abs(g2) ** 2
    if regime == SIDEBAND_RESOLVED:
        Gamma1 = g1_sq * p.kappa / p.omega_m**2
        Gamma2 = 4.0 * g2_sq / p.kappa
        K = g2_sq / (4.0 * p.omega_m)
        delta_w1 = -4.0 * g1_sq / (3.0 * p.omega_m)
        delta_w2 = (3.0 * p.g0 / (4.0 * p.omega_m)) ** 2 * delta_w1
    else:
        Gamma1 = 4.0 * g1_sq / p.kappa
        Gamma2 = (p.g0 / p.omega_m) ** 2 * Gamma1
        delta_w1 = -16.0 * g1_sq * p.omega_m / p.kappa**2
        delta_w2 = 3.0 * (p.g0 / p.omega_m) ** 2 * delta_w1
        K = 16.0 * p.omega_m * g2_sq / p.kappa**2

    Gamma_th = (p.nbar_b + 1.0) * p.Gamma
    Gamma_lin = Gamma_th + Gamma1
    Gamma_ex = p.nbar_b * p.Gamma + Gamma1 / 9.0
    beta_de = math.sqrt(abs(eps_d) / abs(g2)) if g2 != 0 else 0.0
    Gamma_dec = 2.0 * beta_de**2 * (Gamma_lin + Gamma_ex)
    beta_kc = math.sqrt(abs(eps2) / K) if K > 0 else 0.0

    return DerivedRates(
        alpha=alpha,
        g1=g1,
        g2=g2,
        eps2=eps2,
        Gamma1=Gamma1,
        Gamma2=Gamma2,
        K=K,
        delta_w1=delta_w1,
        delta_w2=delta_w2,
        omega_m_dressed=p.omega_m + delta_w1 + delta_w2,
        delta_wc=2.0 * p.g0**2 * p.n_p / p.omega_m,
        Gamma_th=Gamma_th,
        Gamma_lin=Gamma_lin,
        Gamma_ex=Gamma_ex,
        Gamma_dec=Gamma_dec,
        beta_de=beta_de,
        beta_kc=beta_kc,
        regime=regime,
    )


def drive_for_target_beta(p: SystemParams, beta_target: float) -> complex:
    """Drive amplitude that stabilizes a cat of the requested size.

    |eps_d| = beta^2 |g2|, with the phase arranged so that eps2 ends up
    purely imaginary positive (real positive cat amplitude).
    """
    alpha = math.sqrt(p.n_p) * cmath.exp(1j * p.pump_phase)
    g2 = p.g0**2 * alpha / p.omega_m
    if g2 == 0:
        raise ValueError("pump is off (g2 = 0); no two-phonon drive available")
    if beta_target == 0:
        return 0j
    return beta_target**2 * g2 * cmath.exp(-1j * p.drive_phase)


def kerr_cat_size(p: SystemParams) -> float:
    """Size of the cat the residual Kerr term alone would select."""
    r = derive_rates(p)
    if r.K == 0:
        raise ValueError("Kerr strength is zero for these parameters")
    return math.sqrt(abs(r.eps2) / r.K)


def build_toy_model(Gamma1: float, Gamma2: float, eps2: complex, nth: float = 0.0, dim: int = 35) -> ModelSpec:
    """Minimal stabilization model: squeezing drive, two-phonon loss, and a
    single-phonon thermal channel at base rate Gamma1."""
    if nth < 0:
        raise ValueError("nth must be non-negative")
    space = FockSpace((dim,), ("mech",))
    b = ladder(space, "mech")
    h = None
    if eps2 != 0:
        bd = b.dag()
        h = complex(eps2) * (bd @ bd) + np.conj(complex(eps2)) * (b @ b)
    terms = []
    if Gamma2 > 0:
        terms.append(LindbladTerm(Gamma2, b @ b))
    if Gamma1 > 0:
        terms.append(LindbladTerm(Gamma1 * (nth + 1.0), b))
        if nth > 0:
            terms.append(LindbladTerm(Gamma1 * nth, b.dag()))
    return ModelSpec(space=space, h_static=h, lindblad_terms=terms,
                     metadata={"kind": "toy"})


def build_reduced_model(p: SystemParams, dim: int = 35, drop_linear_damping: bool = False) -> ModelSpec:
    """Single-mode mechanical master equation after cavity elimination."""
    r = derive_rates(p, SIDEBAND_RESOLVED)
    gain_ratio = (p.kappa / (8.0 * p.omega_m)) ** 2
    if gain_ratio >= 1e-3:
        raise RegimeError(
            f"kappa/omega_m = {p.kappa / p.omega_m:.3g}: neglected incoherent "
            f"two-phonon gain ratio {gain_ratio:.2e} exceeds 1e-3"
        )
    if p.eps_d != 0 and dim < truncation_guard_dim(r.beta_de):
        raise TruncationError(
            f"dim {dim} below guard {truncation_guard_dim(r.beta_de)} for beta = {r.beta_de:.3g}"
        )
    space = FockSpace((dim,), ("mech",))
    b = ladder(space, "mech")
    bd = b.dag()
    num = bd @ b
    h = r.eps2 * (bd @ bd) + np.conj(r.eps2) * (b @ b) - r.K * (num @ num)
    terms = []
    if r.Gamma2 > 0:
        terms.append(LindbladTerm(r.Gamma2, b @ b))
    if not drop_linear_damping:
        if r.Gamma_lin > 0:
            terms.append(LindbladTerm(r.Gamma_lin, b))
        if r.Gamma_ex > 0:
            terms.append(LindbladTerm(r.Gamma_ex, bd))
    return ModelSpec(
        space=space,
        h_static=h,
        lindblad_terms=terms,
        metadata={"kind": "reduced", "two_phonon_gain_ratio": gain_ratio, "rates": r},
    )


def build_full_model(p: SystemParams, dims=(6, 35), interaction_picture: bool = False) -> ModelSpec:
    """Two-mode optomechanical master equation in the displaced pump frame.

    With interaction_picture=True the fast rotations at the detuning and the
    dressed mechanical frequency are moved into the drive phases; occupation
    and parity observables are unaffected, and the stabilized cat is
    stationary in this frame.
    """
    r = derive_rates(p, SIDEBAND_RESOLVED)
    na, nb = int(dims[0]), int(dims[1])
    if na < 5:
        raise TruncationError("cavity dimension below 5 cannot resolve the displaced-frame dynamics")
    if p.eps_d != 0 and nb < truncation_guard_dim(r.beta_de):
        raise TruncationError(
            f"mech dim {nb} below guard {truncation_guard_dim(r.beta_de)} for beta = {r.beta_de:.3g}"
        )
    delta = p.Delta if p.Delta is not None else -2.0 * r.omega_m_dressed
    delta_p = p.Delta_prime if p.Delta_prime is not None else -2.0 * r.omega_m_dressed
    eps_d = complex(p.eps_d) * cmath.exp(1j * p.drive_phase)

    space = FockSpace((na, nb), ("cavity", "mech"))
    a = ladder(space, "cavity")
    b = ladder(space, "mech")
    ad, bd = a.dag(), b.dag()
    n_a = ad @ a
    drive_terms = []

    if not interaction_picture:
        bx = b + bd
        h = (-delta) * n_a + p.omega_m * (bd @ b)
        if r.g1 != 0:
            h = h + (np.conj(r.g1) * a + r.g1 * ad) @ bx
        if p.g0 > 0:
            h = h + p.g0 * (n_a @ bx)
        if eps_d != 0:
            drive_terms.append((ad, eps_d, delta_p))
    else:
        wt = r.omega_m_dressed
        h = (p.omega_m - wt) * (bd @ b)
        if r.g1 != 0:
            drive_terms.append((a @ b, np.conj(r.g1), delta - wt))
            drive_terms.append((a @ bd, np.conj(r.g1), delta + wt))
        if p.g0 > 0:
            drive_terms.append((n_a @ b, complex(p.g0), -wt))
        if eps_d != 0:
            drive_terms.append((ad, eps_d, delta_p - delta))

    terms = []
    if p.kappa > 0:
        terms.append(LindbladTerm(p.kappa * (p.nbar_a + 1.0), a))
        if p.nbar_a > 0:
            terms.append(LindbladTerm(p.kappa * p.nbar_a, ad))
    if p.Gamma > 0:
        terms.append(LindbladTerm(p.Gamma * (p.nbar_b + 1.0), b))
        if p.nbar_b > 0:
            terms.append(LindbladTerm(p.Gamma * p.nbar_b, bd))

    return ModelSpec(
        space=space,
        h_static=h,
        h_drive_terms=drive_terms,
        lindblad_terms=terms,
        metadata={
            "kind": "full",
            "frame": "interaction" if interaction_picture else "pump",
            "rates": r,
            "dims": (na, nb),
        },
    )
