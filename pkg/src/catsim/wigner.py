"""Wigner quasiprobability functions: numeric transform, closed forms, and
the phenomenological model for the achievable negativity.

Convention: W(x, p) with alpha = x + i p, normalized so that the vacuum peaks
at 2/pi and integrates to 1 over dx dp (quadrature variance 1/4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from .fock import CatSpec, DensityMatrix, StateVector

TWO_OVER_PI = 2.0 / math.pi

_trapz = getattr(np, "trapezoid", np.trapz)


# ---------------------------------------------------------------------------
# numeric transform


def _phi_columns(y: np.ndarray, k: int, n_max: int) -> np.ndarray:
    """phi_n^(k)(y) = sqrt(n!/(n+k)!) y^(k/2) e^(-y/2) L_n^k(y) for n < n_max.

    Row n holds phi_n^(k) over the flat y array. The upward three-term
    recurrence is stable for this weighted form (columns stay bounded).
    """
    out = np.empty((n_max, y.size))
    if k == 0:
        out[0] = np.exp(-0.5 * y)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            log0 = -0.5 * y + 0.5 * k * np.log(y) - 0.5 * gammaln(k + 1.0)
            out[0] = np.where(y > 0, np.exp(log0), 0.0)
    if n_max == 1:
        return out
    out[1] = (k + 1.0 - y) * out[0] / math.sqrt(k + 1.0)
    for n in range(1, n_max - 1):
        out[n + 1] = (
            (2.0 * n + k + 1.0 - y) * out[n]
            - math.sqrt(n * (n + k)) * out[n - 1]
        ) / math.sqrt((n + 1.0) * (n + 1.0 + k))
    return out


@dataclass
class WignerGrid:
    """Wigner function sampled on a rectangular grid.

    values[i, j] = W(x_axis[i], p_axis[j]).
    """

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        """Trapezoid integral over the grid; near 1 when the grid captures
        the state's support."""
        if len(self.x_axis) == 1 or len(self.p_axis) == 1:
            raise ValueError("integral needs a 2-d grid")
        return float(_trapz(_trapz(self.values, self.p_axis, axis=1), self.x_axis))


def default_axis(beta: float, n: int = 201) -> np.ndarray:
    """Symmetric quadrature axis wide enough for a cat of size |beta|."""
    half = 3.5 + abs(beta)
    return np.linspace(-half, half, n)


def wigner_numeric(rho, x_axis=None, p_axis=None) -> WignerGrid:
    """Wigner function of a single-mode state on an (x, p) grid.

    Fock-basis kernel: with alpha = r e^(i theta) and y = 4 r^2,

        W = (2/pi) sum_n (-1)^n [ rho_nn phi_n^(0)(y)
              + sum_{k>=1} 2 Re(e^{i k theta} rho_{n,n+k}) phi_n^(k)(y) ]

    one Laguerre recurrence per diagonal of rho. Diagonals that are zero to
    working precision are skipped.
    """
    if isinstance(rho, StateVector):
        rho = DensityMatrix.from_pure(rho)
    if len(rho.space.dims) != 1:
        raise ValueError("wigner_numeric expects a single-mode state; partial_trace first")
    m = np.asarray(rho.elements)
    dim = m.shape[0]
    if x_axis is None:
        x_axis = default_axis(0.0)
    x = np.asarray(x_axis, dtype=float)
    p = x.copy() if p_axis is None else np.asarray(p_axis, dtype=float)

    alpha = x[:, None] + 1j * p[None, :]
    theta = np.angle(alpha).ravel()
    y = 4.0 * (alpha.real**2 + alpha.imag**2).ravel()

    scale = float(np.abs(m).max())
    signs = (-1.0) ** np.arange(dim)
    w = np.zeros(y.size)
    for k in range(dim):
        diag = np.diagonal(m, offset=k)
        if scale > 0 and np.abs(diag).max() < 1e-14 * scale:
            continue
        phi = _phi_columns(y, k, dim - k)
        if k == 0:
            w += (signs[: dim - k] * diag.real) @ phi
        else:
            coeff = 2.0 * np.real(np.exp(1j * k * theta)[None, :] * diag[:, None])
            w += np.einsum("n,nq,nq->q", signs[: dim - k], coeff, phi)
    return WignerGrid(x_axis=x, p_axis=p, values=TWO_OVER_PI * w.reshape(x.size, p.size))


def _parabola_vertex(fm: float, f0: float, fp: float, x0: float, h: float):
    """Vertex of the parabola through three equally spaced samples, with the
    shift clamped to one grid cell. Returns (x_vertex, value_drop <= 0)."""
    denom = fm - 2.0 * f0 + fp
    if denom <= 0:
        return x0, 0.0
    shift = 0.5 * (fm - fp) / denom * h
    shift = min(max(shift, -h), h)
    drop = -0.125 * (fm - fp) ** 2 / denom
    return x0 + shift, drop


def negativity(grid_or_state, x_axis=None, p_axis=None):
    """Most negative Wigner value and its location: (w_min, (x, p)).

    Scans the grid and refines the minimum with a quadratic fit over the
    surrounding 3x3 patch, one parabola per axis (skipped on boundaries).
    Accuracy is limited by the grid spacing; for the default cat axes the
    refined value is good to a few 1e-4.
    """
    if isinstance(grid_or_state, WignerGrid):
        grid = grid_or_state
    else:
        grid = wigner_numeric(grid_or_state, x_axis, p_axis)
    vals = grid.values
    i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
    x, p = grid.x_axis, grid.p_axis
    x_best, p_best = float(x[i]), float(p[j])
    w_min = float(vals[i, j])

    if 0 < i < len(x) - 1:
        x_best, drop = _parabola_vertex(
            float(vals[i - 1, j]), float(vals[i, j]), float(vals[i + 1, j]),
            x_best, float(x[i + 1] - x[i]))
        w_min += drop
    if 0 < j < len(p) - 1:
        p_best, drop = _parabola_vertex(
            float(vals[i, j - 1]), float(vals[i, j]), float(vals[i, j + 1]),
            p_best, float(p[j + 1] - p[j]))
        w_min += drop
    return w_min, (x_best, p_best)


# ---------------------------------------------------------------------------
# closed forms


def _axes(x_axis, p_axis):
    x = np.asarray(x_axis, dtype=float)
    p = x.copy() if p_axis is None else np.asarray(p_axis, dtype=float)
    return x, p


def wigner_cat_analytic(spec: CatSpec, x_axis, p_axis=None) -> WignerGrid:
    """Exact Wigner function of an even or odd cat with real size beta:
    two lobe Gaussians at +/- beta plus an interference term at the origin
    oscillating along p at frequency 4 beta."""
    xv, pv = _axes(x_axis, p_axis)
    x, p = xv[:, None], pv[None, :]
    b = spec.beta
    sign = 1.0 if spec.parity == "even" else -1.0
    norm = 2.0 * (1.0 + sign * math.exp(-2.0 * b * b))
    env_p = np.exp(-2.0 * p**2)
    lobes = (np.exp(-2.0 * (x - b) ** 2) + np.exp(-2.0 * (x + b) ** 2)) * env_p
    fringe = 2.0 * sign * np.exp(-2.0 * x**2) * env_p * np.cos(4.0 * b * p)
    return WignerGrid(xv, pv, (2.0 / (math.pi * norm)) * (lobes + fringe))


@dataclass(frozen=True)
class DecoherenceSpec:
    """Cat of size beta under single-phonon damping Gamma1 with bath
    occupancy nth. xi(t) is the Gaussian width parameter in vacuum units;
    the fringe contrast decays at the rate 2 beta^2 Gamma1 (2 nth + 1) at
    short times."""

    beta: float
    parity: str
    Gamma1: float
    nth: float = 0.0

    def xi(self, t: float) -> float:
        return 2.0 * self.nth * (1.0 - math.exp(-self.Gamma1 * t)) + 1.0


def wigner_decohered(spec: DecoherenceSpec, t: float, x_axis, p_axis=None) -> WignerGrid:
    """Exact Wigner function of a cat evolved under linear damping.

    Lobes drift inward as beta e^(-Gamma1 t / 2) and broaden to width xi(t);
    the interference term keeps the same envelope with contrast
    exp[-2 beta^2 (1 - e^(-Gamma1 t)/xi)] and a compressed fringe frequency.
    """
    xv, pv = _axes(x_axis, p_axis)
    x, p = xv[:, None], pv[None, :]
    b = spec.beta
    sign = 1.0 if spec.parity == "even" else -1.0
    norm = 2.0 * (1.0 + sign * math.exp(-2.0 * b * b))
    u2 = math.exp(-spec.Gamma1 * t)
    bt = b * math.sqrt(u2)
    xi = spec.xi(t)
    pref = 2.0 / (math.pi * xi)
    lobes = np.exp(-2.0 * ((x - bt) ** 2 + p**2) / xi) + np.exp(
        -2.0 * ((x + bt) ** 2 + p**2) / xi
    )
    contrast = math.exp(-2.0 * b * b * (1.0 - u2 / xi))
    fringe = (
        2.0 * sign * contrast
        * np.exp(-2.0 * (x**2 + p**2) / xi)
        * np.cos(4.0 * bt * p / xi)
    )
    return WignerGrid(xv, pv, (pref / norm) * (lobes + fringe))


def wigner_mixture(beta: float, x_axis, p_axis=None) -> WignerGrid:
    """Incoherent 50/50 mixture of +/- beta coherent states (a fully
    decohered cat): two lobes, no interference, nowhere negative."""
    xv, pv = _axes(x_axis, p_axis)
    x, p = xv[:, None], pv[None, :]
    env_p = np.exp(-2.0 * p**2)
    w = (1.0 / math.pi) * (
        np.exp(-2.0 * (x - beta) ** 2) + np.exp(-2.0 * (x + beta) ** 2)
    ) * env_p
    return WignerGrid(xv, pv, w)


def wigner_approx_re(beta: float, Gamma1: float, Gamma2: float, t: float,
                     x_axis, p_axis=None) -> WignerGrid:
    """Transient shape for stabilization from vacuum.

    The lobe separation relaxes as beta_t = beta (1 - e^(-2 Gamma2 t)) while
    the fringe contrast decays as exp(-2 beta_t^2 Gamma1 t); captures the
    dip and fade of the negativity without integrating a master equation.
    """
    xv, pv = _axes(x_axis, p_axis)
    x, p = xv[:, None], pv[None, :]
    bt = beta * (1.0 - math.exp(-2.0 * Gamma2 * t))
    norm = 2.0 * (1.0 + math.exp(-2.0 * bt * bt))
    env_p = np.exp(-2.0 * p**2)
    lobes = (np.exp(-2.0 * (x - bt) ** 2) + np.exp(-2.0 * (x + bt) ** 2)) * env_p
    contrast = math.exp(-2.0 * bt * bt * Gamma1 * t)
    fringe = 2.0 * contrast * np.exp(-2.0 * x**2) * env_p * np.cos(4.0 * bt * p)
    return WignerGrid(xv, pv, (2.0 / (math.pi * norm)) * (lobes + fringe))


def ideal_cat_wmin(beta: float, parity: str = "even") -> float:
    """Deepest Wigner minimum of the ideal cat, from the closed form.

    For the even cat this is the first interference minimum on the x = 0
    line; for the odd cat it is exactly -2/pi at the origin.
    """
    if parity == "odd":
        return -TWO_OVER_PI
    b = float(beta)
    if b == 0.0:
        return 0.0
    norm = 2.0 * (1.0 + math.exp(-2.0 * b * b))
    pref = 4.0 / (math.pi * norm)

    def w_line(p):
        return pref * (math.exp(-2.0 * b * b) + math.cos(4.0 * b * p)) * math.exp(-2.0 * p * p)

    res = minimize_scalar(w_line, bounds=(0.0, math.pi / (2.0 * b)), method="bounded",
                          options={"xatol": 1e-13})
    return float(res.fun)


# ---------------------------------------------------------------------------
# phenomenological minimum model


@dataclass(frozen=True)
class WminModel:
    """Achievable Wigner minimum vs the coupling-to-linewidth ratio.

    ratio(g0k) = exp(-2 C beta^2 (2 g0k)^(-(2k+2))) multiplies the ideal cat
    minimum W_ideal, and the optimum occurs near
    t_min = (C / Gamma2) (Gamma1 / Gamma2)^k.
    """

    C: float = 1.0 / 3.0
    k: float = -0.25
    beta: float = 2.0
    W_ideal: float = -0.47585703706634286

    def ratio(self, g0_over_kappa: float) -> float:
        expo = 2.0 * self.C * self.beta**2 * (2.0 * g0_over_kappa) ** (-(2.0 * self.k + 2.0))
        return math.exp(-expo)

    def t_min(self, Gamma1: float, Gamma2: float) -> float:
        if Gamma1 <= 0 or Gamma2 <= 0:
            raise ValueError("rates must be positive")
        return (self.C / Gamma2) * (Gamma1 / Gamma2) ** self.k


def wmin_model(model: WminModel, g0_over_kappa: float) -> float:
    """Predicted best Wigner minimum at the given g0/kappa."""
    return model.W_ideal * model.ratio(g0_over_kappa)


def fit_C_k(points, beta: float = 2.0, W_ideal: float = -0.47585703706634286):
    """Recover (C, k) from measured (g0/kappa, w_min) pairs.

    Linearizes ln(-ln ratio) = ln(2 C beta^2) - (2k+2) ln(2 g0k) and solves
    by least squares. Points whose depth ratio falls outside (1e-6, 0.999)
    are dropped: both extremes blow up the log transform and carry no slope
    information. Returns (C, k, rms residual of the linearized fit).
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (g0_over_kappa, w_min) pairs")
    g = pts[:, 0]
    r = pts[:, 1] / W_ideal
    keep = (r > 1e-6) & (r < 0.999)
    g, r = g[keep], r[keep]
    if g.size < 4 or np.unique(g).size < 3:
        raise ValueError("need at least 4 usable points over 3 distinct g0/kappa values")
    yv = np.log(-np.log(r))
    xv = np.log(2.0 * g)
    A = np.vstack([np.ones_like(xv), -xv]).T
    (b0, slope), *_ = np.linalg.lstsq(A, yv, rcond=None)
    resid = float(np.sqrt(np.mean((A @ np.array([b0, slope]) - yv) ** 2)))
    C = math.exp(b0) / (2.0 * beta**2)
    k = (slope - 2.0) / 2.0
    return float(C), float(k), resid
