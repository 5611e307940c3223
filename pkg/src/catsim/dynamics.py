"""Master-equation integration.

The right-hand side -i[H(t), rho] + sum_k gamma_k (c rho c^dag - {c^dag c, rho}/2)
is evaluated matrix-free with sparse operators acting on a dense rho, so the
memory cost stays at one d x d matrix even for bimodal spaces. Time-dependent
drive phases are evaluated exactly at every stage time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853, RK45

from .fock import DensityMatrix, FockSpace, Operator


class IntegrationError(RuntimeError):
    """Step-size underflow, solver failure, or step budget exhausted."""


class PhysicalityError(RuntimeError):
    """A density-matrix invariant drifted beyond tolerance during evolution."""


@dataclass(frozen=True)
class LindbladTerm:
    rate: float
    collapse: Operator

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("Lindblad rates must be non-negative")


@dataclass
class ModelSpec:
    """A master equation: static Hamiltonian, oscillating drive terms
    (amplitude * e^{i w t} * op + h.c.), and dissipators."""

    space: FockSpace
    h_static: Operator = None
    h_drive_terms: list = field(default_factory=list)
    lindblad_terms: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.h_static is not None:
            if self.h_static.space != self.space:
                raise ValueError("h_static lives on the wrong space")
            m = self.h_static.matrix
            res = abs(m - m.conj().T)
            scale = abs(m).max() if m.nnz else 0.0
            if scale and res.nnz and res.max() > 1e-10 * scale:
                raise ValueError("h_static is not Hermitian")
        for op, _, _ in self.h_drive_terms:
            if op.space != self.space:
                raise ValueError("drive operator lives on the wrong space")
        for term in self.lindblad_terms:
            if term.collapse.space != self.space:
                raise ValueError("collapse operator lives on the wrong space")

    def h_dense(self, t: float) -> np.ndarray:
        """Full Hamiltonian matrix at time t (dense; for inspection/tests)."""
        d = self.space.size
        h = np.zeros((d, d), dtype=complex)
        if self.h_static is not None:
            h += self.h_static.to_dense()
        for op, amp, w in self.h_drive_terms:
            block = (complex(amp) * np.exp(1j * w * t)) * op.to_dense()
            h += block + block.conj().T
        return h


@dataclass
class TimeSeriesRecord:
    times: np.ndarray
    observables: dict
    snapshots: list = field(default_factory=list)
    final_state: DensityMatrix = None
    n_steps: int = 0


class _Rhs:
    """Precompiled sparse kernel for one ModelSpec."""

    def __init__(self, model: ModelSpec):
        self.d = model.space.size
        self.h0 = model.h_static.matrix if model.h_static is not None else None
        self.drives = [
            (op.matrix, complex(amp), float(w), op.matrix.conj().T.tocsr())
            for op, amp, w in model.h_drive_terms
        ]
        self.collapses = []
        a_tot = None
        for term in model.lindblad_terms:
            if term.rate == 0:
                continue
            c = term.collapse.matrix
            self.collapses.append((term.rate, c, c.conj().tocsr()))
            cdc = (c.conj().T @ c).tocsr()
            a_tot = term.rate * cdc if a_tot is None else a_tot + term.rate * cdc
        self.a_tot = a_tot
        self.a_tot_t = a_tot.T.tocsr() if a_tot is not None else None

    def h_at(self, t: float):
        h = self.h0
        for m, amp, w, mdag in self.drives:
            ph = amp * np.exp(1j * w * t)
            block = ph * m + np.conj(ph) * mdag
            h = block if h is None else h + block
        return h

    def apply(self, t: float, rho: np.ndarray) -> np.ndarray:
        h = self.h_at(t)
        if h is not None:
            out = -1j * (h @ rho - (h.T @ rho.T).T)
        else:
            out = np.zeros_like(rho)
        for rate, c, c_conj in self.collapses:
            out += rate * (c @ (c_conj @ rho.T).T)  # c rho c^dag
        if self.a_tot is not None:
            out -= 0.5 * (self.a_tot @ rho + (self.a_tot_t @ rho.T).T)
        return out

    def __call__(self, t, y):
        return self.apply(t, y.reshape(self.d, self.d)).ravel()


def liouvillian_apply(model: ModelSpec, t: float, rho) -> np.ndarray:
    """d(rho)/dt for the given model; returns a dense matrix."""
    elements = rho.elements if isinstance(rho, DensityMatrix) else np.asarray(rho, complex)
    if elements.shape != (model.space.size, model.space.size):
        raise ValueError("state shape does not match model space")
    return _Rhs(model).apply(float(t), elements)


_SOLVERS = {"RK45": RK45, "DOP853": DOP853}


def _validate_times(name, ts, t_end):
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts.size and (np.any(np.diff(ts) <= 0)):
        raise ValueError(f"{name} must be strictly increasing")
    if ts.size and (ts[0] < 0 or ts[-1] > t_end * (1 + 1e-12)):
        raise ValueError(f"{name} must lie within [0, t_end]")
    return ts


def evolve(
    model: ModelSpec,
    rho0: DensityMatrix,
    t_end: float,
    sample_times=None,
    observables=None,
    snapshot_times=None,
    *,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    method: str = "RK45",
    max_steps: int = 2_000_000,
    max_step: float = np.inf,
    first_step: float = None,
) -> TimeSeriesRecord:
    """Integrate the master equation, recording observables at sample times.

    Observables are named Operators (expectation recorded) or callables
    receiving the DensityMatrix. Hermiticity is restored by projection after
    every accepted step; trace is monitored, never renormalized.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if rho0.space != model.space:
        raise ValueError("initial state lives on the wrong space")
    if method not in _SOLVERS:
        raise ValueError(f"unknown method {method!r}")
    obs = observables if observables is not None else {}
    samples = _validate_times("sample_times", sample_times if sample_times is not None else [t_end], t_end)
    snaps = _validate_times("snapshot_times", snapshot_times if snapshot_times is not None else [], t_end)

    events = sorted(set(samples.tolist()) | set(snaps.tolist()))
    sample_set, snap_set = set(samples.tolist()), set(snaps.tolist())

    d = model.space.size
    rhs = _Rhs(model)
    times_out, series = [], {k: [] for k in obs}
    snapshots = []

    def record(t, rho_m):
        state = DensityMatrix(model.space, rho_m)
        tr = state.trace()
        if abs(tr - 1.0) > 1e-6:
            raise PhysicalityError(f"trace drifted to {tr:.8f} at t = {t:.6g}")
        if t in sample_set:
            times_out.append(t)
            for k, ob in obs.items():
                series[k].append(state.expectation(ob) if isinstance(ob, Operator) else ob(state))
        if t in snap_set:
            snapshots.append((t, DensityMatrix(model.space, rho_m.copy())))

    idx = 0
    while idx < len(events) and events[idx] <= 0.0:
        record(events[idx], rho0.elements.astype(complex))
        idx += 1

    solver = _SOLVERS[method](
        rhs,
        0.0,
        rho0.elements.astype(complex).ravel(),
        t_bound=float(t_end),
        rtol=rtol,
        atol=atol,
        max_step=max_step,
        first_step=first_step,
    )
    n_steps = 0
    while solver.status == "running":
        if n_steps >= max_steps:
            raise IntegrationError(
                f"step budget {max_steps} exhausted at t = {solver.t:.6g} of {t_end:.6g}"
            )
        solver.step()
        n_steps += 1
        if solver.status == "failed":
            raise IntegrationError(f"integrator failed at t = {solver.t:.6g}")
        rho = solver.y.reshape(d, d)
        rho = 0.5 * (rho + rho.conj().T)
        solver.y = rho.ravel()
        if idx < len(events) and events[idx] <= solver.t:
            dense = solver.dense_output()
            while idx < len(events) and events[idx] <= solver.t:
                y_s = dense(events[idx]).reshape(d, d)
                record(events[idx], 0.5 * (y_s + y_s.conj().T))
                idx += 1

    final = DensityMatrix(model.space, solver.y.reshape(d, d).copy())
    if abs(final.trace() - 1.0) > 1e-6:
        raise PhysicalityError(f"final trace {final.trace():.8f}")

    return TimeSeriesRecord(
        times=np.asarray(times_out, dtype=float),
        observables={k: np.asarray(v) for k, v in series.items()},
        snapshots=snapshots,
        final_state=final,
        n_steps=n_steps,
    )


def steady_state_detect(record: TimeSeriesRecord, window: float, tol: float):
    """First time at which every observable's trailing-window variation has
    shrunk below tol times its full-range variation. Returns (found, time)."""
    times = np.asarray(record.times, dtype=float)
    if times.size < 3 or times[-1] - times[0] < 2.0 * window:
        raise ValueError("record must span at least twice the window")
    series = {k: np.asarray(v).real for k, v in record.observables.items()}
    full = {k: v.max() - v.min() for k, v in series.items()}
    start = int(np.searchsorted(times, times[0] + window))
    for i in range(start, times.size):
        j = int(np.searchsorted(times, times[i] - window))
        if all((s[j : i + 1].max() - s[j : i + 1].min()) <= tol * full[k] for k, s in series.items()):
            return True, float(times[i])
    return False, math.nan
