"""Spinor modules, spin-c connections, and Dirac operators on Riemannian charts.

The spinor fiber is the exterior algebra of C^(n/2) with gamma matrices built
from creation/annihilation operators; coordinate gammas come from an
orthonormal frame, so everything reduces to the bundle machinery with
m = 2^(n/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .bundles import (DiracOperatorData, MatrixJet, ModuleSpec, SectionJet,
                      _generator_matrices, apply_dirac, canonical_laplacian,
                      dirac_square, quantize_blade)
from .charts import Chart, MetricJet, metric_jet
from .curvature import christoffel, dchristoffel, ricci_and_scalar, lowered_riemann, riemann
from .forms import PolyScalar
from .jets import SJet, jet_sqrt, seed_point


class SpinSignatureError(ValueError):
    """Frame construction is only available on Riemannian charts here."""


# ---------------------------------------------------------------------------
# orthonormal frames
# ---------------------------------------------------------------------------


def _sylvester_sqrt(g: np.ndarray, dg: np.ndarray, d2g: np.ndarray):
    """Jets of the symmetric square root S with S S = g (g positive definite).

    First and second derivatives solve S' S + S S' = g' in the eigenbasis.
    """
    n = g.shape[0]
    w, v = np.linalg.eigh(g)
    if np.min(w) <= 0:
        raise SpinSignatureError("metric is not positive definite at the point")
    sq = np.sqrt(w)
    denom = sq[:, None] + sq[None, :]
    s = (v * sq) @ v.T

    def solve(rhs: np.ndarray) -> np.ndarray:
        return v @ ((v.T @ rhs @ v) / denom) @ v.T

    ds = np.array([solve(dg[l]) for l in range(n)])
    dds = np.array([[solve(d2g[k, l] - ds[l] @ ds[k] - ds[k] @ ds[l])
                     for l in range(n)] for k in range(n)])
    return s, ds, dds


def _inverse_jets(s: np.ndarray, ds: np.ndarray, dds: np.ndarray):
    n = s.shape[0]
    si = np.linalg.inv(s)
    dsi = np.array([-si @ ds[l] @ si for l in range(n)])
    ddsi = np.array([[(-si @ dds[k, l] @ si
                       + si @ ds[k] @ si @ ds[l] @ si
                       + si @ ds[l] @ si @ ds[k] @ si)
                      for l in range(n)] for k in range(n)])
    return si, dsi, ddsi


@dataclass
class FrameField:
    """Coframe components co[k, i] = <d_k, e^i> and inverse inv[i, k] = <e_i, dx^k>."""

    chart: Chart
    x: np.ndarray
    co: MatrixJet
    inv: MatrixJet


def build_frame_from_metric(mj: MetricJet) -> FrameField:
    chart = mj.chart
    n = mj.n
    if chart.kind == "conformal" and chart.lam_fn is not None:
        lam = chart.lam_fn(seed_point(mj.x, order=2))
        if complex(lam.val).real <= 0:
            raise SpinSignatureError("conformal factor not positive at the point")
        ident = np.eye(n, dtype=complex)
        inv = MatrixJet(n, lam.val * ident,
                        np.einsum("l,ab->lab", lam.d.astype(complex), ident),
                        np.einsum("kl,ab->klab", lam.dd.astype(complex), ident))
        lin = 1.0 / lam
        co = MatrixJet(n, lin.val * ident,
                       np.einsum("l,ab->lab", lin.d.astype(complex), ident),
                       np.einsum("kl,ab->klab", lin.dd.astype(complex), ident))
        return FrameField(chart, mj.x, co, inv)
    if not chart.riemannian:
        raise SpinSignatureError(
            f"chart {chart.name!r} is indefinite; frames exist here only in the "
            f"conformal closed form")
    s, ds, dds = _sylvester_sqrt(mj.g, mj.dg, mj.d2g)
    si, dsi, ddsi = _inverse_jets(s, ds, dds)
    co = MatrixJet(n, s.astype(complex), ds.astype(complex), dds.astype(complex))
    inv = MatrixJet(n, si.astype(complex), dsi.astype(complex), ddsi.astype(complex))
    return FrameField(chart, mj.x, co, inv)


def build_frame(chart: Chart, x) -> FrameField:
    return build_frame_from_metric(metric_jet(chart, x))


def frame_invariant_residual(frame: FrameField, mj: MetricJet) -> float:
    """Orthonormality, duality, and inverse-metric reconstruction residuals."""
    co, inv = frame.co.val, frame.inv.val
    n = mj.n
    r1 = np.max(np.abs(co.T @ mj.g_inv @ co - np.eye(n)))
    r2 = np.max(np.abs(inv @ co - np.eye(n)))
    r3 = np.max(np.abs(inv.T @ inv - mj.g_inv))
    return float(max(r1, r2, r3))


# ---------------------------------------------------------------------------
# spinor module
# ---------------------------------------------------------------------------


@dataclass
class SpinModuleData:
    """Polarization gammas on the exterior algebra of C^(n/2)."""

    n: int
    dim: int
    gammas: List[np.ndarray]
    chirality: np.ndarray

    def positive_indices(self) -> List[int]:
        d = np.real(np.diag(self.chirality))
        return [i for i in range(self.dim) if d[i] > 0]

    def coordinate_gammas(self, frame: FrameField) -> List[MatrixJet]:
        """c(dx^k) = sum_i <e_i, dx^k> Gamma_i with jets from the frame."""
        n = self.n
        inv = frame.inv
        out = []
        for k in range(n):
            val = sum(inv.val[i, k] * self.gammas[i] for i in range(n))
            d = np.array([sum(inv.d[l, i, k] * self.gammas[i] for i in range(n))
                          for l in range(n)])
            dd = np.array([[sum(inv.dd[a, b, i, k] * self.gammas[i]
                                for i in range(n)) for b in range(n)]
                           for a in range(n)])
            out.append(MatrixJet(n, val, d, dd))
        return out


def spin_module_data(n: int) -> SpinModuleData:
    if n % 2:
        raise ValueError("spinor module needs even dimension")
    half = n // 2
    eps, cot = _generator_matrices(half)
    gammas = []
    for k in range(half):
        gammas.append(cot[k] - eps[k])
        gammas.append(1j * (cot[k] + eps[k]))
    dim = 1 << half
    chi = np.eye(dim, dtype=complex) * (-1.0) ** half
    for k in range(half):
        number = eps[k] @ cot[k]
        chi = chi @ (np.eye(dim) - 2.0 * number)
    return SpinModuleData(n, dim, gammas, chi)


def spin_module(n: int) -> ModuleSpec:
    """Bundle-level module spec whose gammas come from the metric square root."""
    smd = spin_module_data(n)

    def provider(mj: MetricJet) -> List[MatrixJet]:
        return smd.coordinate_gammas(build_frame_from_metric(mj))

    return ModuleSpec(smd.dim, smd.chirality, provider, name=f"spin{n}")


def twisted_spin_module(n: int, p: int) -> ModuleSpec:
    """Spinors tensored with a rank-p factor: gammas (x) identity."""
    smd = spin_module_data(n)
    ident = np.eye(p, dtype=complex)

    def provider(mj: MetricJet) -> List[MatrixJet]:
        base = smd.coordinate_gammas(build_frame_from_metric(mj))
        out = []
        for g in base:
            out.append(MatrixJet(g.n, np.kron(g.val, ident),
                                 np.array([np.kron(g.d[l], ident)
                                           for l in range(g.n)]),
                                 np.array([[np.kron(g.dd[a, b], ident)
                                            for b in range(g.n)]
                                           for a in range(g.n)])))
        return out

    return ModuleSpec(smd.dim * p, np.kron(smd.chirality, ident), provider,
                      name=f"spin{n}x{p}")


# ---------------------------------------------------------------------------
# spin connection
# ---------------------------------------------------------------------------


def frame_connection_coefficients(frame: FrameField, mj: MetricJet):
    """(e_j, nabla_{d_a} e_k) with first derivatives: (w0, dw0).

    w0[a, j, k] pairs the coordinate-direction derivative of e_k with e_j;
    antisymmetric in (j, k) by metric compatibility.
    """
    n = mj.n
    gamma = christoffel(mj)
    dgamma = dchristoffel(mj)
    inv = frame.inv
    gmat = MatrixJet(n, mj.g.astype(complex), mj.dg.astype(complex),
                     mj.d2g.astype(complex))
    ge = inv @ gmat  # ge[j, m] = <e_j, d_m> lowered
    nab = inv.d + np.einsum("kb,mab->akm", inv.val, gamma.astype(complex))
    w0 = np.einsum("akm,jm->ajk", nab, ge.val)
    dnab = (inv.dd.transpose(0, 1, 2, 3)
            + np.einsum("lkb,mab->lakm", inv.d, gamma.astype(complex))
            + np.einsum("kb,lmab->lakm", inv.val, dgamma.astype(complex)))
    dw0 = (np.einsum("lakm,jm->lajk", dnab, ge.val)
           + np.einsum("akm,ljm->lajk", nab, ge.d))
    return w0, dw0


def frame_direction_coefficients(frame: FrameField, w0: np.ndarray) -> np.ndarray:
    """(e_j, nabla_{e_i} e_k) = <e_i, dx^a> w0[a, j, k]."""
    return np.einsum("ia,ajk->ijk", frame.inv.val, w0)


@dataclass
class SpinConnectionData:
    """U(1) potential plus frame term: Omega_a = A_a/2 - w0[a,j,k] G_j G_k / 4."""

    a_pot: List[SJet]
    w0: np.ndarray
    dw0: np.ndarray
    omega: List[MatrixJet]


def build_spin_connection(frame: FrameField, smd: SpinModuleData, mj: MetricJet,
                          a_pot: Optional[List[SJet]] = None) -> SpinConnectionData:
    n = mj.n
    if a_pot is None:
        a_pot = [SJet.constant(0.0, n, order=2) for _ in range(n)]
    for a in a_pot:
        if abs(a.val.real) > 1e-12 or (a.d is not None
                                       and np.max(np.abs(a.d.real)) > 1e-12):
            raise ValueError("spin-c potential must be purely imaginary")
    w0, dw0 = frame_connection_coefficients(frame, mj)
    anti = float(np.max(np.abs(w0 + w0.transpose(0, 2, 1))))
    if anti > 1e-9:
        raise ValueError(f"frame coefficients not antisymmetric ({anti:.2e})")
    dim = smd.dim
    omega = []
    for a in range(n):
        val = 0.5 * a_pot[a].val * np.eye(dim, dtype=complex)
        d = np.array([0.5 * a_pot[a].d[l] * np.eye(dim, dtype=complex)
                      for l in range(n)])
        for j in range(n):
            for k in range(n):
                gg = smd.gammas[j] @ smd.gammas[k]
                val -= 0.25 * w0[a, j, k] * gg
                for l in range(n):
                    d[l] -= 0.25 * dw0[l, a, j, k] * gg
        omega.append(MatrixJet(n, val, d, None))
    return SpinConnectionData(a_pot, w0, dw0, omega)


# ---------------------------------------------------------------------------
# Dirac operators
# ---------------------------------------------------------------------------


def spin_dirac_operator(scd: SpinConnectionData, smd: SpinModuleData,
                        frame: FrameField, mj: MetricJet) -> DiracOperatorData:
    """Generic assembly c(dx^a)(partial_a + Omega_a) as bundle data."""
    gam = smd.coordinate_gammas(frame)
    zero = MatrixJet.zero(smd.dim, mj.n)
    return DiracOperatorData(np.asarray(mj.x, dtype=float), gam, scd.omega, zero,
                             smd.chirality)


def spin_dirac(scd: SpinConnectionData, smd: SpinModuleData, frame: FrameField,
               mj: MetricJet, j: SectionJet) -> np.ndarray:
    if j.d is None:
        raise ValueError("spin Dirac needs an order-1 section jet")
    return apply_dirac(spin_dirac_operator(scd, smd, frame, mj), j)


def spin_dirac_alpha(scd: SpinConnectionData, smd: SpinModuleData,
                     frame: FrameField, mj: MetricJet, j: SectionJet) -> np.ndarray:
    """Dual route: slash(d) + slash(A)/2 - q(2 alpha_1 + 3 alpha_3)/4.

    alpha_1 sums (e_j, nabla_{e_i} e_i-slot) over the frame; alpha_3 is the
    antisymmetrized cubic with (e_j, [e_i, e_k]) coefficients.
    """
    n = mj.n
    gam = smd.coordinate_gammas(frame)
    out = np.zeros(smd.dim, dtype=complex)
    for a in range(n):
        out += gam[a].val @ (j.d[a] + 0.5 * scd.a_pot[a].val * j.v)
    w = frame_direction_coefficients(frame, scd.w0)
    al1 = np.einsum("iji->j", w)
    q1 = sum(al1[jj] * smd.gammas[jj] for jj in range(n))
    wt = w - w.transpose(2, 1, 0)  # (e_j, [e_i, e_k]) by torsion freeness
    q3 = np.zeros((smd.dim, smd.dim), dtype=complex)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                coeff = 0.0
                for (p, q, r), sg in [((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1),
                                      ((b, a, c), -1), ((a, c, b), -1),
                                      ((c, b, a), -1)]:
                    coeff = coeff + sg * wt[p, q, r]
                coeff /= 6.0
                q3 += coeff * (smd.gammas[a] @ smd.gammas[b] @ smd.gammas[c])
    out -= 0.25 * ((2.0 * q1 + 3.0 * q3) @ j.v)
    return out


def conformal_dirac(chart: Chart, a_pot: List[SJet], smd: SpinModuleData,
                    j: SectionJet) -> np.ndarray:
    """Closed form L (slash(d) + slash(A)/2) L^{-1} with L^2 = lambda^(n-1)."""
    if chart.kind != "conformal" or chart.lam_fn is None:
        raise ValueError("conformal closed form needs a conformal chart")
    n = chart.n
    lam = chart.lam_fn(seed_point(j.x, order=2))
    if complex(lam.val).real <= 0:
        raise ValueError("conformal factor not positive at the point")
    biglam = jet_sqrt(lam) ** (n - 1)
    chi = j.scale_jet(1.0 / biglam)
    out = np.zeros(smd.dim, dtype=complex)
    for a in range(n):
        out += lam.val * (smd.gammas[a] @ (chi.d[a] + 0.5 * a_pot[a].val * chi.v))
    return biglam.val * out


# ---------------------------------------------------------------------------
# Lichnerowicz and chirality checks
# ---------------------------------------------------------------------------


def lichnerowicz_residual(scd: SpinConnectionData, smd: SpinModuleData,
                          frame: FrameField, mj: MetricJet,
                          j: SectionJet) -> float:
    """Norm of D_A^2 psi - (lap^S + r_M/4 + q(F)/2) psi, F = dA.

    Scaled by the larger of the two sides so the value is a relative error.
    """
    if j.dd is None:
        raise ValueError("Lichnerowicz test needs an order-2 section jet")
    D = spin_dirac_operator(scd, smd, frame, mj)
    lhs = dirac_square(D, j)
    gamma = christoffel(mj)
    rhs = canonical_laplacian(scd.omega, mj, j, gamma)
    low = lowered_riemann(mj, riemann(gamma, dchristoffel(mj)))
    _, scal = ricci_and_scalar(mj, low)
    rhs = rhs + 0.25 * scal * j.v
    n = mj.n
    qf = np.zeros((smd.dim, smd.dim), dtype=complex)
    for a in range(n):
        for b in range(a + 1, n):
            fab = scd.a_pot[b].d[a] - scd.a_pot[a].d[b]
            qf += fab * quantize_blade(D.gam, (1 << a) | (1 << b), n, smd.dim).val
    rhs = rhs + 0.5 * (qf @ j.v)
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def chirality_action_checks(smd: SpinModuleData, frame: FrameField,
                            mj: MetricJet,
                            scd: Optional[SpinConnectionData] = None) -> dict:
    """Anticommutation with coordinate gammas; connection commutes with chirality."""
    gam = smd.coordinate_gammas(frame)
    chi = smd.chirality
    r1 = max(float(np.max(np.abs(chi @ g.val + g.val @ chi))) for g in gam)
    if scd is None:
        scd = build_spin_connection(frame, smd, mj)
    r2 = max(float(np.max(np.abs(chi @ om.val - om.val @ chi)))
             for om in scd.omega)
    sq = float(np.max(np.abs(chi @ chi - np.eye(smd.dim))))
    return {"gamma_anticommutation": r1, "connection_commutation": r2,
            "chirality_squares_to_one": sq}


# ---------------------------------------------------------------------------
# potential builders
# ---------------------------------------------------------------------------


def imaginary_poly_potential(rng, n: int, degree: int = 2) -> List[PolyScalar]:
    """Random polynomial U(1) potential components, purely imaginary values."""
    out = []
    from .forms import _exponent_tuples

    for _ in range(n):
        terms = [(1j * rng.uniform(-1.0, 1.0), e)
                 for e in _exponent_tuples(n, degree)]
        out.append(PolyScalar(n, terms))
    return out
