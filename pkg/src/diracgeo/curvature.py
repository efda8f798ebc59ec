"""Levi-Civita data: Christoffel symbols, curvature tensors, derived identities.

Conventions (all verified against frozen unit-value tests):
  Gamma[k, i, j]      = Gamma^k_ij (symmetric in i, j)
  dGamma[l, k, i, j]  = d_l Gamma^k_ij
  riemann[i, j, k, l] = <dx_i-component of [nabla_k, nabla_l] dx^j>
                      = d_l Gamma^j_ki - d_k Gamma^j_li
                        + Gamma^j_lm Gamma^m_ki - Gamma^j_km Gamma^m_li
  lowered[i, j, k, l] = g_jm riemann[i, m, k, l]   (the all-lower tensor)
  ricci_ij = g^km lowered[m, i, k, j];  scalar = g^ij ricci_ij
so the unit 2-sphere has scalar +2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import MetricJet
from .clifford import CLIFFORD, BilinearForm, MultivectorElement, clifford_product


def christoffel(mj: MetricJet) -> np.ndarray:
    dg = mj.dg
    n = mj.n
    out = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                s = 0.0
                for l in range(n):
                    s += mj.g_inv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                out[k, i, j] = 0.5 * s
    return out


def dchristoffel(mj: MetricJet) -> np.ndarray:
    n = mj.n
    dg, d2g = mj.dg, mj.d2g
    out = np.zeros((n, n, n, n))
    for m in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    s = 0.0
                    for l in range(n):
                        s += mj.dg_inv[m, k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                        s += mj.g_inv[k, l] * (d2g[m, i, j, l] + d2g[m, j, i, l] - d2g[m, l, i, j])
                    out[m, k, i, j] = 0.5 * s
    return out


def riemann(gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    n = gamma.shape[0]
    r = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    s = dgamma[l, j, k, i] - dgamma[k, j, l, i]
                    for m in range(n):
                        s += gamma[j, l, m] * gamma[m, k, i] - gamma[j, k, m] * gamma[m, l, i]
                    r[i, j, k, l] = s
    return r


def lowered_riemann(mj: MetricJet, riem: np.ndarray) -> np.ndarray:
    return np.einsum("jm,imkl->ijkl", mj.g, riem)


def ricci_and_scalar(mj: MetricJet, low: np.ndarray):
    ric = np.einsum("km,mikj->ij", mj.g_inv, low)
    scal = float(np.einsum("ij,ij->", mj.g_inv, ric))
    return ric, scal


@dataclass
class CurvatureData:
    """Everything Levi-Civita at one point."""

    mj: MetricJet
    christoffel: np.ndarray
    dchristoffel: np.ndarray
    riemann: np.ndarray
    lowered: np.ndarray
    ricci: np.ndarray
    scalar: float


def curvature_data(mj: MetricJet) -> CurvatureData:
    gamma = christoffel(mj)
    dgamma = dchristoffel(mj)
    riem = riemann(gamma, dgamma)
    low = lowered_riemann(mj, riem)
    ric, scal = ricci_and_scalar(mj, low)
    return CurvatureData(mj, gamma, dgamma, riem, low, ric, scal)


# ---------------------------------------------------------------------------
# first-order operations on fields evaluated at a point
# ---------------------------------------------------------------------------


def gradient(mj: MetricJet, df: np.ndarray) -> np.ndarray:
    """Components of grad f from the differential df_i = d_i f."""
    return mj.g_inv @ np.asarray(df)


def divergence_via_density(mj: MetricJet, x_val: np.ndarray, dx_val: np.ndarray) -> complex:
    """div X = |g|^-1/2 d_i(|g|^1/2 X^i); dx_val[a, i] = d_a X^i."""
    s = complex(np.trace(dx_val))
    s += complex(np.asarray(x_val) @ mj.dh)
    return s


def divergence_via_connection(mj: MetricJet, gamma: np.ndarray,
                              x_val: np.ndarray, dx_val: np.ndarray) -> complex:
    """div X as the contraction iota(nabla X) = d_i X^i + Gamma^i_ia X^a."""
    s = complex(np.trace(dx_val))
    for i in range(mj.n):
        for a in range(mj.n):
            s += gamma[i, i, a] * x_val[a]
    return s


def volume_coefficient(mj: MetricJet, orientation: int = 1) -> float:
    """Coefficient of dx^1 ^ ... ^ dx^n in the metric volume form."""
    return orientation * mj.sqrt_abs_det


def log_det_identity_residual(mj: MetricJet, gamma: np.ndarray) -> float:
    """Max-norm residual of dh_i = Gamma^j_ij with h = log|det g|^(1/2)."""
    trace = np.einsum("jij->i", gamma)
    return float(np.max(np.abs(mj.dh - trace)))


# ---------------------------------------------------------------------------
# curvature two-form with values in the Clifford algebra
# ---------------------------------------------------------------------------


def curvature_two_form(mj: MetricJet, low: np.ndarray):
    """S_ij = -1/4 lowered[k, l, i, j] dx^k dx^l (Clifford products)."""
    n = mj.n
    b = BilinearForm(mj.g_inv)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = MultivectorElement.scalar(0.0, n, CLIFFORD, b)
            for k in range(n):
                for l in range(n):
                    c = low[k, l, i, j]
                    if c == 0.0:
                        continue
                    dk = MultivectorElement.blade([k], n, 1.0, CLIFFORD, b)
                    dl = MultivectorElement.blade([l], n, 1.0, CLIFFORD, b)
                    acc = acc + clifford_product(dk, dl) * (-0.25 * c)
            row.append(acc)
        out.append(row)
    return out


def curvature_two_form_residual(mj: MetricJet, cd: CurvatureData) -> float:
    """Check [S_ij, dx^k] = riemann[l, k, i, j] dx^l for every i, j, k."""
    n = mj.n
    b = BilinearForm(mj.g_inv)
    s = curvature_two_form(mj, cd.lowered)
    worst = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                dk = MultivectorElement.blade([k], n, 1.0, CLIFFORD, b)
                comm = clifford_product(s[i][j], dk) - clifford_product(dk, s[i][j])
                target = MultivectorElement(
                    n, {1 << l: cd.riemann[l, k, i, j] for l in range(n)}, CLIFFORD, b)
                worst = max(worst, (comm - target).norm())
    return worst
