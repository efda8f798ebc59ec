"""Jet-valued differential forms and first-order operators on them.

A FormJet holds, per blade bitmask, a coefficient jet of order 0, 1 or 2
at a fixed point. Every operator here consumes jet orders instead of
discretizing: applying a first-order operator to an order-k input yields
an order-(k-1) output with no truncation error, so composite identities
(d^2 = 0, Cartan relations, dual-route coderivatives) hold to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _iterproduct
from typing import Dict, List, Sequence

import numpy as np

from .charts import MetricJet
from .clifford import (blade_indices, dict_contract_weights, dict_epsilon_gen,
                       dict_sum, dict_wedge, reorder_sign)
from .jets import SJet, jet_det


class JetOrderError(ValueError):
    """An operator needed more derivative orders than the jet carries."""


class DegreeError(ValueError):
    """Operation requires a degree-homogeneous form."""


# ---------------------------------------------------------------------------
# core containers
# ---------------------------------------------------------------------------


@dataclass
class VectorJet:
    """Vector field jet: components X^i as scalar jets at a common point."""

    n: int
    x: np.ndarray
    comps: List[SJet]

    @property
    def order(self) -> int:
        return min(c.order for c in self.comps)

    def values(self) -> np.ndarray:
        return np.array([c.val for c in self.comps])


@dataclass
class FormJet:
    """Differential form jet: blade bitmask -> coefficient jet."""

    n: int
    x: np.ndarray
    coeffs: Dict[int, SJet]
    chart: str = ""

    def __post_init__(self):
        for m in self.coeffs:
            if not 0 <= m < (1 << self.n):
                raise ValueError(f"blade mask {m} out of range for n={self.n}")

    @property
    def order(self) -> int:
        if not self.coeffs:
            return 2
        return min(c.order for c in self.coeffs.values())

    def degrees(self) -> set:
        return {bin(m).count("1") for m, c in self.coeffs.items()}

    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) > 1:
            raise DegreeError(f"mixed degrees {sorted(degs)}")
        return degs.pop() if degs else 0

    def coefficient(self, indices: Sequence[int]) -> complex:
        mask = 0
        for i in indices:
            mask |= 1 << i
        c = self.coeffs.get(mask)
        return complex(c.val) if c is not None else 0.0j

    def values(self) -> Dict[int, complex]:
        return {m: complex(c.val) for m, c in self.coeffs.items()}

    def norm(self) -> float:
        """Euclidean norm of the pointwise coefficient vector."""
        return float(np.sqrt(sum(abs(c.val) ** 2 for c in self.coeffs.values())))

    def grade_part(self, p: int) -> "FormJet":
        keep = {m: c for m, c in self.coeffs.items() if bin(m).count("1") == p}
        return FormJet(self.n, self.x, keep, self.chart)

    def conj(self) -> "FormJet":
        return FormJet(self.n, self.x, {m: c.conj() for m, c in self.coeffs.items()},
                       self.chart)

    def _compat(self, other: "FormJet") -> None:
        if self.n != other.n or not np.array_equal(self.x, other.x):
            raise ValueError("form jets live at different points")

    def __add__(self, other: "FormJet") -> "FormJet":
        self._compat(other)
        return FormJet(self.n, self.x, dict_sum(self.coeffs, other.coeffs), self.chart)

    def __sub__(self, other: "FormJet") -> "FormJet":
        return self + other.scale(-1.0)

    def scale(self, s) -> "FormJet":
        return FormJet(self.n, self.x, {m: c * s for m, c in self.coeffs.items()},
                       self.chart)

    @staticmethod
    def zero(n: int, x, chart: str = "") -> "FormJet":
        return FormJet(n, np.asarray(x, dtype=float), {}, chart)


def wedge_forms(a: FormJet, b: FormJet) -> FormJet:
    a._compat(b)
    return FormJet(a.n, a.x, dict_wedge(a.coeffs, b.coeffs), a.chart)


# ---------------------------------------------------------------------------
# polynomial and trigonometric coefficient fields (test-section plumbing)
# ---------------------------------------------------------------------------


@dataclass
class PolyScalar:
    """Polynomial in chart coordinates: list of (coefficient, exponent tuple)."""

    n: int
    terms: List[tuple]

    def derivative(self, k: int) -> "PolyScalar":
        out = []
        for c, e in self.terms:
            if e[k] > 0:
                f = list(e)
                f[k] -= 1
                out.append((c * e[k], tuple(f)))
        return PolyScalar(self.n, out)

    def eval(self, x) -> complex:
        s = 0.0j
        for c, e in self.terms:
            t = c
            for i, p in enumerate(e):
                if p:
                    t = t * x[i] ** p
            s += t
        return s

    def eval_jet(self, x, order: int = 2) -> SJet:
        x = np.asarray(x, dtype=float)
        val = self.eval(x)
        d = dd = None
        if order >= 1:
            firsts = [self.derivative(k) for k in range(self.n)]
            d = np.array([p.eval(x) for p in firsts])
            if order >= 2:
                dd = np.array([[firsts[k].derivative(l).eval(x)
                                for l in range(self.n)] for k in range(self.n)])
        return SJet(self.n, val, d, dd)

    @staticmethod
    def constant(c, n: int) -> "PolyScalar":
        return PolyScalar(n, [(complex(c), (0,) * n)])


@dataclass
class TrigScalar:
    """Trigonometric polynomial sum_k c_k exp(i k.x) on the 2pi-periodic torus."""

    n: int
    modes: Dict[tuple, complex]

    def eval_jet(self, x, order: int = 2) -> SJet:
        x = np.asarray(x, dtype=float)
        val = 0.0j
        d = np.zeros(self.n, dtype=complex) if order >= 1 else None
        dd = np.zeros((self.n, self.n), dtype=complex) if order >= 2 else None
        for k, c in self.modes.items():
            kv = np.asarray(k, dtype=float)
            ph = c * np.exp(1j * float(kv @ x))
            val += ph
            if d is not None:
                d += 1j * kv * ph
            if dd is not None:
                dd += -np.outer(kv, kv) * ph
        return SJet(self.n, val, d, dd)

    def eval(self, x) -> complex:
        return self.eval_jet(x, order=0).val

    def hermitized(self) -> "TrigScalar":
        """Symmetrize modes so the field is real-valued."""
        out: Dict[tuple, complex] = {}
        for k, c in self.modes.items():
            mk = tuple(-i for i in k)
            out[k] = out.get(k, 0.0j) + 0.5 * c
            out[mk] = out.get(mk, 0.0j) + 0.5 * np.conj(c)
        return TrigScalar(self.n, out)


def _exponent_tuples(n: int, degree: int):
    for e in _iterproduct(range(degree + 1), repeat=n):
        if sum(e) <= degree:
            yield e


def random_poly_scalar(rng, n: int, degree: int = 2,
                       complex_coeffs: bool = False) -> PolyScalar:
    terms = []
    for e in _exponent_tuples(n, degree):
        c = rng.uniform(-1.0, 1.0)
        if complex_coeffs:
            c = c + 1j * rng.uniform(-1.0, 1.0)
        terms.append((complex(c), e))
    return PolyScalar(n, terms)


@dataclass
class PolyVectorField:
    n: int
    comps: List[PolyScalar]

    def eval(self, x, order: int = 2) -> VectorJet:
        x = np.asarray(x, dtype=float)
        return VectorJet(self.n, x, [p.eval_jet(x, order) for p in self.comps])


@dataclass
class PolynomialFormField:
    """Per-blade polynomial coefficients, evaluable to a FormJet of any order."""

    n: int
    blades: Dict[int, PolyScalar]

    def eval(self, x, order: int = 2, chart: str = "") -> FormJet:
        x = np.asarray(x, dtype=float)
        return FormJet(self.n, x,
                       {m: p.eval_jet(x, order) for m, p in self.blades.items()},
                       chart)


def random_poly_vector(rng, n: int, degree: int = 2) -> PolyVectorField:
    return PolyVectorField(n, [random_poly_scalar(rng, n, degree) for _ in range(n)])


def random_poly_form(rng, n: int, p: int, degree: int = 2,
                     complex_coeffs: bool = False) -> PolynomialFormField:
    blades = {}
    for m in range(1 << n):
        if bin(m).count("1") == p:
            blades[m] = random_poly_scalar(rng, n, degree, complex_coeffs)
    return PolynomialFormField(n, blades)


def random_trig_scalar(rng, n: int, band: int = 1, real: bool = True) -> TrigScalar:
    modes: Dict[tuple, complex] = {}
    for k in _iterproduct(range(-band, band + 1), repeat=n):
        c = rng.uniform(-1.0, 1.0) + 1j * rng.uniform(-1.0, 1.0)
        modes[k] = complex(c)
    t = TrigScalar(n, modes)
    return t.hermitized() if real else t


# ---------------------------------------------------------------------------
# metric-free operators: d, iota, wedge, Lie
# ---------------------------------------------------------------------------


def exterior_derivative(j: FormJet) -> FormJet:
    if j.coeffs and j.order < 1:
        raise JetOrderError("exterior derivative needs an order >= 1 jet")
    out: Dict[int, SJet] = {}
    for m, c in j.coeffs.items():
        for i in range(j.n):
            bit = 1 << i
            if m & bit:
                continue
            term = c.partial(i)
            s = reorder_sign(bit, m)
            key = m | bit
            add = term if s > 0 else -term
            out[key] = out[key] + add if key in out else add
    return FormJet(j.n, j.x, out, j.chart)


def iota_vector(X: VectorJet, j: FormJet) -> FormJet:
    """Interior product with the tautological pairing <dx^i, X> = X^i."""
    if not np.array_equal(X.x, j.x):
        raise ValueError("vector and form jets live at different points")
    return FormJet(j.n, j.x, dict_contract_weights(X.comps, j.coeffs), j.chart)


def lie_derivative(X: VectorJet, j: FormJet) -> FormJet:
    """Via d iota(X) + iota(X) d, the algebraic characterization of L_X."""
    return exterior_derivative(iota_vector(X, j)) + iota_vector(X, exterior_derivative(j))


def vector_bracket(X: VectorJet, Y: VectorJet) -> VectorJet:
    if not np.array_equal(X.x, Y.x):
        raise ValueError("vector jets live at different points")
    comps = []
    for i in range(X.n):
        acc = None
        for a in range(X.n):
            t = X.comps[a] * Y.comps[i].partial(a) - Y.comps[a] * X.comps[i].partial(a)
            acc = t if acc is None else acc + t
        comps.append(acc)
    return VectorJet(X.n, X.x, comps)


def pair_vector_form(X: VectorJet, v: FormJet) -> SJet:
    """<X, v> for a 1-form jet v."""
    if v.coeffs and v.degrees() != {1}:
        raise DegreeError("pairing defined against 1-forms")
    acc = SJet.constant(0.0, X.n, order=2)
    for m, c in v.coeffs.items():
        i = blade_indices(m)[0]
        acc = acc + X.comps[i] * c
    return acc


# ---------------------------------------------------------------------------
# metric-dependent pieces
# ---------------------------------------------------------------------------


def metric_inverse_jets(mj: MetricJet) -> list:
    """g^{ij} as order-2 scalar jets."""
    n = mj.n
    return [[SJet(n, mj.g_inv[i, j], mj.dg_inv[:, i, j].astype(complex),
                  mj.d2g_inv[:, :, i, j].astype(complex))
             for j in range(n)] for i in range(n)]


def sqrt_det_jet(mj: MetricJet) -> SJet:
    return SJet(mj.n, mj.sqrt_abs_det, mj.dsqrt.astype(complex),
                mj.ddsqrt.astype(complex))


def christoffel_jets(mj: MetricJet) -> np.ndarray:
    """Gamma^k_ij as order-1 jets, indexed [k, i, j]."""
    from .curvature import christoffel, dchristoffel

    gam = christoffel(mj)
    dgam = dchristoffel(mj)
    n = mj.n
    out = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                out[k, i, j] = SJet(n, complex(gam[k, i, j]),
                                    dgam[:, k, i, j].astype(complex), None)
    return out


def volume_form(mj: MetricJet, x, orientation: int = 1, chart: str = "") -> FormJet:
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    top = (1 << mj.n) - 1
    return FormJet(mj.n, np.asarray(x, dtype=float),
                   {top: sqrt_det_jet(mj) * float(orientation)}, chart)


def gram_pairing(a: FormJet, b: FormJet, mj: MetricJet) -> complex:
    """Sesquilinear pairing: blades of equal degree paired by det g^{i_a j_b}."""
    a._compat(b)
    ginv = mj.g_inv
    total = 0.0j
    for ma, ca in a.coeffs.items():
        for mb, cb in b.coeffs.items():
            ia, ib = blade_indices(ma), blade_indices(mb)
            if len(ia) != len(ib):
                continue
            if ia:
                gram = np.linalg.det(ginv[np.ix_(ia, ib)])
            else:
                gram = 1.0
            total += np.conj(complex(ca.val)) * complex(cb.val) * gram
    return total


def _perm_sign_sorted(j_list: List[int], m_list: List[int]) -> int:
    """Sign of the permutation (j_list, m_list) of 0..n-1, both halves sorted."""
    inv = 0
    for j in j_list:
        inv += sum(1 for m in m_list if m < j)
    return -1 if inv % 2 else 1


def hodge_star(j: FormJet, mj: MetricJet, orientation: int = 1) -> FormJet:
    """Antilinear star: conjugates coefficients, complements blades."""
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    n = mj.n
    ginv = metric_inverse_jets(mj)
    sd = sqrt_det_jet(mj)
    full = (1 << n) - 1
    out: Dict[int, SJet] = {}
    for m, c in j.coeffs.items():
        idx = blade_indices(m)
        k = len(idx)
        cconj = c.conj()
        # coefficient of each output blade M of degree n-k:
        #   sqrt|det g| * det(g^{-1}[rows idx, cols comp(M)]) * sign(perm(comp(M), M))
        for mm in range(1 << n):
            if bin(mm).count("1") != n - k:
                continue
            cols = blade_indices(full & ~mm)
            if k:
                minor = [[ginv[r][cc] for cc in cols] for r in idx]
                det = jet_det(minor)
            else:
                det = SJet.constant(1.0, n, order=2)
            sgn = _perm_sign_sorted(cols, blade_indices(mm))
            term = sd * det * float(orientation * sgn) * cconj
            out[mm] = out[mm] + term if mm in out else term
    return FormJet(n, j.x, out, j.chart)


def _det_sign(mj: MetricJet) -> int:
    return 1 if mj.det > 0 else -1


def coderivative_hodge(j: FormJet, mj: MetricJet, orientation: int = 1) -> FormJet:
    """d* = (-1)^(n(p+1)+1) sgn(det g) * d * on degree-p input."""
    if not j.coeffs:
        return FormJet(j.n, j.x, {}, j.chart)
    p = j.degree()
    n = mj.n
    sign = (-1) ** (n * (p + 1) + 1) * _det_sign(mj)
    return hodge_star(exterior_derivative(hodge_star(j, mj, orientation)),
                      mj, orientation).scale(float(sign))


def covariant_derivative(j: FormJet, mj: MetricJet, gamma=None) -> List[FormJet]:
    """Levi-Civita nabla_a of a form jet, one FormJet per direction a.

    Uses nabla dx^j = -Gamma^j_ik dx^i (x) dx^k on each blade factor.
    """
    if gamma is None:
        gamma = christoffel_jets(mj)
    n = j.n
    outs = []
    for a in range(n):
        acc: Dict[int, SJet] = {}
        for mask, c in j.coeffs.items():
            idx = blade_indices(mask)
            t = c.partial(a)
            acc[mask] = acc[mask] + t if mask in acc else t
            for pos, ip in enumerate(idx):
                rest = mask & ~(1 << ip)
                sgn_pos = -1 if pos % 2 else 1
                for m in range(n):
                    if (1 << m) & rest:
                        continue
                    g = gamma[ip, a, m]
                    term = g * c * (-1.0 * sgn_pos * reorder_sign(1 << m, rest))
                    key = rest | (1 << m)
                    acc[key] = acc[key] + term if key in acc else term
        outs.append(FormJet(n, j.x, acc, j.chart))
    return outs


def coderivative_connection(j: FormJet, mj: MetricJet, gamma=None) -> FormJet:
    """d* = -iota(nabla), the connection route."""
    nab = covariant_derivative(j, mj, gamma)
    ginv = metric_inverse_jets(mj)
    n = j.n
    acc = FormJet(n, j.x, {}, j.chart)
    for a in range(n):
        acc = acc + FormJet(n, j.x,
                            dict_contract_weights(ginv[a], nab[a].coeffs),
                            j.chart).scale(-1.0)
    return acc


def forms_dirac(j: FormJet, mj: MetricJet, gamma=None) -> FormJet:
    """c(dx^a) nabla_a with the Clifford action c = epsilon - iota."""
    nab = covariant_derivative(j, mj, gamma)
    ginv = metric_inverse_jets(mj)
    n = j.n
    acc = FormJet(n, j.x, {}, j.chart)
    for a in range(n):
        eps = dict_epsilon_gen(a, nab[a].coeffs)
        cot = dict_contract_weights(ginv[a], nab[a].coeffs)
        acc = acc + FormJet(n, j.x, eps, j.chart)
        acc = acc + FormJet(n, j.x, cot, j.chart).scale(-1.0)
    return acc


def laplace_beltrami(f: SJet, mj: MetricJet, gamma: np.ndarray = None) -> complex:
    """Positive-spectrum scalar Laplacian -g^ij (d_i d_j f - Gamma^k_ij d_k f)."""
    if f.dd is None:
        raise JetOrderError("laplace_beltrami needs an order-2 jet")
    if gamma is None:
        from .curvature import christoffel

        gamma = christoffel(mj)
    s = 0.0j
    for i in range(mj.n):
        for jj in range(mj.n):
            t = f.dd[i, jj]
            for k in range(mj.n):
                t = t - gamma[k, i, jj] * f.d[k]
            s += mj.g_inv[i, jj] * t
    return -s
