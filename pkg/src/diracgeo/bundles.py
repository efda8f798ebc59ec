"""Superconnections on graded bundles and their quantized Dirac operators.

Fiber objects are jets: a SectionJet is (value, first, second partials) of a
C^m-valued field at a point, a MatrixJet the same for an endomorphism field.
Missing orders propagate through arithmetic exactly like scalar jets, so
operator compositions consume derivative orders with no truncation error.

Grading conventions: eta is a diagonal +-1 involution; a matrix is even when
it commutes with eta, odd when it anticommutes. The degree-p component of a
superconnection must have eta-parity (-1)^(p+1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .charts import MetricJet
from .clifford import blade_indices, dict_contract_weights, dict_epsilon_gen, reorder_sign
from .forms import PolyScalar, random_poly_scalar
from .jets import SJet


class ParityError(ValueError):
    """Superconnection component with the wrong eta-parity."""


class CliffordConnectionError(ValueError):
    """Twisting curvature failed to supercommute with the Clifford action."""


# ---------------------------------------------------------------------------
# fiber-valued jets
# ---------------------------------------------------------------------------


@dataclass
class SectionJet:
    """C^m-valued jet: v, d[i] = partial_i v, dd[i, j] = partial_i partial_j v."""

    n: int
    x: np.ndarray
    v: np.ndarray
    d: Optional[np.ndarray] = None
    dd: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.v.shape[0]

    @property
    def order(self) -> int:
        if self.dd is not None:
            return 2
        if self.d is not None:
            return 1
        return 0

    def partial(self, k: int) -> "SectionJet":
        if self.d is None:
            raise ValueError("section jet carries no first-order data")
        dd = self.dd[k].copy() if self.dd is not None else None
        return SectionJet(self.n, self.x, self.d[k], dd, None)

    def __add__(self, o: "SectionJet") -> "SectionJet":
        d = self.d + o.d if self.d is not None and o.d is not None else None
        dd = self.dd + o.dd if self.dd is not None and o.dd is not None else None
        return SectionJet(self.n, self.x, self.v + o.v, d, dd)

    def __sub__(self, o: "SectionJet") -> "SectionJet":
        return self + o.scale(-1.0)

    def scale(self, s) -> "SectionJet":
        d = self.d * s if self.d is not None else None
        dd = self.dd * s if self.dd is not None else None
        return SectionJet(self.n, self.x, self.v * s, d, dd)

    def scale_jet(self, s: SJet) -> "SectionJet":
        """Multiply by a scalar jet, intersecting orders."""
        d = dd = None
        if self.d is not None and s.d is not None:
            d = s.val * self.d + np.outer(s.d, self.v)
            if self.dd is not None and s.dd is not None:
                cross = np.einsum("i,jm->ijm", s.d, self.d)
                dd = (s.val * self.dd + cross + np.transpose(cross, (1, 0, 2))
                      + np.einsum("ij,m->ijm", s.dd, self.v))
        return SectionJet(self.n, self.x, s.val * self.v, d, dd)

    @staticmethod
    def constant(v: Sequence, n: int, x, order: int = 2) -> "SectionJet":
        v = np.asarray(v, dtype=complex)
        m = v.shape[0]
        d = np.zeros((n, m), dtype=complex) if order >= 1 else None
        dd = np.zeros((n, n, m), dtype=complex) if order >= 2 else None
        return SectionJet(n, np.asarray(x, dtype=float), v, d, dd)


@dataclass
class MatrixJet:
    """End(C^m)-valued jet at a point."""

    n: int
    val: np.ndarray
    d: Optional[np.ndarray] = None
    dd: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.val.shape[0]

    @property
    def order(self) -> int:
        if self.dd is not None:
            return 2
        if self.d is not None:
            return 1
        return 0

    def partial(self, k: int) -> "MatrixJet":
        if self.d is None:
            raise ValueError("matrix jet carries no first-order data")
        dd = self.dd[k].copy() if self.dd is not None else None
        return MatrixJet(self.n, self.d[k], dd, None)

    def __add__(self, o: "MatrixJet") -> "MatrixJet":
        d = self.d + o.d if self.d is not None and o.d is not None else None
        dd = self.dd + o.dd if self.dd is not None and o.dd is not None else None
        return MatrixJet(self.n, self.val + o.val, d, dd)

    def __sub__(self, o: "MatrixJet") -> "MatrixJet":
        return self + o.scale(-1.0)

    def scale(self, s) -> "MatrixJet":
        d = self.d * s if self.d is not None else None
        dd = self.dd * s if self.dd is not None else None
        return MatrixJet(self.n, self.val * s, d, dd)

    def __matmul__(self, o: "MatrixJet") -> "MatrixJet":
        val = self.val @ o.val
        d = dd = None
        if self.d is not None and o.d is not None:
            d = np.einsum("iab,bc->iac", self.d, o.val) + np.einsum(
                "ab,ibc->iac", self.val, o.d)
            if self.dd is not None and o.dd is not None:
                cross = np.einsum("iab,jbc->ijac", self.d, o.d)
                dd = (np.einsum("ijab,bc->ijac", self.dd, o.val) + cross
                      + np.transpose(cross, (1, 0, 2, 3))
                      + np.einsum("ab,ijbc->ijac", self.val, o.dd))
        return MatrixJet(self.n, val, d, dd)

    def commutator(self, o: "MatrixJet") -> "MatrixJet":
        return (self @ o) - (o @ self)

    def apply(self, s: SectionJet) -> SectionJet:
        v = self.val @ s.v
        d = dd = None
        if self.d is not None and s.d is not None:
            d = np.einsum("iab,b->ia", self.d, s.v) + np.einsum(
                "ab,ib->ia", self.val, s.d)
            if self.dd is not None and s.dd is not None:
                cross = np.einsum("iab,jb->ija", self.d, s.d)
                dd = (np.einsum("ijab,b->ija", self.dd, s.v) + cross
                      + np.transpose(cross, (1, 0, 2))
                      + np.einsum("ab,ijb->ija", self.val, s.dd))
        return SectionJet(s.n, s.x, v, d, dd)

    @staticmethod
    def constant(mat: np.ndarray, n: int, order: int = 2) -> "MatrixJet":
        mat = np.asarray(mat, dtype=complex)
        m = mat.shape[0]
        d = np.zeros((n, m, m), dtype=complex) if order >= 1 else None
        dd = np.zeros((n, n, m, m), dtype=complex) if order >= 2 else None
        return MatrixJet(n, mat, d, dd)

    @staticmethod
    def zero(m: int, n: int, order: int = 2) -> "MatrixJet":
        return MatrixJet.constant(np.zeros((m, m)), n, order)


# ---------------------------------------------------------------------------
# polynomial fiber fields
# ---------------------------------------------------------------------------


@dataclass
class PolySection:
    n: int
    comps: List[PolyScalar]

    def eval(self, x, order: int = 2) -> SectionJet:
        x = np.asarray(x, dtype=float)
        jets = [p.eval_jet(x, order) for p in self.comps]
        n, m = self.n, len(jets)
        v = np.array([j.val for j in jets])
        d = np.array([[j.d[i] for j in jets] for i in range(n)]) if order >= 1 else None
        dd = (np.array([[[j.dd[i, k] for j in jets] for k in range(n)]
                        for i in range(n)]) if order >= 2 else None)
        return SectionJet(n, x, v, d, dd)


@dataclass
class PolyMatrix:
    n: int
    entries: List[List[PolyScalar]]

    @property
    def m(self) -> int:
        return len(self.entries)

    def eval(self, x, order: int = 2) -> MatrixJet:
        x = np.asarray(x, dtype=float)
        n, m = self.n, self.m
        jets = [[p.eval_jet(x, order) for p in row] for row in self.entries]
        val = np.array([[jets[r][c].val for c in range(m)] for r in range(m)])
        d = dd = None
        if order >= 1:
            d = np.array([[[jets[r][c].d[i] for c in range(m)] for r in range(m)]
                          for i in range(n)])
        if order >= 2:
            dd = np.array([[[[jets[r][c].dd[i, k] for c in range(m)]
                             for r in range(m)] for k in range(n)] for i in range(n)])
        return MatrixJet(n, val, d, dd)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for row in self.entries for p in row for c, _ in p.terms),
                   default=0.0)

    @staticmethod
    def zero(m: int, n: int) -> "PolyMatrix":
        return PolyMatrix(n, [[PolyScalar(n, []) for _ in range(m)] for _ in range(m)])

    @staticmethod
    def constant(mat: np.ndarray, n: int) -> "PolyMatrix":
        m = mat.shape[0]
        return PolyMatrix(n, [[PolyScalar.constant(mat[r, c], n) for c in range(m)]
                              for r in range(m)])


def random_poly_section(rng, n: int, m: int, degree: int = 2) -> PolySection:
    return PolySection(n, [random_poly_scalar(rng, n, degree, complex_coeffs=True)
                           for _ in range(m)])


def random_parity_matrix(rng, n: int, eta: np.ndarray, parity: int,
                         degree: int = 1) -> PolyMatrix:
    """Polynomial matrix field with the requested eta-parity (+1 even, -1 odd)."""
    m = eta.shape[0]
    sig = np.real(np.diag(eta)).astype(int)
    rows = []
    for r in range(m):
        row = []
        for c in range(m):
            if sig[r] * sig[c] == parity:
                row.append(random_poly_scalar(rng, n, degree, complex_coeffs=True))
            else:
                row.append(PolyScalar(n, []))
        rows.append(row)
    return PolyMatrix(n, rows)


# ---------------------------------------------------------------------------
# module spec: gammas acting on the fiber
# ---------------------------------------------------------------------------


@dataclass
class ModuleSpec:
    """Fiber data: dimension, grading involution, and x-dependent gammas."""

    m: int
    eta: np.ndarray
    gamma_provider: Callable[[MetricJet], List[MatrixJet]]
    name: str = ""

    def gammas(self, mj: MetricJet) -> List[MatrixJet]:
        return self.gamma_provider(mj)


def _generator_matrices(n: int):
    """Constant wedge/contraction generator matrices on the 2^n exterior basis."""
    dim = 1 << n
    eps = [np.zeros((dim, dim), dtype=complex) for _ in range(n)]
    cot = [np.zeros((dim, dim), dtype=complex) for _ in range(n)]
    for mask in range(dim):
        for i in range(n):
            for mm, c in dict_epsilon_gen(i, {mask: 1.0}).items():
                eps[i][mm, mask] = c
            w = [1.0 if j == i else 0.0 for j in range(n)]
            for mm, c in dict_contract_weights(w, {mask: 1.0}).items():
                cot[i][mm, mask] = c
    return eps, cot


def exterior_module(n: int) -> ModuleSpec:
    """Clifford action on the full exterior algebra, gammas c(dx^i) = eps - iota."""
    dim = 1 << n
    eps, cot = _generator_matrices(n)
    eta = np.diag([(-1.0) ** bin(mask).count("1") for mask in range(dim)]).astype(complex)

    def provider(mj: MetricJet) -> List[MatrixJet]:
        out = []
        for i in range(n):
            val = eps[i].copy()
            d = np.zeros((n, dim, dim), dtype=complex)
            dd = np.zeros((n, n, dim, dim), dtype=complex)
            for j in range(n):
                val -= mj.g_inv[i, j] * cot[j]
                d -= np.einsum("k,ab->kab", mj.dg_inv[:, i, j].astype(complex), cot[j])
                dd -= np.einsum("lk,ab->lkab", mj.d2g_inv[:, :, i, j].astype(complex),
                                cot[j])
            out.append(MatrixJet(n, val, d, dd))
        return out

    return ModuleSpec(dim, eta, provider, name="exterior")


def levi_civita_exterior_connection(mj: MetricJet) -> List[MatrixJet]:
    """Connection matrices A_a of the induced derivative on form coefficients.

    Matches the componentwise formula nabla_a dx^j = -Gamma^j_am dx^m blade by
    blade, so nabla_a = partial_a + A_a on coefficient vectors.
    """
    from .curvature import christoffel, dchristoffel

    gamma = christoffel(mj)
    dgamma = dchristoffel(mj)
    n = mj.n
    dim = 1 << n
    out = []
    for a in range(n):
        val = np.zeros((dim, dim), dtype=complex)
        d = np.zeros((n, dim, dim), dtype=complex)
        for mask in range(dim):
            idx = blade_indices(mask)
            for pos, ip in enumerate(idx):
                rest = mask & ~(1 << ip)
                sgn_pos = -1.0 if pos % 2 else 1.0
                for mnew in range(n):
                    if (1 << mnew) & rest:
                        continue
                    key = rest | (1 << mnew)
                    w = -1.0 * sgn_pos * reorder_sign(1 << mnew, rest)
                    val[key, mask] += w * gamma[ip, a, mnew]
                    d[:, key, mask] += w * dgamma[:, ip, a, mnew]
        out.append(MatrixJet(n, val, d, None))
    return out


def module_invariant_residual(ms: ModuleSpec, mj: MetricJet) -> float:
    """Max residual of the Clifford relation and gamma oddness."""
    gam = ms.gammas(mj)
    n = mj.n
    worst = 0.0
    ident = np.eye(ms.m)
    for i in range(n):
        for j in range(n):
            acc = gam[i].val @ gam[j].val + gam[j].val @ gam[i].val
            worst = max(worst, float(np.max(np.abs(acc + 2.0 * mj.g_inv[i, j] * ident))))
        worst = max(worst, float(np.max(np.abs(ms.eta @ gam[i].val
                                               + gam[i].val @ ms.eta))))
    return worst


# ---------------------------------------------------------------------------
# superconnections
# ---------------------------------------------------------------------------


@dataclass
class SuperconnectionData:
    """Blade-keyed coefficients: mask I -> omega_I(x), plus d implied.

    Degree-1 masks store the A_i of the operator dx^i (x) (partial_i + A_i).
    """

    n: int
    m: int
    eta: np.ndarray
    blades: Dict[int, PolyMatrix]

    def __post_init__(self):
        self.validate_parity()

    def required_parity(self, mask: int) -> int:
        return -1 if bin(mask).count("1") % 2 == 0 else 1

    def validate_parity(self) -> None:
        sig = np.real(np.diag(self.eta)).astype(int)
        for mask, pm in self.blades.items():
            want = self.required_parity(mask)
            for r in range(self.m):
                for c in range(self.m):
                    if sig[r] * sig[c] != want and pm.entries[r][c].terms:
                        raise ParityError(
                            f"blade {blade_indices(mask)} entry ({r},{c}) breaks "
                            f"the degree-parity rule")

    def component(self, mask: int) -> PolyMatrix:
        return self.blades.get(mask, PolyMatrix.zero(self.m, self.n))

    def eval_blades(self, x, order: int = 2) -> Dict[int, MatrixJet]:
        return {mask: pm.eval(x, order) for mask, pm in self.blades.items()}


def superconnection_from_degrees(n: int, m: int, eta: np.ndarray,
                                 degree_specs: Dict[int, str],
                                 base_seed: int = 0) -> SuperconnectionData:
    """Build coefficients per degree from preset names.

    Presets: "zero", "constant", "linear", "random" or "random(seed)".
    """
    blades: Dict[int, PolyMatrix] = {}
    for mask in range(1 << n):
        p = bin(mask).count("1")
        if p not in degree_specs:
            continue
        spec = degree_specs[p].strip()
        parity = -1 if p % 2 == 0 else 1
        seed = base_seed
        kind = spec
        if spec.startswith("random"):
            kind = "random"
            inner = spec[len("random"):].strip()
            if inner.startswith("(") and inner.endswith(")"):
                seed = int(inner[1:-1])
        rng = np.random.default_rng(seed * 100003 + mask * 101 + 7)
        if kind == "zero":
            blades[mask] = PolyMatrix.zero(m, n)
        elif kind == "constant":
            blades[mask] = random_parity_matrix(rng, n, eta, parity, degree=0)
        elif kind == "linear":
            blades[mask] = random_parity_matrix(rng, n, eta, parity, degree=1)
        elif kind == "random":
            blades[mask] = random_parity_matrix(rng, n, eta, parity, degree=2)
        else:
            raise ValueError(f"unknown coefficient preset {spec!r}")
    return SuperconnectionData(n, m, eta, blades)


def superconnection_from_config(cfg: dict, n: int,
                                ms: Optional[ModuleSpec] = None) -> SuperconnectionData:
    if ms is None:
        ms = exterior_module(n)
    m = cfg.get("fiber_dimension", ms.m)
    if m != ms.m:
        raise ValueError(f"config fiber_dimension {m} does not match module rank {ms.m}")
    if "grading" in cfg:
        grading = np.asarray(cfg["grading"], dtype=float)
        if grading.shape != (m,) or not np.array_equal(np.abs(grading), np.ones(m)):
            raise ValueError("grading must be a +-1 vector of fiber dimension")
        if not np.allclose(np.diag(grading), ms.eta):
            raise ValueError("config grading does not match the module grading")
    degree_specs = {int(k): str(v) for k, v in cfg.get("degrees", {}).items()}
    for p in degree_specs:
        if not 0 <= p <= n:
            raise ValueError(f"degree {p} out of range for n={n}")
    return superconnection_from_degrees(n, ms.m, ms.eta, degree_specs,
                                        base_seed=int(cfg.get("seed", 0)))


def load_superconnection_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# form-valued sections and the superconnection action
# ---------------------------------------------------------------------------


@dataclass
class FormSectionJet:
    """Form with SectionJet coefficients: mask -> C^m-valued jet."""

    n: int
    x: np.ndarray
    comps: Dict[int, SectionJet]

    def norm(self) -> float:
        return float(np.sqrt(sum(np.sum(np.abs(s.v) ** 2)
                                 for s in self.comps.values())))

    def __add__(self, o: "FormSectionJet") -> "FormSectionJet":
        out = dict(self.comps)
        for mask, s in o.comps.items():
            out[mask] = out[mask] + s if mask in out else s
        return FormSectionJet(self.n, self.x, out)

    def __sub__(self, o: "FormSectionJet") -> "FormSectionJet":
        return self + o.scale(-1.0)

    def scale(self, s) -> "FormSectionJet":
        return FormSectionJet(self.n, self.x,
                              {mask: sec.scale(s) for mask, sec in self.comps.items()})


def iota_form_section(X, fs: FormSectionJet) -> FormSectionJet:
    """Contract the form part with a vector jet X (components are scalar jets)."""
    out: Dict[int, SectionJet] = {}
    for mask, sec in fs.comps.items():
        sign = 1
        for j in blade_indices(mask):
            term = sec.scale_jet(X.comps[j]).scale(float(sign))
            key = mask & ~(1 << j)
            out[key] = out[key] + term if key in out else term
            sign = -sign
    return FormSectionJet(fs.n, fs.x, out)


def apply_superconnection(blades: Dict[int, MatrixJet],
                          fs: FormSectionJet) -> FormSectionJet:
    """ID(fs) = d fs + sum_I dx^I (x) omega_I fs, with graded tensor signs.

    omega_I has eta-parity (-1)^(|I|+1), so acting on a degree-K component
    picks up the Koszul sign (-1)^((|I|+1)|K|).
    """
    n = fs.n
    out: Dict[int, SectionJet] = {}

    def add(key: int, sec: SectionJet) -> None:
        out[key] = out[key] + sec if key in out else sec

    for mask, sec in fs.comps.items():
        for c in range(n):
            bit = 1 << c
            if mask & bit:
                continue
            term = sec.partial(c)
            if reorder_sign(bit, mask) < 0:
                term = term.scale(-1.0)
            add(mask | bit, term)
        k = bin(mask).count("1")
        for imask, om in blades.items():
            if imask & mask:
                continue
            p = bin(imask).count("1")
            sgn = reorder_sign(imask, mask) * (-1) ** (((p + 1) % 2) * k)
            add(imask | mask, om.apply(sec).scale(float(sgn)))
    return FormSectionJet(n, fs.x, out)


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------


def quantize_blade(gammas: List[MatrixJet], mask: int, n: int, m: int) -> MatrixJet:
    """q(dx^I) = (1/k!) sum over permutations of sign * gamma products."""
    idx = blade_indices(mask)
    if not idx:
        ident = np.eye(m, dtype=complex)
        return MatrixJet.constant(ident, n, order=2)
    acc = None
    base = list(range(len(idx)))
    for perm in permutations(base):
        inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm))
                  if perm[a] > perm[b])
        term = None
        for pos in perm:
            g = gammas[idx[pos]]
            term = g if term is None else term @ g
        term = term.scale(float((-1) ** inv))
        acc = term if acc is None else acc + term
    return acc.scale(1.0 / factorial(len(idx)))


@dataclass
class DiracOperatorData:
    """First-order operator gamma^i (partial_i + A_i) + Z with coefficient jets."""

    x: np.ndarray
    gam: List[MatrixJet]
    A: List[MatrixJet]
    Z: MatrixJet
    eta: np.ndarray

    @property
    def n(self) -> int:
        return len(self.gam)

    @property
    def m(self) -> int:
        return self.Z.m


def quantize_superconnection(S: SuperconnectionData, mj: MetricJet,
                             ms: ModuleSpec, x) -> DiracOperatorData:
    S.validate_parity()
    if S.m != ms.m:
        raise ValueError("superconnection fiber dimension does not match module")
    x = np.asarray(x, dtype=float)
    n = mj.n
    gam = ms.gammas(mj)
    evald = S.eval_blades(x, order=2)
    A = [evald.get(1 << i, MatrixJet.zero(ms.m, n)) for i in range(n)]
    Z = MatrixJet.zero(ms.m, n)
    for mask, om in evald.items():
        if bin(mask).count("1") == 1:
            continue
        Z = Z + (quantize_blade(gam, mask, n, ms.m) @ om)
    return DiracOperatorData(x, gam, A, Z, ms.eta)


def apply_dirac(D: DiracOperatorData, j: SectionJet) -> np.ndarray:
    if not np.array_equal(D.x, j.x):
        raise ValueError("operator and section live at different points")
    if j.m != D.m:
        raise ValueError("fiber dimension mismatch")
    out = D.Z.val @ j.v
    for i in range(D.n):
        out = out + D.gam[i].val @ (j.d[i] + D.A[i].val @ j.v)
    return out


def apply_dirac_jet(D: DiracOperatorData, j: SectionJet) -> SectionJet:
    """1-jet of D psi out of a 2-jet of psi (compositional squaring route)."""
    acc = D.Z.apply(j)
    for i in range(D.n):
        acc = acc + D.gam[i].apply(j.partial(i) + D.A[i].apply(j))
    return acc


def dirac_square(D: DiracOperatorData, j: SectionJet) -> np.ndarray:
    """Direct expansion of D^2 on an order-2 jet."""
    if j.dd is None:
        raise ValueError("dirac_square needs an order-2 section jet")
    n, m = D.n, D.m
    gam, A, Z = D.gam, D.A, D.Z
    out = np.zeros(m, dtype=complex)
    for i in range(n):
        gi = gam[i].val
        for k in range(n):
            gk = gam[k].val
            # M_i M_k psi with M = partial + A
            term = (j.dd[i, k] + A[k].d[i] @ j.v + A[k].val @ j.d[i]
                    + A[i].val @ (j.d[k] + A[k].val @ j.v))
            out += gi @ (gk @ term)
            # gamma^i (partial_i gamma^k + [A_i, gamma^k]) M_k psi
            coeff = gam[k].d[i] + A[i].val @ gk - gk @ A[i].val
            out += gi @ (coeff @ (j.d[k] + A[k].val @ j.v))
        out += gi @ ((Z.d[i] + A[i].val @ Z.val - Z.val @ A[i].val) @ j.v)
        out += (gi @ Z.val + Z.val @ gi) @ (j.d[i] + A[i].val @ j.v)
    out += Z.val @ (Z.val @ j.v)
    return out


# ---------------------------------------------------------------------------
# canonical Laplacian and decomposition
# ---------------------------------------------------------------------------


def canonical_laplacian(A: List[MatrixJet], mj: MetricJet, j: SectionJet,
                        gamma: Optional[np.ndarray] = None,
                        route: str = "local") -> np.ndarray:
    """-g^ik (nabla_i nabla_k - Gamma^l_ik nabla_l) on a section 2-jet."""
    if gamma is None:
        from .curvature import christoffel

        gamma = christoffel(mj)
    n = mj.n
    if route == "local":
        out = np.zeros(j.m, dtype=complex)
        for i in range(n):
            for k in range(n):
                term = (j.dd[i, k] + A[k].d[i] @ j.v + A[k].val @ j.d[i]
                        + A[i].val @ (j.d[k] + A[k].val @ j.v))
                for l in range(n):
                    term = term - gamma[l, i, k] * (j.d[l] + A[l].val @ j.v)
                out += mj.g_inv[i, k] * term
        return -out
    if route == "trace":
        # materialize eta_k = nabla_k psi as 1-jets, apply the tensor-bundle
        # connection, contract with -g
        etas = [j.partial(k) + A[k].apply(j) for k in range(n)]
        out = np.zeros(j.m, dtype=complex)
        for i in range(n):
            for k in range(n):
                cov = etas[k].partial(i).v + A[i].val @ etas[k].v
                for l in range(n):
                    cov = cov - gamma[l, i, k] * etas[l].v
                out += mj.g_inv[i, k] * cov
        return -out
    raise ValueError(f"unknown route {route!r}")


def lap_identity_residual(apply_h: Callable[[SectionJet], np.ndarray],
                          mj: MetricJet, x, m: int,
                          probe: Optional[SectionJet] = None) -> float:
    """Defining test [[H, f], g] psi + 2 (df, dg) psi for f=x^k, g=x^l.

    The residual is relative: scaled by the largest operator value entering
    the double commutator, so the test is meaningful on any chart.
    """
    n = mj.n
    x = np.asarray(x, dtype=float)
    if probe is None:
        probe = SectionJet.constant(np.ones(m), n, x)
    worst = 0.0
    for k in range(n):
        fk = PolyScalar(n, [(1.0, tuple(1 if i == k else 0 for i in range(n)))])
        for l in range(n):
            fl = PolyScalar(n, [(1.0, tuple(1 if i == l else 0 for i in range(n)))])
            jk = fk.eval_jet(x)
            jl = fl.eval_jet(x)
            h_fg = apply_h(probe.scale_jet(jk * jl))
            h_f = apply_h(probe.scale_jet(jk))
            h_g = apply_h(probe.scale_jet(jl))
            h_0 = apply_h(probe)
            comm = (h_fg - float(x[l]) * h_f - float(x[k]) * h_g
                    + float(x[k] * x[l]) * h_0)
            resid = comm + 2.0 * mj.g_inv[k, l] * probe.v
            scale = max(1.0,
                        float(np.max(np.abs(h_fg))),
                        abs(float(x[l])) * float(np.max(np.abs(h_f))),
                        abs(float(x[k])) * float(np.max(np.abs(h_g))),
                        abs(float(x[k] * x[l])) * float(np.max(np.abs(h_0))))
            worst = max(worst, float(np.max(np.abs(resid))) / scale)
    return worst


@dataclass
class LaplacianData:
    """Second-order operator as a black box plus coefficient jets.

    The operator is H = S^ik partial_i partial_k + T^k partial_k + U with
    S^ik = -g^ik id enforced by the Laplacian test; T carries 1-jets so the
    decomposition can reach the derivative of the recovered connection.
    """

    n: int
    m: int
    x: np.ndarray
    apply: Callable[[SectionJet], np.ndarray]
    T: List[MatrixJet]
    U: np.ndarray


def laplacian_from_connection(A: List[MatrixJet], F: np.ndarray,
                              mj: MetricJet, x) -> LaplacianData:
    """H = canonical Laplacian of A plus zero-order F."""
    from .curvature import christoffel

    gamma = christoffel(mj)
    n = mj.n
    m = F.shape[0]
    x = np.asarray(x, dtype=float)

    def apply_h(j: SectionJet) -> np.ndarray:
        return canonical_laplacian(A, mj, j, gamma) + F @ j.v

    T = []
    for k in range(n):
        val = np.zeros((m, m), dtype=complex)
        d = np.zeros((n, m, m), dtype=complex)
        for i in range(n):
            val -= 2.0 * mj.g_inv[i, k] * A[i].val
            d -= 2.0 * np.einsum("l,ab->lab", mj.dg_inv[:, i, k].astype(complex),
                                 A[i].val)
            d -= 2.0 * mj.g_inv[i, k] * A[i].d
            for j_ in range(n):
                val += mj.g_inv[i, j_] * gamma[k, i, j_] * np.eye(m)
        # derivative of the scalar g^ij Gamma^k_ij part
        dsc = _d_trace_gamma(mj, gamma)[:, k]
        d += np.einsum("l,ab->lab", dsc.astype(complex), np.eye(m))
        T.append(MatrixJet(n, val, d, None))
    U = _zero_order_of_connection(A, mj, gamma) + F.astype(complex)
    return LaplacianData(n, m, x, apply_h, T, U)


def _d_trace_gamma(mj: MetricJet, gamma: np.ndarray) -> np.ndarray:
    """partial_l of g^ij Gamma^k_ij, indexed [l, k]."""
    from .curvature import dchristoffel

    dgam = dchristoffel(mj)
    return (np.einsum("lij,kij->lk", mj.dg_inv, gamma)
            + np.einsum("ij,lkij->lk", mj.g_inv, dgam))


def _zero_order_of_connection(A: List[MatrixJet], mj: MetricJet,
                              gamma: np.ndarray) -> np.ndarray:
    """Zero-order block of the canonical Laplacian itself."""
    n = mj.n
    m = A[0].m
    out = np.zeros((m, m), dtype=complex)
    for i in range(n):
        for k in range(n):
            term = A[k].d[i] + A[i].val @ A[k].val
            for l in range(n):
                term = term - gamma[l, i, k] * A[l].val
            out -= mj.g_inv[i, k] * term
    return out


def laplacian_from_dirac(D: DiracOperatorData, mj: MetricJet) -> LaplacianData:
    """Coefficient jets of D^2 collected from the operator expansion.

    With M_k = partial_k + A_k the square expands to
      D^2 = g^i g^k M_i M_k + g^i (d_i g^k + [A_i, g^k]) M_k
          + g^i (d_i Z + [A_i, Z]) + (g^i Z + Z g^i) M_i + Z^2
    so the first-order coefficient (of partial_k) is
      T^k = g^k g^i A_i + g^i g^k A_i + g^i (d_i g^k + [A_i, g^k])
          + g^k Z + Z g^k.
    """
    n, m = D.n, D.m
    gam, A, Z = D.gam, D.A, D.Z

    def apply_h(j: SectionJet) -> np.ndarray:
        return dirac_square(D, j)

    T = []
    for k in range(n):
        acc = (gam[k] @ Z) + (Z @ gam[k])
        for i in range(n):
            acc = acc + (gam[k] @ gam[i] @ A[i]) + (gam[i] @ gam[k] @ A[i])
            acc = acc + gam[i] @ (gam[k].partial(i) + A[i].commutator(gam[k]))
        T.append(acc)
    U = (Z @ Z).val.copy()
    for i in range(n):
        U += gam[i].val @ (Z.d[i] + A[i].commutator(Z).val)
        U += (gam[i].val @ Z.val + Z.val @ gam[i].val) @ A[i].val
        for j_ in range(n):
            U += gam[i].val @ gam[j_].val @ (A[j_].d[i] + A[i].val @ A[j_].val)
            U += (gam[i].val @ (gam[j_].d[i] + A[i].commutator(gam[j_]).val)
                  @ A[j_].val)
    return LaplacianData(n, m, np.asarray(D.x, dtype=float), apply_h, T, U)


def laplacian_decompose(L: LaplacianData, mj: MetricJet):
    """Recover (A_i with 1-jets, F) from coefficient jets per the probe family."""
    from .curvature import christoffel

    gamma = christoffel(mj)
    n, m = L.n, L.m
    trg = np.einsum("ij,kij->k", mj.g_inv, gamma)
    dtrg = _d_trace_gamma(mj, gamma)
    A = []
    for i in range(n):
        val = np.zeros((m, m), dtype=complex)
        d = np.zeros((n, m, m), dtype=complex)
        for k in range(n):
            diff_val = trg[k] * np.eye(m) - L.T[k].val
            diff_d = (np.einsum("l,ab->lab", dtrg[:, k].astype(complex), np.eye(m))
                      - L.T[k].d)
            val += 0.5 * mj.g[i, k] * diff_val
            d += 0.5 * (np.einsum("l,ab->lab", mj.dg[:, i, k].astype(complex),
                                  diff_val) + mj.g[i, k] * diff_d)
        A.append(MatrixJet(n, val, d, None))
    u_conn = _zero_order_of_connection(A, mj, gamma)
    F = L.U - u_conn
    return A, F


# ---------------------------------------------------------------------------
# curvatures
# ---------------------------------------------------------------------------


def connection_curvature(A: List[MatrixJet]) -> np.ndarray:
    """F_ik = partial_i A_k - partial_k A_i + [A_i, A_k] as matrix jets."""
    n = len(A)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for k in range(n):
            out[i, k] = A[k].partial(i) - A[i].partial(k) + A[i].commutator(A[k])
    return out


def superconnection_curvature(S: SuperconnectionData, x) -> Dict[int, MatrixJet]:
    """ID^2 as blade -> endomorphism jets.

    F = sum_{I,c} dx^c ^ dx^I (x) partial_c omega_I
      + sum_{I,J} (-1)^((|I|+1)|J|) dx^I ^ dx^J (x) omega_I omega_J.
    """
    x = np.asarray(x, dtype=float)
    n = S.n
    evald = S.eval_blades(x, order=2)
    out: Dict[int, MatrixJet] = {}

    def add(key: int, mjet: MatrixJet) -> None:
        out[key] = out[key] + mjet if key in out else mjet

    for imask, om in evald.items():
        for c in range(n):
            bit = 1 << c
            if imask & bit:
                continue
            term = om.partial(c)
            if reorder_sign(bit, imask) < 0:
                term = term.scale(-1.0)
            add(bit | imask, term)
    for imask, omi in evald.items():
        pi = bin(imask).count("1")
        for jmask, omj in evald.items():
            if imask & jmask:
                continue
            pj = bin(jmask).count("1")
            sgn = reorder_sign(imask, jmask) * (-1) ** (((pi + 1) % 2) * pj)
            add(imask | jmask, (omi @ omj).scale(float(sgn)))
    return out


def apply_form_endomorphism(F: Dict[int, MatrixJet],
                            fs: FormSectionJet) -> FormSectionJet:
    """Apply a form-valued endomorphism with graded tensor signs."""
    out: Dict[int, SectionJet] = {}
    for mask, sec in fs.comps.items():
        k = bin(mask).count("1")
        for fmask, mat in F.items():
            if fmask & mask:
                continue
            p = bin(fmask).count("1")
            sgn = reorder_sign(fmask, mask) * (-1) ** ((p % 2) * k)
            term = mat.apply(sec).scale(float(sgn))
            key = fmask | mask
            out[key] = out[key] + term if key in out else term
    return FormSectionJet(fs.n, fs.x, out)


def twisting_curvature(FE: np.ndarray, lowered: np.ndarray,
                       gammas: List[MatrixJet], tol: float = 1e-9):
    """F^tw_ik = F^E_ik - c(S_ik), S_ik = -1/4 lowered[k,l,i,k'] dx^k dx^l.

    Raises CliffordConnectionError when the result fails to supercommute
    with every gamma (the input connection was not a Clifford connection).
    """
    n = len(gammas)
    m = gammas[0].m
    ftw = np.empty((n, n), dtype=object)
    scale = float(np.max(np.abs(lowered))) + max(
        float(np.max(np.abs(FE[i, k].val))) for i in range(n) for k in range(n))
    worst = 0.0
    for i in range(n):
        for k in range(n):
            cs = np.zeros((m, m), dtype=complex)
            for a in range(n):
                for b in range(n):
                    cs += -0.25 * lowered[a, b, i, k] * (gammas[a].val @ gammas[b].val)
            val = FE[i, k].val - cs
            ftw[i, k] = val
            for g in gammas:
                comm = val @ g.val - g.val @ val
                worst = max(worst, float(np.max(np.abs(comm))))
    if worst > tol * max(1.0, scale):
        raise CliffordConnectionError(
            f"twisting curvature fails to supercommute with the Clifford action "
            f"(residual {worst:.3e}); the connection is not a Clifford connection")
    return ftw, worst


# ---------------------------------------------------------------------------
# kernel projector
# ---------------------------------------------------------------------------


def kernel_projector(mj: MetricJet, ms: ModuleSpec):
    """Maps (c, b, p) with c(b(phi)) = phi and p = b c a projector of rank m.

    c: T*M (x) E -> E collapses dx^i (x) phi to gamma^i phi;
    b: E -> T*M (x) E is phi -> -(1/n) dx^i (x) g_ij gamma^j phi.
    """
    n, m = mj.n, ms.m
    gam = ms.gammas(mj)
    c = np.zeros((m, n * m), dtype=complex)
    b = np.zeros((n * m, m), dtype=complex)
    for i in range(n):
        c[:, i * m:(i + 1) * m] = gam[i].val
        blk = np.zeros((m, m), dtype=complex)
        for j in range(n):
            blk += mj.g[i, j] * gam[j].val
        b[i * m:(i + 1) * m, :] = -blk / n
    p = b @ c
    return c, b, p


def clifford_of_metric(mj: MetricJet, ms: ModuleSpec) -> np.ndarray:
    """c(omega) for omega = g_ij dx^i dx^j; equals -n times the identity."""
    gam = ms.gammas(mj)
    n, m = mj.n, ms.m
    out = np.zeros((m, m), dtype=complex)
    for i in range(n):
        for j in range(n):
            out += mj.g[i, j] * (gam[i].val @ gam[j].val)
    return out


# ---------------------------------------------------------------------------
# special superconnections
# ---------------------------------------------------------------------------


def is_special_superconnection(S: SuperconnectionData, points: Sequence,
                               tol: float = 1e-12):
    """True iff every degree >= 2 component vanishes at all sample points."""
    worst = 0.0
    for mask, pm in S.blades.items():
        if bin(mask).count("1") < 2:
            continue
        for x in points:
            mjet = pm.eval(x, order=0)
            worst = max(worst, float(np.max(np.abs(mjet.val))))
    return worst <= tol, worst


def special_identity_residual(S: SuperconnectionData, x, X, Y,
                              fs: FormSectionJet) -> float:
    """Residual of [[ID, iota(X)], iota(Y)] = iota([X, Y]) on a form-section."""
    from .forms import vector_bracket

    blades = S.eval_blades(np.asarray(x, dtype=float), order=2)

    def ID(z: FormSectionJet) -> FormSectionJet:
        return apply_superconnection(blades, z)

    def comm1(z: FormSectionJet) -> FormSectionJet:
        return ID(iota_form_section(X, z)) + iota_form_section(X, ID(z))

    lhs = comm1(iota_form_section(Y, fs)) - iota_form_section(Y, comm1(fs))
    rhs = iota_form_section(vector_bracket(X, Y), fs)
    return (lhs - rhs).norm()
