"""Clifford algebras over nondegenerate symmetric bilinear forms.

Elements are stored in symbol coordinates: a dict mapping blade bitmasks to
coefficients (bit i set = generator dx^i present).  The same storage backs
exterior elements and Clifford elements; ``quantize``/``symbol`` reinterpret
the coordinates without touching them.  The geometric product expands the
left factor into generator words and applies c(v) = epsilon(v) - iota(v) to
the right factor's symbol.

Coefficients may be plain complex numbers or jets (anything supporting
+, -, *), which is how position-dependent Clifford fields get exact
derivatives downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np


class DegenerateFormError(ValueError):
    """Bilinear form fails the nondegeneracy floor."""


class AlgebraMismatchError(ValueError):
    """Operands belong to different algebras or kinds."""


# ---------------------------------------------------------------------------
# blade bitmask kernels
# ---------------------------------------------------------------------------


def blade_indices(mask: int) -> List[int]:
    """Ascending generator indices present in a blade bitmask."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def reorder_sign(a: int, b: int) -> int:
    """Sign of sorting the concatenation blade(a), blade(b); disjoint masks."""
    a >>= 1
    total = 0
    while a:
        total += (a & b).bit_count()
        a >>= 1
    return -1 if total & 1 else 1


def _is_exact_zero(c) -> bool:
    return isinstance(c, (int, float, complex)) and c == 0


def _dict_add(acc: Dict[int, object], mask: int, coeff) -> None:
    if mask in acc:
        acc[mask] = acc[mask] + coeff
    else:
        acc[mask] = coeff


def dict_wedge(a: Dict[int, object], b: Dict[int, object]) -> Dict[int, object]:
    out: Dict[int, object] = {}
    for ma, ca in a.items():
        if _is_exact_zero(ca):
            continue
        for mb, cb in b.items():
            if ma & mb or _is_exact_zero(cb):
                continue
            s = reorder_sign(ma, mb)
            c = ca * cb
            _dict_add(out, ma | mb, c if s > 0 else -c)
    return out


def dict_epsilon_gen(i: int, a: Dict[int, object]) -> Dict[int, object]:
    """Left wedge by the single generator dx^i."""
    bit = 1 << i
    out: Dict[int, object] = {}
    for m, c in a.items():
        if m & bit or _is_exact_zero(c):
            continue
        s = reorder_sign(bit, m)
        _dict_add(out, m | bit, c if s > 0 else -c)
    return out


def dict_contract_weights(w: Sequence, a: Dict[int, object]) -> Dict[int, object]:
    """Interior product with pairing weights w_j against each blade factor.

    iota(dx^{j_1} ^ ... ^ dx^{j_p}) = sum_t (-1)^(t-1) w_{j_t} * blade without j_t.
    """
    out: Dict[int, object] = {}
    for m, c in a.items():
        if _is_exact_zero(c):
            continue
        sign = 1
        for j in blade_indices(m):
            wj = w[j]
            if not _is_exact_zero(wj):
                term = wj * c
                _dict_add(out, m & ~(1 << j), term if sign > 0 else -term)
            sign = -sign
    return out


def dict_scale(a: Dict[int, object], s) -> Dict[int, object]:
    return {m: c * s for m, c in a.items()}


def dict_sum(*ds: Dict[int, object]) -> Dict[int, object]:
    out: Dict[int, object] = {}
    for d in ds:
        for m, c in d.items():
            _dict_add(out, m, c)
    return out


def dict_clean(a: Dict[int, object], tol: float = 0.0) -> Dict[int, object]:
    out = {}
    for m, c in a.items():
        if isinstance(c, (int, float, complex)):
            if abs(c) <= tol:
                continue
            out[m] = complex(c)
        else:
            out[m] = c
    return out


def clifford_action_dict(a_sym: Dict[int, object], phi: Dict[int, object],
                         b_inv_pairing) -> Dict[int, object]:
    """Apply c(a) to phi, both in symbol coordinates.

    ``b_inv_pairing`` is the matrix B(dx^i, dx^j) (indexable [i][j]); entries
    may be numbers or jets.  The left factor is peeled into generator words by
    triangular elimination from the top degree down: the symbol of a generator
    word dx^{i_1}...dx^{i_p} (ascending) is the blade plus lower-degree terms,
    so subtracting word symbols clears one degree at a time.
    """
    n_top = max(a_sym.keys(), default=0).bit_length()

    def word_apply(indices: List[int], target: Dict[int, object]) -> Dict[int, object]:
        for i in reversed(indices):
            w_row = b_inv_pairing[i]
            eps = dict_epsilon_gen(i, target)
            iot = dict_contract_weights(w_row, target)
            target = dict_sum(eps, {m: -c for m, c in iot.items()})
        return target

    work = dict(a_sym)
    result: Dict[int, object] = {}
    for deg in range(n_top, -1, -1):
        masks = [m for m in work if m.bit_count() == deg]
        for mask in masks:
            lam = work.pop(mask)
            if _is_exact_zero(lam):
                continue
            idx = blade_indices(mask)
            contrib = word_apply(idx, phi)
            for m, c in contrib.items():
                _dict_add(result, m, lam * c)
            if deg >= 2:
                word_sym = word_apply(idx, {0: 1.0})
                for m, c in word_sym.items():
                    if m == mask or _is_exact_zero(c):
                        continue
                    _dict_add(work, m, -(lam * c))
    return result


# ---------------------------------------------------------------------------
# bilinear forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BilinearForm:
    """Nondegenerate symmetric pairing on covectors, B[i, j] = (dx^i, dx^j)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("bilinear form must be a square matrix")
        if not np.allclose(m, m.T, atol=1e-12):
            raise ValueError("bilinear form must be symmetric")
        if abs(np.linalg.det(m)) <= 1e-12:
            raise DegenerateFormError("|det B| below 1e-12")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def pair(self, u: Sequence[complex], v: Sequence[complex]) -> complex:
        """Complex-bilinear pairing of two covector component arrays."""
        return complex(np.asarray(u) @ self.matrix @ np.asarray(v))

    def signature(self) -> tuple:
        vals = np.linalg.eigvalsh(self.matrix)
        neg = int(np.sum(vals < 0))
        return (self.n - neg, neg)


EXTERIOR = "exterior"
CLIFFORD = "clifford"


@dataclass
class MultivectorElement:
    """Multivector in symbol coordinates over a fixed algebra.

    kind "exterior": plain element of the exterior algebra (wedge calculus).
    kind "clifford": element of Cl(B) stored via the symbol isomorphism.
    """

    n: int
    coeffs: Dict[int, object]
    kind: str = EXTERIOR
    form: Optional[BilinearForm] = None

    def __post_init__(self):
        if self.kind not in (EXTERIOR, CLIFFORD):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == CLIFFORD and self.form is None:
            raise ValueError("clifford elements need a bilinear form")
        if self.form is not None and self.form.n != self.n:
            raise AlgebraMismatchError("form dimension does not match element")
        self.coeffs = dict_clean(self.coeffs)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def scalar(c, n: int, kind: str = EXTERIOR,
               form: Optional[BilinearForm] = None) -> "MultivectorElement":
        return MultivectorElement(n, {0: c}, kind, form)

    @staticmethod
    def covector(components: Sequence, kind: str = EXTERIOR,
                 form: Optional[BilinearForm] = None) -> "MultivectorElement":
        n = len(components)
        coeffs = {1 << i: components[i] for i in range(n)}
        return MultivectorElement(n, coeffs, kind, form)

    @staticmethod
    def blade(indices: Iterable[int], n: int, coeff=1.0, kind: str = EXTERIOR,
              form: Optional[BilinearForm] = None) -> "MultivectorElement":
        mask = 0
        for i in indices:
            if mask & (1 << i):
                raise ValueError("repeated index in blade")
            mask |= 1 << i
        return MultivectorElement(n, {mask: coeff}, kind, form)

    # -- structure ----------------------------------------------------------

    def _compat(self, other: "MultivectorElement") -> None:
        if self.n != other.n or self.kind != other.kind:
            raise AlgebraMismatchError("operands from different algebras")
        if (self.form is None) != (other.form is None):
            raise AlgebraMismatchError("operands disagree about the form")
        if self.form is not None and other.form is not None \
                and self.form is not other.form \
                and not np.array_equal(self.form.matrix, other.form.matrix):
            raise AlgebraMismatchError("operands carry different forms")

    def grade_part(self, k: int) -> "MultivectorElement":
        sel = {m: c for m, c in self.coeffs.items() if m.bit_count() == k}
        return MultivectorElement(self.n, sel, self.kind, self.form)

    def max_grade(self) -> int:
        return max((m.bit_count() for m in self.coeffs), default=0)

    def scalar_part(self) -> complex:
        return complex(self.coeffs.get(0, 0.0))

    def coefficient(self, indices: Iterable[int]) -> complex:
        mask = 0
        for i in indices:
            mask |= 1 << i
        return complex(self.coeffs.get(mask, 0.0))

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values())))

    def __add__(self, other):
        if isinstance(other, MultivectorElement):
            self._compat(other)
            return MultivectorElement(self.n, dict_sum(self.coeffs, other.coeffs),
                                      self.kind, self.form or other.form)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, MultivectorElement):
            return self + (other * (-1.0))
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return MultivectorElement(self.n, dict_scale(self.coeffs, other),
                                      self.kind, self.form)
        if isinstance(other, MultivectorElement):
            self._compat(other)
            if self.kind == CLIFFORD:
                return clifford_product(self, other)
            return wedge(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __repr__(self):
        terms = []
        for m in sorted(self.coeffs):
            idx = "".join(str(i + 1) for i in blade_indices(m))
            label = f"e{idx}" if idx else "1"
            terms.append(f"{self.coeffs[m]!r}*{label}")
        body = " + ".join(terms) if terms else "0"
        return f"<{self.kind} {body}>"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def wedge(a: MultivectorElement, b: MultivectorElement) -> MultivectorElement:
    """Exterior product; defined on exterior-kind elements."""
    a._compat(b)
    if a.kind != EXTERIOR:
        raise AlgebraMismatchError("wedge acts on exterior elements; take symbol() first")
    return MultivectorElement(a.n, dict_wedge(a.coeffs, b.coeffs), EXTERIOR, a.form)


def epsilon(v: MultivectorElement, a: MultivectorElement) -> MultivectorElement:
    """Left exterior multiplication by the degree-1 element v."""
    if v.max_grade() != 1 or 0 in v.coeffs:
        raise ValueError("epsilon takes a degree-1 element")
    out: Dict[int, object] = {}
    for i, ci in _degree_one_components(v):
        part = dict_epsilon_gen(i, a.coeffs)
        for m, c in part.items():
            _dict_add(out, m, ci * c)
    return MultivectorElement(a.n, out, a.kind, a.form)


def iota(u: MultivectorElement, a: MultivectorElement,
         b: Optional[BilinearForm] = None) -> MultivectorElement:
    """Interior product by degree-1 u through the pairing B (complex-bilinear)."""
    form = b or a.form or u.form
    if form is None:
        raise ValueError("iota needs a bilinear form")
    if u.max_grade() != 1 or 0 in u.coeffs:
        raise ValueError("iota takes a degree-1 element")
    w = np.zeros(a.n, dtype=complex)
    for i, ci in _degree_one_components(u):
        w += ci * form.matrix[i]
    out = dict_contract_weights(w, a.coeffs)
    return MultivectorElement(a.n, out, a.kind, a.form)


def _degree_one_components(v: MultivectorElement):
    for m, c in v.coeffs.items():
        yield (m.bit_length() - 1), c


def clifford_product(a: MultivectorElement, b: MultivectorElement) -> MultivectorElement:
    """Geometric product of Clifford elements (symbol coordinates in, out)."""
    a._compat(b)
    if a.kind != CLIFFORD:
        raise AlgebraMismatchError("clifford_product needs clifford-kind elements")
    out = clifford_action_dict(a.coeffs, b.coeffs, a.form.matrix)
    return MultivectorElement(a.n, out, CLIFFORD, a.form)


def quantize(a: MultivectorElement, b: BilinearForm) -> MultivectorElement:
    """Reinterpret an exterior element as the Clifford element with that symbol."""
    if a.kind != EXTERIOR:
        raise AlgebraMismatchError("quantize takes an exterior element")
    if b.n != a.n:
        raise AlgebraMismatchError("form dimension mismatch")
    return MultivectorElement(a.n, dict(a.coeffs), CLIFFORD, b)


def symbol(a: MultivectorElement) -> MultivectorElement:
    """Symbol of a Clifford element: the same coordinates, exterior kind."""
    if a.kind != CLIFFORD:
        raise AlgebraMismatchError("symbol takes a clifford element")
    return MultivectorElement(a.n, dict(a.coeffs), EXTERIOR, None)


# ---------------------------------------------------------------------------
# operator matrices on the exterior module (basis = blade masks 0..2^n-1)
# ---------------------------------------------------------------------------


def epsilon_matrix(v: MultivectorElement) -> np.ndarray:
    n = v.n
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        img = epsilon(v, MultivectorElement(n, {col: 1.0}, EXTERIOR))
        for m, c in img.coeffs.items():
            out[m, col] = c
    return out


def iota_matrix(u: MultivectorElement, b: BilinearForm) -> np.ndarray:
    n = u.n
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        img = iota(u, MultivectorElement(n, {col: 1.0}, EXTERIOR), b)
        for m, c in img.coeffs.items():
            out[m, col] = c
    return out


def action_matrix(a: MultivectorElement) -> np.ndarray:
    """Matrix of c(a) acting on the exterior module."""
    if a.kind != CLIFFORD:
        raise AlgebraMismatchError("action_matrix takes a clifford element")
    n = a.n
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        img = clifford_action_dict(a.coeffs, {col: 1.0}, a.form.matrix)
        for m, c in img.items():
            out[m, col] = c
    return out


def parity_matrix(n: int) -> np.ndarray:
    dim = 1 << n
    return np.diag([(-1.0) ** (m.bit_count()) for m in range(dim)]).astype(complex)


# ---------------------------------------------------------------------------
# chirality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChiralityElement:
    """Chirality Gamma = i^(n/2+s) e^1...e^n for an oriented orthonormal system.

    s (``negative_count``) counts negative eigenvalues of B; s = 0 reproduces
    the i^(n/2) phase, s > 0 is this package's documented extension keeping
    Gamma^2 = 1 (flag it in reports).
    """

    element: MultivectorElement
    phase: complex
    negative_count: int
    orientation: int


def chirality(b: BilinearForm, orientation: int = 1) -> ChiralityElement:
    n = b.n
    if n % 2:
        raise ValueError("chirality needs even dimension")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    vals, vecs = np.linalg.eigh(b.matrix)
    s = int(np.sum(vals < 0))
    cols = [vecs[:, a] / np.sqrt(abs(vals[a])) for a in range(n)]
    basis = np.stack(cols, axis=1)
    if np.linalg.det(basis) < 0:
        basis[:, 0] = -basis[:, 0]
    prod = None
    for a in range(n):
        gen = MultivectorElement.covector(basis[:, a].astype(complex), CLIFFORD, b)
        prod = gen if prod is None else clifford_product(prod, gen)
    phase = 1j ** ((n // 2 + s) % 4)
    gamma = prod * (phase * orientation)
    square = clifford_product(gamma, gamma)
    if (square - MultivectorElement.scalar(1.0, n, CLIFFORD, b)).norm() > 1e-9:
        raise AssertionError("chirality construction failed to square to one")
    return ChiralityElement(gamma, phase * orientation, s, orientation)
