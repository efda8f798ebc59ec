"""Coordinate charts with smooth metrics and exact pointwise metric jets.

A chart's ``metric_fn`` is written against generic scalar arithmetic, so the
same function body evaluates on plain floats (used by finite-difference
oracles in the test suite) and on jets (used everywhere else for exact first
and second derivatives).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .jets import SJet, as_jet, jet_abs, jet_det, jet_log, jet_mat_from_arrays, jet_sqrt, seed_point


class ChartDomainError(ValueError):
    """Point lies outside the chart's domain."""


class DegenerateMetricError(ValueError):
    """Metric fails symmetry/nondegeneracy/signature requirements at a point."""


@dataclass
class Chart:
    """A named coordinate chart: dimension, metric function, domain."""

    name: str
    n: int
    negatives: int                       # count of negative metric eigenvalues
    metric_fn: Callable[[Sequence], Sequence]
    domain: Callable[[np.ndarray], bool] = field(default=lambda x: True)
    period: Optional[float] = None       # 2*pi on torus charts
    kind: str = "generic"
    sample_radius: float = 1.5
    lam_fn: Optional[Callable] = None    # conformal factor for conformal kind

    @property
    def riemannian(self) -> bool:
        return self.negatives == 0

    def validate_point(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ChartDomainError(
                f"chart {self.name!r} expects {self.n} coordinates, got {x.shape}")
        if not self.domain(x):
            raise ChartDomainError(f"point {x.tolist()} outside domain of {self.name!r}")
        return x

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        if self.period is not None:
            return rng.uniform(0.0, self.period, size=self.n)
        for _ in range(1000):
            x = rng.uniform(-self.sample_radius, self.sample_radius, size=self.n)
            if self.domain(x):
                return x
        raise ChartDomainError(f"could not sample a domain point of {self.name!r}")


class MetricJet:
    """Metric with exact derivatives at one point.

    dg[k, i, j] = d_k g_ij and d2g[l, k, i, j] = d_l d_k g_ij; inverse-metric
    and volume-factor jets are derived once here and shared downstream.
    """

    def __init__(self, chart: Chart, x: np.ndarray, g: np.ndarray,
                 dg: np.ndarray, d2g: np.ndarray):
        self.chart = chart
        self.x = x
        self.n = chart.n
        self.g = g
        self.dg = dg
        self.d2g = d2g
        self.g_inv = np.linalg.inv(g)

        # d(g^-1) = -g^-1 (dg) g^-1 ; second derivatives by one more product rule
        gi = self.g_inv
        self.dg_inv = np.einsum("ia,kab,bj->kij", -gi, dg, gi)
        term = np.einsum("ia,lab,bc,kcd,dj->lkij", gi, dg, gi, dg, gi)
        self.d2g_inv = term + np.transpose(term, (1, 0, 2, 3)) \
            - np.einsum("ia,lkab,bj->lkij", gi, d2g, gi)

        det_jet = jet_det(jet_mat_from_arrays(g, dg, d2g))
        self.det = float(np.real(det_jet.val))
        sqrt_jet = jet_sqrt(jet_abs(det_jet))
        self.sqrt_abs_det = float(np.real(sqrt_jet.val))
        self.dsqrt = np.real(sqrt_jet.d).astype(float)
        self.ddsqrt = np.real(sqrt_jet.dd).astype(float)
        h_jet = jet_log(jet_sqrt(jet_abs(det_jet)))
        self.dh = np.real(h_jet.d).astype(float)
        self.ddh = np.real(h_jet.dd).astype(float)


def _entry_arrays(entry, n: int):
    if isinstance(entry, SJet):
        return entry.val, entry.d, entry.dd
    return complex(entry), np.zeros(n, dtype=complex), np.zeros((n, n), dtype=complex)


def metric_jet(chart: Chart, x: Sequence[float]) -> MetricJet:
    """Evaluate the chart metric and its first two derivatives at x."""
    x = chart.validate_point(x)
    n = chart.n
    jets = seed_point(x, order=2)
    raw = chart.metric_fn(jets)
    g = np.zeros((n, n))
    dg = np.zeros((n, n, n))
    d2g = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            val, d, dd = _entry_arrays(raw[i][j], n)
            if abs(np.imag(val)) > 1e-12:
                raise DegenerateMetricError("metric entries must be real")
            g[i, j] = np.real(val)
            dg[:, i, j] = np.real(d)
            d2g[:, :, i, j] = np.real(dd)
    if not np.allclose(g, g.T, atol=1e-10):
        raise DegenerateMetricError(f"metric not symmetric at {x.tolist()}")
    det = np.linalg.det(g)
    if abs(det) <= 1e-10:
        raise DegenerateMetricError(f"|det g| = {abs(det):.3e} at {x.tolist()}")
    neg = int(np.sum(np.linalg.eigvalsh(g) < 0))
    if neg != chart.negatives:
        raise DegenerateMetricError(
            f"signature drifted at {x.tolist()}: {neg} negative directions, "
            f"expected {chart.negatives}")
    # symmetrize derivative arrays in (i, j) to kill representation roundoff
    dg = 0.5 * (dg + np.transpose(dg, (0, 2, 1)))
    d2g = 0.5 * (d2g + np.transpose(d2g, (0, 1, 3, 2)))
    d2g = 0.5 * (d2g + np.transpose(d2g, (1, 0, 2, 3)))
    return MetricJet(chart, x, g, dg, d2g)


# ---------------------------------------------------------------------------
# built-in charts
# ---------------------------------------------------------------------------


def _const_metric(m: np.ndarray):
    rows = [[float(m[i, j]) for j in range(m.shape[1])] for i in range(m.shape[0])]

    def metric_fn(xs):
        return rows

    return metric_fn


def flat_chart(n: int) -> Chart:
    """Euclidean R^n with the identity metric."""
    return Chart(f"flat{n}", n, 0, _const_metric(np.eye(n)), kind="flat")


def minkowski_chart() -> Chart:
    """R^4 with signature (-, +, +, +)."""
    return Chart("minkowski4", 4, 1, _const_metric(np.diag([-1.0, 1, 1, 1])),
                 kind="minkowski")


def torus_chart(n: int) -> Chart:
    """Flat torus, coordinates periodic with period 2*pi."""
    return Chart(f"torus{n}", n, 0, _const_metric(np.eye(n)),
                 period=2.0 * np.pi, kind="torus")


def conformal_chart(n: int, which: str) -> Chart:
    """Conformally flat chart g = lambda^-2 delta.

    which = "sphere":    lambda = (1 + |x|^2)/2, the unit round sphere;
    which = "hyperbolic": lambda = (1 - |x|^2)/2 on the open unit ball.
    """
    sign = {"sphere": 1.0, "hyperbolic": -1.0}[which]

    def lam(xs):
        q = xs[0] * xs[0]
        for c in xs[1:]:
            q = q + c * c
        return (1.0 + sign * q) * 0.5

    def metric_fn(xs):
        w = lam(xs)
        coef = 1.0 / (w * w)
        zero = 0.0
        return [[coef if i == j else zero for j in range(n)] for i in range(n)]

    if which == "hyperbolic":
        domain = lambda x: float(np.dot(x, x)) < 1.0 - 1e-9
        radius = 0.55
        name = f"hyperbolic{n}"
    else:
        domain = lambda x: True
        radius = 1.2
        name = f"sphere{n}"
    return Chart(name, n, 0, metric_fn, domain=domain, kind="conformal",
                 sample_radius=radius, lam_fn=lam)


def polynomial_chart(n: int, seed: int = 7, scale: float = 0.04) -> Chart:
    """delta plus a small random symmetric quadratic perturbation.

    Rejection-sampled: coefficients are redrawn until the metric stays
    comfortably positive definite on the sampling box.
    """
    radius = 0.9
    for attempt in range(64):
        rng = np.random.default_rng(seed + 1000 * attempt)
        s0 = rng.uniform(-1, 1, size=(n, n)) * scale
        s0 = 0.5 * (s0 + s0.T)
        s1 = rng.uniform(-1, 1, size=(n, n, n)) * scale
        s1 = 0.5 * (s1 + np.transpose(s1, (1, 0, 2)))
        s2 = rng.uniform(-1, 1, size=(n, n, n, n)) * scale
        s2 = 0.5 * (s2 + np.transpose(s2, (1, 0, 2, 3)))
        s2 = 0.5 * (s2 + np.transpose(s2, (0, 1, 3, 2)))

        def metric_fn(xs, s0=s0, s1=s1, s2=s2):
            out = []
            for i in range(n):
                row = []
                for j in range(n):
                    e = (1.0 if i == j else 0.0) + s0[i, j]
                    for k in range(n):
                        e = e + s1[i, j, k] * xs[k]
                        for l in range(n):
                            e = e + s2[i, j, k, l] * (xs[k] * xs[l])
                    row.append(e)
                out.append(row)
            return out

        check = np.random.default_rng(seed + 99)
        ok = True
        for _ in range(200):
            x = check.uniform(-radius, radius, size=n)
            gm = np.array([[complex(v).real for v in row] for row in metric_fn(list(x))])
            if np.min(np.linalg.eigvalsh(gm)) < 0.5:
                ok = False
                break
        if ok:
            return Chart(f"poly{n}", n, 0, metric_fn, kind="polynomial",
                         sample_radius=radius)
    raise DegenerateMetricError("could not draw a positive definite polynomial metric")


_BUILDERS: dict = {}


def _register(chart: Chart) -> Chart:
    _BUILDERS[chart.name] = chart
    return chart


def registry() -> dict:
    if not _BUILDERS:
        for n in (2, 3, 4):
            _register(flat_chart(n))
            _register(torus_chart(n))
            _register(polynomial_chart(n))
        _register(minkowski_chart())
        for n in (2, 4):
            _register(conformal_chart(n, "sphere"))
            _register(conformal_chart(n, "hyperbolic"))
    return _BUILDERS


def get_chart(name: str) -> Chart:
    reg = registry()
    if name not in reg:
        raise KeyError(f"unknown chart {name!r}; available: {sorted(reg)}")
    return reg[name]


def chart_from_config(cfg: dict) -> Chart:
    """Build a chart from a config mapping.

    Keys: name, dimension, kind in {flat, minkowski, torus, conformal,
    polynomial}; "lambda" in {sphere, hyperbolic} for conformal; coefficients
    [seed, scale] for polynomial.
    """
    try:
        kind = cfg["kind"]
        n = int(cfg["dimension"])
    except KeyError as exc:
        raise ValueError(f"chart config missing key {exc}") from exc
    if kind == "flat":
        chart = flat_chart(n)
    elif kind == "minkowski":
        if n != 4:
            raise ValueError("minkowski chart is four-dimensional")
        chart = minkowski_chart()
    elif kind == "torus":
        chart = torus_chart(n)
    elif kind == "conformal":
        lam = cfg.get("lambda", "sphere")
        if lam not in ("sphere", "hyperbolic"):
            raise ValueError(f"unknown conformal factor {lam!r}")
        chart = conformal_chart(n, lam)
    elif kind == "polynomial":
        coeffs = cfg.get("coefficients", [7, 0.04])
        if len(coeffs) != 2:
            raise ValueError("polynomial chart coefficients are [seed, scale]")
        chart = polynomial_chart(n, int(coeffs[0]), float(coeffs[1]))
    else:
        raise ValueError(f"unknown chart kind {kind!r}")
    if "name" in cfg:
        chart.name = str(cfg["name"])
    return chart


def load_chart_config(path: str) -> Chart:
    with open(path, "r", encoding="utf-8") as fh:
        return chart_from_config(json.load(fh))
