"""Chart registry, metric jets, config loading, domain validation."""

import json

import numpy as np
import pytest

import fd_oracle
from diracgeo.charts import (Chart, ChartDomainError, chart_from_config,
                             get_chart, load_chart_config, metric_jet,
                             registry)

EXPECTED = {"flat2", "flat3", "flat4", "torus2", "torus3", "torus4",
            "sphere2", "sphere4", "hyperbolic2", "hyperbolic4",
            "poly2", "poly3", "poly4", "minkowski4"}


def test_registry_contents():
    names = set(registry())
    assert EXPECTED <= names
    for name in names:
        ch = get_chart(name)
        assert isinstance(ch, Chart)
        assert ch.name == name


def test_unknown_chart():
    with pytest.raises(KeyError):
        get_chart("klein_bottle")


def test_sampled_points_are_valid():
    rng = np.random.default_rng(11)
    for name in sorted(EXPECTED):
        ch = get_chart(name)
        for _ in range(5):
            x = ch.sample_point(rng)
            assert len(x) == ch.n
            ch.validate_point(x)  # must not raise
            mj = metric_jet(ch, x)
            assert np.max(np.abs(mj.g - mj.g.T)) < 1e-14
            assert abs(mj.det) > 1e-10


def test_out_of_domain_point_rejected():
    hy = get_chart("hyperbolic2")
    with pytest.raises(ChartDomainError):
        hy.validate_point(np.array([1.0, 0.5]))
    with pytest.raises(ChartDomainError):
        hy.validate_point(np.array([0.1, 0.1, 0.1]))  # wrong shape


def test_metric_jet_derivatives_match_finite_differences():
    rng = np.random.default_rng(4)
    for name in ("sphere2", "poly3", "torus2", "hyperbolic4"):
        ch = get_chart(name)
        x = ch.sample_point(rng)
        mj = metric_jet(ch, x)
        g, dg, d2g = fd_oracle.fd_metric_derivatives(ch, x)
        # truncation floor: hyperbolic4 factor derivatives grow near the ball edge
        assert np.max(np.abs(mj.g - g)) < 1e-12
        assert np.max(np.abs(mj.dg - dg)) < 1e-7
        assert np.max(np.abs(mj.d2g - d2g)) < 1e-5


def test_metric_inverse_and_derivative_consistency():
    rng = np.random.default_rng(9)
    ch = get_chart("poly4")
    x = ch.sample_point(rng)
    mj = metric_jet(ch, x)
    assert np.max(np.abs(mj.g @ mj.g_inv - np.eye(ch.n))) < 1e-12
    # d(g^-1) = -g^-1 dg g^-1
    want = -np.einsum("ik,akl,lj->aij", mj.g_inv, mj.dg, mj.g_inv)
    assert np.max(np.abs(mj.dg_inv - want)) < 1e-12


def test_conformal_charts_are_scalar_multiples_of_identity():
    rng = np.random.default_rng(6)
    for name in ("sphere2", "sphere4", "hyperbolic2", "hyperbolic4"):
        ch = get_chart(name)
        assert ch.kind == "conformal"
        x = ch.sample_point(rng)
        mj = metric_jet(ch, x)
        lam = mj.g[0, 0]
        assert np.max(np.abs(mj.g - lam * np.eye(ch.n))) < 1e-13


def test_minkowski_signature():
    ch = get_chart("minkowski4")
    assert not ch.riemannian
    mj = metric_jet(ch, np.zeros(4))
    sig = np.sort(np.linalg.eigvalsh(mj.g))
    assert sig[0] < 0 < sig[1]


def test_chart_from_config_roundtrip(tmp_path):
    cfg = {"name": "shifted_torus", "kind": "torus", "dimension": 2}
    ch = chart_from_config(cfg)
    assert ch.n == 2
    path = tmp_path / "chart.json"
    path.write_text(json.dumps(cfg))
    ch2 = load_chart_config(str(path))
    assert ch2.n == ch.n
    rng = np.random.default_rng(0)
    x = ch.sample_point(rng)
    assert np.max(np.abs(metric_jet(ch, x).g - metric_jet(ch2, x).g)) < 1e-15


def test_chart_config_rejects_bad_kind():
    with pytest.raises((ValueError, KeyError)):
        chart_from_config({"name": "x", "kind": "lorentzian_foam",
                           "dimension": 2})
