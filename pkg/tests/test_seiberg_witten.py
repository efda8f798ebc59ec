"""Monopole configurations on the flat 4-torus: equations and functionals."""

import numpy as np
import pytest

from diracgeo import seiberg_witten as swm
from diracgeo.seiberg_witten import (BLOCK_INDICES, SWConfig, SWConfigError,
                                     curvature_at, form_norm_sq, load_sw_config,
                                     potential_at, quadratic_form,
                                     quadratic_identity_residual,
                                     random_sw_config, self_dual_part,
                                     spinor_at, sw_config_from_dict,
                                     sw_functional, sw_residuals)


def _cfg_dict(**over):
    base = {"grid": 16, "band": 2, "chirality_block": "+",
            "a_modes": [[0, 1, 0, 0, 0, 0.5, -0.25]],
            "psi_modes": [[0, 0, 1, 0, 0, 1.0, 0.0]]}
    base.update(over)
    return base


def test_block_indices():
    assert BLOCK_INDICES["+"] == (0, 3)
    assert BLOCK_INDICES["-"] == (1, 2)


def test_config_validation_messages():
    with pytest.raises(SWConfigError, match="Nyquist"):
        sw_config_from_dict(_cfg_dict(grid=3))
    with pytest.raises(SWConfigError, match="exceeds band"):
        sw_config_from_dict(_cfg_dict(a_modes=[[0, 3, 0, 0, 0, 1.0, 0.0]]))
    with pytest.raises(SWConfigError, match="outside the declared chirality"):
        sw_config_from_dict(_cfg_dict(psi_modes=[[1, 0, 0, 0, 0, 1.0, 0.0]]))
    with pytest.raises(SWConfigError, match=r"rows are \[component, k1..k4, re, im\]"):
        sw_config_from_dict(_cfg_dict(a_modes=[[0, 1, 0, 0, 0.5]]))
    with pytest.raises(SWConfigError, match="chirality block"):
        sw_config_from_dict(_cfg_dict(chirality_block="left"))
    with pytest.raises(SWConfigError, match="component"):
        sw_config_from_dict(_cfg_dict(a_modes=[[5, 1, 0, 0, 0, 1.0, 0.0]]))
    # the minus block accepts components 1 and 2
    sw_config_from_dict(_cfg_dict(chirality_block="-",
                                  psi_modes=[[2, 0, 1, 0, 0, 0.3, 0.1]]))


def test_config_file_roundtrip(tmp_path):
    import json
    path = tmp_path / "m.json"
    path.write_text(json.dumps(_cfg_dict()))
    cfg = load_sw_config(str(path))
    assert cfg.grid == 16 and cfg.band == 2 and cfg.block == "+"
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    with pytest.raises(SWConfigError):
        load_sw_config(str(bad))


def test_potential_is_purely_imaginary():
    rng = np.random.default_rng(1)
    cfg = random_sw_config(rng)
    for _ in range(10):
        x = rng.uniform(0, 2 * np.pi, 4)
        val, dval = potential_at(cfg, x)
        assert np.max(np.abs(val.real)) < 1e-13
        assert np.max(np.abs(dval.real)) < 1e-13


def test_field_derivatives_match_finite_differences():
    rng = np.random.default_rng(2)
    cfg = random_sw_config(rng)
    h = 1e-6
    for _ in range(5):
        x = rng.uniform(0, 2 * np.pi, 4)
        _, da = potential_at(cfg, x)
        _, dpsi = spinor_at(cfg, x)
        for axis in range(4):
            e = np.zeros(4)
            e[axis] = h
            ap, _ = potential_at(cfg, x + e)
            am, _ = potential_at(cfg, x - e)
            assert np.max(np.abs((ap - am) / (2 * h) - da[axis])) < 1e-7
            pp, _ = spinor_at(cfg, x + e)
            pm, _ = spinor_at(cfg, x - e)
            assert np.max(np.abs((pp - pm) / (2 * h) - dpsi[axis])) < 1e-7


def test_curvature_is_antisymmetric_and_closed():
    rng = np.random.default_rng(3)
    cfg = random_sw_config(rng)
    x = rng.uniform(0, 2 * np.pi, 4)
    f = curvature_at(cfg, x)
    assert np.max(np.abs(f + f.T)) < 1e-13
    # dF = 0 follows from F = dA; check one Bianchi component by FD
    h = 1e-5
    for (a, b, c) in ((0, 1, 2), (1, 2, 3)):
        total = 0.0j
        for (i, j, k) in ((a, b, c), (b, c, a), (c, a, b)):
            e = np.zeros(4)
            e[i] = h
            total += (curvature_at(cfg, x + e)[j, k]
                      - curvature_at(cfg, x - e)[j, k]) / (2 * h)
        assert abs(total) < 1e-8


def test_self_dual_projection_is_idempotent():
    rng = np.random.default_rng(4)
    raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    f = raw - raw.T
    plus = self_dual_part(f)
    assert np.max(np.abs(self_dual_part(plus) - plus)) < 1e-13
    minus = f - plus
    assert np.max(np.abs(self_dual_part(minus))) < 1e-13


def test_quadratic_form_chirality():
    rng = np.random.default_rng(5)
    plus = np.zeros(4, dtype=complex)
    for c in BLOCK_INDICES["+"]:
        plus[c] = rng.normal() + 1j * rng.normal()
    q = quadratic_form(plus)
    assert np.max(np.abs(q + q.T)) < 1e-13
    assert np.max(np.abs(self_dual_part(q) - q)) < 1e-13
    minus = np.zeros(4, dtype=complex)
    for c in BLOCK_INDICES["-"]:
        minus[c] = rng.normal() + 1j * rng.normal()
    q2 = quadratic_form(minus)
    # the opposite block lands in the anti-self-dual half
    assert np.max(np.abs(self_dual_part(q2))) < 1e-13


def test_quadratic_identity_for_chiral_spinors():
    rng = np.random.default_rng(6)
    for block in ("+", "-"):
        for _ in range(50):
            psi = np.zeros(4, dtype=complex)
            for c in BLOCK_INDICES[block]:
                psi[c] = rng.normal() + 1j * rng.normal()
            psi *= rng.uniform(0.1, 20.0)
            assert quadratic_identity_residual(psi) < 1e-12
    # a mixed-chirality spinor genuinely breaks it
    mixed = np.array([1.0, 1.0, 0.0, 0.0], dtype=complex)
    assert quadratic_identity_residual(mixed) > 1e-3


def test_residuals_report_keys():
    rng = np.random.default_rng(7)
    cfg = random_sw_config(rng)
    out = sw_residuals(cfg, rng.uniform(0, 2 * np.pi, 4))
    assert set(out) == {"dirac", "curvature", "quadratic_identity"}
    assert out["quadratic_identity"] < 1e-12


def test_zero_configuration_gives_zero_functional():
    cfg = sw_config_from_dict({"grid": 8, "band": 1, "chirality_block": "+",
                               "a_modes": [], "psi_modes": []})
    out = sw_functional(cfg)
    assert out["w_equations"] == 0.0
    assert out["w_weitzenbock"] == 0.0
    assert out["gap"] == 0.0


def test_single_mode_spinor_functional_gap():
    cfg = sw_config_from_dict(_cfg_dict(a_modes=[]))
    out = sw_functional(cfg)
    assert out["w_equations"] > 0
    assert out["gap"] < 1e-8


def test_random_band2_functional_gap():
    rng = np.random.default_rng(42)
    cfg = random_sw_config(rng, band=2, grid=16)
    out = sw_functional(cfg)
    assert out["relative_gap"] < 1e-6


def test_functional_is_grid_independent_above_nyquist():
    rng = np.random.default_rng(8)
    cfg = random_sw_config(rng, band=1, grid=8)
    w8 = sw_functional(cfg)
    cfg16 = SWConfig(16, cfg.band, cfg.block, cfg.a_modes, cfg.psi_modes)
    w16 = sw_functional(cfg16)
    # integrands of a band-1 configuration alias on neither grid
    assert w8["w_equations"] == pytest.approx(w16["w_equations"], rel=1e-9)
    assert w8["w_weitzenbock"] == pytest.approx(w16["w_weitzenbock"], rel=1e-9)


def test_random_config_is_seed_deterministic():
    a = random_sw_config(np.random.default_rng(11))
    b = random_sw_config(np.random.default_rng(11))
    assert a.a_modes == b.a_modes
    assert a.psi_modes == b.psi_modes
    c = random_sw_config(np.random.default_rng(12))
    assert c.a_modes != a.a_modes
