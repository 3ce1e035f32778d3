"""Curve tabulation and scalar maximization."""

import pytest

from spdcfc import (
    SweepSpec,
    ceiling_scan,
    efficiency,
    efficiency_curve,
    maximize_eta,
)
from spdcfc.errors import DomainError
from spdcfc.sweep import _with_variable

from conftest import REFERENCE_WALKOFFS, reference_config
from test_core import ETA_1MM, ETA_3MM


def test_spec_validation():
    cfg = reference_config()
    with pytest.raises(DomainError):
        SweepSpec(l_grid=(), mu_values=(49.0,), fixed=cfg)
    with pytest.raises(DomainError):
        SweepSpec(l_grid=(1000.0, 1000.0), mu_values=(49.0,), fixed=cfg)
    with pytest.raises(DomainError):
        SweepSpec(l_grid=(2000.0, 1000.0), mu_values=(49.0,), fixed=cfg)
    with pytest.raises(DomainError):
        SweepSpec(l_grid=(1000.0,), mu_values=(-49.0,), fixed=cfg)


def test_single_point_curve():
    spec = SweepSpec(l_grid=(3000.0,), mu_values=(49.0,), fixed=reference_config())
    result = efficiency_curve(spec)
    assert len(result.rows) == 1
    row = result.rows[0]
    assert (row.length, row.mu) == (3000.0, 49.0)
    assert row.eta == pytest.approx(ETA_3MM, rel=1e-12)


def test_shorter_crystal_couples_better():
    spec = SweepSpec(l_grid=(1000.0, 3000.0), mu_values=(49.0,),
                     fixed=reference_config())
    rows = efficiency_curve(spec).rows
    assert rows[0].eta == pytest.approx(ETA_1MM, rel=1e-12)
    assert rows[0].eta > rows[1].eta


def test_row_ordering_length_major():
    spec = SweepSpec(l_grid=(1000.0, 2000.0), mu_values=(25.0, 49.0),
                     fixed=reference_config())
    rows = efficiency_curve(spec).rows
    assert [(r.length, r.mu) for r in rows] == [
        (1000.0, 25.0), (1000.0, 49.0), (2000.0, 25.0), (2000.0, 49.0)]
    assert len(rows) == 4


def test_curve_error_annotated_with_row():
    spec = SweepSpec(l_grid=(1000.0, 1e308), mu_values=(49.0,),
                     fixed=reference_config())
    with pytest.raises(DomainError, match=r"row L=1e\+308"):
        efficiency_curve(spec)


def test_maximize_reference_ceiling():
    res = maximize_eta(reference_config(2000.0), "xi", (0.1, 10.0))
    assert res.eta_max == pytest.approx(0.489, abs=0.005)
    assert res.argmax == pytest.approx(1.18, abs=0.05)
    assert not res.boundary
    assert res.iterations > 0
    # never below either bracket end
    for end in res.bracket:
        assert efficiency(_with_variable(reference_config(2000.0), "xi",
                                         end)).eta <= res.eta_max
    assert 0.0 < res.eta_max <= 1.0


def test_maximize_never_below_grid_scan():
    cfg = reference_config(2000.0)
    res = maximize_eta(cfg, "xi", (0.1, 10.0))
    grid_best = max(
        efficiency(_with_variable(cfg, "xi", 0.1 + 9.9 * k / 63)).eta
        for k in range(64))
    assert res.eta_max >= grid_best


def test_maximize_short_crystal_hits_lower_boundary():
    res = maximize_eta(reference_config(1e-3), "xi", (0.1, 10.0))
    assert res.boundary
    assert res.argmax == pytest.approx(0.1, abs=1e-3)
    assert res.eta_max == pytest.approx(1.0, abs=1e-3)


def test_maximize_mu_xi_reparameterization():
    cfg = reference_config(2000.0)
    xi_run = maximize_eta(cfg, "xi", (0.1, 10.0))
    scale = cfg.pump_waist / cfg.fiber_mode_radius
    mu_run = maximize_eta(cfg, "mu", (0.1 * scale, 10.0 * scale))
    assert mu_run.eta_max == pytest.approx(xi_run.eta_max, rel=1e-9)
    assert mu_run.argmax / scale == pytest.approx(xi_run.argmax, rel=1e-6)


def test_maximize_over_pump_waist():
    res = maximize_eta(reference_config(2000.0), "rp", (10.0, 300.0))
    assert 0.0 < res.eta_max <= 1.0
    probe = efficiency(_with_variable(reference_config(2000.0), "rp",
                                      res.argmax)).eta
    assert probe == pytest.approx(res.eta_max, rel=1e-9)


def test_maximize_validates_inputs():
    cfg = reference_config(2000.0)
    with pytest.raises(DomainError):
        maximize_eta(cfg, "xi", (0.0, 10.0))
    with pytest.raises(DomainError):
        maximize_eta(cfg, "xi", (5.0, 5.0))
    with pytest.raises(DomainError):
        maximize_eta(cfg, "waist", (0.1, 10.0))


def test_ceiling_scan_non_increasing():
    table = ceiling_scan(53.0, REFERENCE_WALKOFFS,
                         [2000.0, 2500.0, 3000.0, 4000.0, 5000.0])
    assert [length for length, _ in table] == [2000.0, 2500.0, 3000.0,
                                               4000.0, 5000.0]
    values = [eta for _, eta in table]
    assert values[0] == pytest.approx(0.489, abs=0.005)
    assert values[2] < 0.489
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_ceiling_scan_validates_grid():
    with pytest.raises(DomainError):
        ceiling_scan(53.0, REFERENCE_WALKOFFS, [])
