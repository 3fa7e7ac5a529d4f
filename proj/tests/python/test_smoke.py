"""Smoke tests for the python bindings."""

import math

import pytest

import largesol as ls


def test_keller_osserman_verdicts():
    assert ls.check_keller_osserman(ls.Nonlinearity.power(3.0)).verdict == "satisfied"
    assert ls.check_keller_osserman(ls.Nonlinearity.power(1.0)).verdict == "violated"
    assert ls.check_keller_osserman(ls.Nonlinearity.power_log(3.0)).verdict == "satisfied"
    assert ls.check_keller_osserman(ls.Nonlinearity.power_log(2.0)).verdict == "violated"


def test_primitive_and_transform_closed_forms():
    s2 = ls.Nonlinearity.power_thresholds(2.0, 1.0, 1.0)
    assert ls.eval_G(s2, 2.0) == pytest.approx(7.0 / 3.0, rel=1e-12)

    h = ls.Nonlinearity.polynomial([0.0, 0.0, 3.0])
    assert ls.transform_F(h, 2.0, 0.0) == pytest.approx(1.0, rel=1e-9)
    assert ls.inverse_F(h, 0.5, 0.0) == pytest.approx(8.0, rel=1e-9)
    assert ls.coefficient_b(h, 0.5, 0.0) == pytest.approx(6.0, rel=1e-8)


def test_radial_solves_and_rate():
    cube = ls.Nonlinearity.power(3.0)
    opts = ls.RadialOptions()
    opts.n_r = 1024
    opts.grading = 2.0
    cont = ls.solve_large_continuation(cube, 1.0, 3, [], opts, 5e-5)
    assert cont.status == "converged"
    assert cont.monotone_in_k
    prof = cont.profile
    assert prof.converged
    assert all(b >= a - 1e-9 for a, b in zip(prof.u_values, prof.u_values[1:]))

    wt = ls.solve_w_transform(cube, 1.0, 3, opts)
    assert wt.profile.converged
    assert wt.w_boundary == 0.0
    assert max(abs(d) for d in wt.dw_values) < 1.0
    gap = max(
        abs(a - b) / (1.0 + abs(b))
        for a, b, r in zip(wt.profile.u_values, prof.u_values, prof.r_nodes)
        if r <= 0.95
    )
    assert gap < 2e-4


def test_split_and_k0():
    nl = ls.Nonlinearity.cubic_minus_linear(5.0)
    split = ls.split_asymptotic(nl)
    assert split.M == pytest.approx(math.sqrt(5.0))
    assert split.g_tilde(1.0) == pytest.approx(-4.0)
    assert split.k0_bound(0.0, split.M) == pytest.approx(
        10.0 * math.sqrt(5.0 / 3.0) / 3.0, rel=1e-5
    )


def test_disk_solve_and_symmetry_checks():
    cube = ls.Nonlinearity.power(3.0)
    grid = ls.PolarGrid.build(0.0, 1.0, 64, 32)
    field = ls.solve_disk(cube, grid, 100.0, ls.DiskInit.radial_lift())
    assert field.converged
    var = ls.angular_variation(field)
    assert var.sup_variation <= 1e-10
    mp = ls.moving_plane_check(field, 1e-8)
    assert mp.moving_plane_pass
    mono = ls.monotonicity_check_field(field, ls.MonotonicityRegion.full_ball_minus_origin)
    assert mono.monotonicity_pass


def test_annulus_gradient_decay():
    cube = ls.Nonlinearity.power(3.0)
    grid = ls.PolarGrid.build(0.5, 1.0, 64, 32)
    inner = [2.0 + 0.5 * math.cos(t) for t in grid.theta]
    fields = ls.solve_annulus_2d_continuation(cube, grid, [1e3, 1e4, 1e5], inner)
    assert all(f.converged for f in fields)
    gnn = ls.gnn_hypothesis_check(fields[-1])
    assert gnn.radial_positive
    assert gnn.rho_at_098 < 0.05
