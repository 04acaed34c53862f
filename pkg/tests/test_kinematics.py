import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matterwave.kinematics import (
    MAX_BETA,
    BeamPath,
    Device,
    DeviceFrame,
    ElasticMirror,
    ExperimentParams,
    Frame,
    KickEvent,
    PhotonRecoil,
    Segment,
    analyzer_height,
    bragg_acceptance_estimate,
    build_paths,
    closure_gap,
    closure_height_closed_form,
    closure_heights,
    evaluate,
)

EXPECTED_CLOSURE = {"atom-lab": -2.0, "atom-freefall": 0.0, "neutron-lab": 0.0, "neutron-freefall": 2.0}


def test_derived_quantities(desk):
    assert desk.v_y0 == pytest.approx(desk.hbar * desk.kappa / (2 * desk.m), rel=1e-15)
    assert desk.d == pytest.approx(0.5 * 9.8 * 0.01)
    assert desk.R == pytest.approx(1.6e7 * 9.8 * 0.01)
    assert desk.compton_frequency == pytest.approx(desk.m * desk.c**2 / desk.hbar)


@pytest.mark.parametrize("field, value", [("T", -0.1), ("m", 0.0), ("g", -1.0), ("kappa", math.nan), ("v_x0", -1.0)])
def test_params_reject_bad_values(desk, field, value):
    with pytest.raises(ValueError):
        desk.replace(**{field: value})


def test_params_reject_fast_launch(desk):
    # v_y0 = hbar kappa / 2m beyond 1e-3 c
    with pytest.raises(ValueError, match="slow-motion"):
        desk.replace(m=desk.hbar * desk.kappa / (2 * MAX_BETA * desk.c))


def test_closure_heights(situation, desk):
    yu, yl = closure_heights(situation, desk)
    want = EXPECTED_CLOSURE[situation.label] * desk.g * desk.T**2
    assert yu == pytest.approx(want, rel=1e-12, abs=1e-12 * desk.g * desk.T**2)
    assert closure_gap(situation, desk) <= 1e-12 * desk.g * desk.T**2
    assert closure_height_closed_form(situation, desk) == want


def test_neutron_free_fall_meets_at_4d(desk):
    yu, _ = closure_heights(DeviceFrame("neutron", "freefall"), desk)
    assert yu == pytest.approx(4 * desk.d, rel=1e-12)


@pytest.mark.parametrize("device", list(Device))
def test_frame_consistency(device, desk):
    """Free-fall positions exceed laboratory positions by g t^2 / 2."""
    lab = build_paths(DeviceFrame(device, Frame.LAB), desk)
    ff = build_paths(DeviceFrame(device, Frame.FREE_FALL), desk)
    for arm_lab, arm_ff in zip(lab, ff):
        for t in np.linspace(0, 2 * desk.T, 41):
            y_lab, v_lab = evaluate(arm_lab, t)
            y_ff, v_ff = evaluate(arm_ff, t)
            assert y_ff - y_lab == pytest.approx(0.5 * desk.g * t * t, rel=1e-9, abs=1e-15)
            assert v_ff - v_lab == pytest.approx(desk.g * t, rel=1e-9, abs=1e-12)


def _jump_at_T(path, T):
    seg_before = path.segment_at(0.0)
    return evaluate(path, T)[1] - seg_before.velocity(T)


def test_mirror_and_photon_kicks_differ_by_2gT(desk):
    atom = build_paths(DeviceFrame("atom", "lab"), desk)
    neutron = build_paths(DeviceFrame("neutron", "lab"), desk)
    for a, n in zip(atom, neutron):
        diff = _jump_at_T(n, desk.T) - _jump_at_T(a, desk.T)
        assert diff == pytest.approx(2 * desk.g * desk.T, rel=1e-9)


def test_atom_kicks(desk):
    upper, lower = build_paths(DeviceFrame("atom", "lab"), desk)
    dv = desk.hbar * desk.kappa / desk.m
    assert upper.v_incoming == pytest.approx(-desk.v_y0)
    assert evaluate(upper, 0.0)[1] == pytest.approx(desk.v_y0)
    # post-kick velocity at the final pulse: lower arm re-emits at 2T
    y, v = evaluate(lower, 2 * desk.T)
    assert v == pytest.approx(lower.segments[1].velocity(2 * desk.T) - dv)
    assert isinstance(lower.kicks[-1].kind, PhotonRecoil)


def test_free_fall_mirror_moves(desk):
    upper, _ = build_paths(DeviceFrame("neutron", "freefall"), desk)
    assert upper.kicks[0].kind == ElasticMirror(desk.g * desk.T)


def test_evaluate_outside_range(desk):
    upper, _ = build_paths(DeviceFrame("atom", "lab"), desk)
    with pytest.raises(ValueError):
        evaluate(upper, 2 * desk.T + 1e-3)


def test_path_validation():
    s1 = Segment(0.0, 1.0, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError, match="gap"):
        BeamPath((s1, Segment(1.5, 2.0, 1.0, 1.0, 0.0)), (), "upper")
    with pytest.raises(ValueError, match="no kick rule"):
        BeamPath((s1, Segment(1.0, 2.0, 1.0, -3.0, 0.0)), (KickEvent(1.0, ElasticMirror(0.0)),), "upper")
    with pytest.raises(ValueError, match="position"):
        BeamPath((s1, Segment(1.0, 2.0, 5.0, 1.0, 0.0)), (), "upper")
    ok = BeamPath((s1, Segment(1.0, 2.0, 1.0, -1.0, 0.0)), (KickEvent(1.0, ElasticMirror(0.0)),), "upper")
    assert evaluate(ok, 1.0) == (1.0, -1.0)


def test_analyzer_height(desk):
    assert analyzer_height(DeviceFrame("atom", "lab"), desk, 2 * desk.T) == 0.0
    assert analyzer_height(DeviceFrame("atom", "freefall"), desk, 2 * desk.T) == pytest.approx(4 * desk.d)


def test_bragg_estimate(desk):
    drop, deflection = bragg_acceptance_estimate(1e3, 1e-2, desk)
    assert drop == pytest.approx(4.9e-10)
    assert deflection == pytest.approx(9.8e-8)
    with pytest.raises(ValueError):
        bragg_acceptance_estimate(0.0, 1e-2, desk)


@settings(max_examples=60, deadline=None)
@given(
    g=st.floats(0.0, 30.0),
    T=st.floats(1e-3, 1.0),
    kappa=st.floats(1e5, 1e8),
    m=st.floats(1e-27, 1e-24),
)
def test_closure_scales_with_gT2(g, T, kappa, m):
    p = ExperimentParams(m=m, g=g, T=T, kappa=kappa)
    scale = max(g * T * T, p.v_y0 * T)
    for df in DeviceFrame.all():
        yu, yl = closure_heights(df, p)
        assert abs(yu - EXPECTED_CLOSURE[df.label] * g * T * T) <= 1e-12 * scale + 1e-300
        assert abs(yu - yl) <= 1e-12 * scale + 1e-300
