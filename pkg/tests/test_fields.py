"""Component-field evaluation, unit maps, and boundary classification tests."""

import numpy as np
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from topospec.basis import build_basis
from topospec.fields import (GridSpec, TripleSpec, classify_map,
                             component_field, term_field, triple_field)
from topospec.invariants import canonical_field
from topospec.states import make_state

st_l3 = st.lists(st.integers(-4, 4), min_size=3, max_size=3, unique=True)
st_index = st.integers(1, 8)


def _direct_component(state, matrix, r, phi):
    psi = state.fields(r, phi)
    return np.einsum("krp,kn,nrp->rp", psi.conj(), matrix, psi).real


@given(st_l3, st_index)
@settings(max_examples=30, deadline=None)
def test_term_field_matches_direct_expectation(l, index):
    rng = np.random.default_rng(index)
    state = make_state(l, rng.normal(size=3) + 1j * rng.normal(size=3))
    matrix = build_basis(3)[index - 1].matrix
    field = component_field(state, index)
    r = np.array([0.3, 0.9, 1.7])
    phi = np.linspace(0.1, 6.0, 7)
    m, _, _ = field.evaluate(r, phi)
    assert_allclose(m, _direct_component(state, matrix, r, phi), atol=1e-12)


@given(st_l3, st_index)
@settings(max_examples=20, deadline=None)
def test_term_field_derivatives(l, index):
    state = make_state(l, np.ones(3))
    field = component_field(state, index)
    r = np.array([0.8])
    phi = np.array([0.7])
    h = 1e-6
    m, mr, mp = field.evaluate(r, phi)
    m_rp = field.evaluate(r + h, phi)[0]
    m_rm = field.evaluate(r - h, phi)[0]
    m_pp = field.evaluate(r, phi + h)[0]
    m_pm = field.evaluate(r, phi - h)[0]
    assert_allclose(mr, (m_rp - m_rm) / (2 * h), rtol=1e-5, atol=1e-7)
    assert_allclose(mp, (m_pp - m_pm) / (2 * h), rtol=1e-5, atol=1e-7)


def test_scaled_evaluation_drops_envelope():
    state = make_state((-1, 0, 1), np.ones(3))
    field = component_field(state, 1)
    r = np.array([0.5, 1.5])
    phi = np.array([0.3, 2.0])
    m, _, _ = field.evaluate(r, phi)
    ms, _, _ = field.evaluate(r, phi, scaled=True)
    assert_allclose(ms * np.exp(-2.0 * r * r)[:, None], m, atol=1e-12)


def test_unit_field_is_normalized_and_tangent():
    state = make_state((-1, 0, 1), np.ones(3))
    field = canonical_field(state, "123")
    r = np.linspace(0.05, 4.0, 9)
    phi = np.linspace(0.0, 2 * np.pi, 11)
    s, sr, sp = field.unit(r, phi)
    assert_allclose(np.sum(s * s, axis=0), 1.0, atol=1e-12)
    assert_allclose(np.sum(s * sr, axis=0), 0.0, atol=1e-10)
    assert_allclose(np.sum(s * sp, axis=0), 0.0, atol=1e-10)


def test_unit_field_survives_extreme_radii():
    # the envelope-free rescale keeps values finite far outside the waist
    state = make_state((-4, 0, 4), np.ones(3))
    field = canonical_field(state, "451")
    s, sr, sp = field.unit(np.array([1e-3, 50.0]), np.array([0.4]))
    assert np.all(np.isfinite(s)) and np.all(np.isfinite(sr))
    assert_allclose(np.sum(s * s, axis=0), 1.0, atol=1e-9)


def test_origin_fix_makes_third_single_signed():
    state = make_state((-1, 0, 1), np.ones(3))
    field = canonical_field(state, "124")
    assert field.sigma != 0.0
    phi = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
    m, _, _ = field.evaluate(np.array([0.7]), phi, fix=True)
    third = m[2, 0, :]
    assert np.all(third <= 1e-12) or np.all(third >= -1e-12)


def test_triple_spec_validation():
    import pytest
    with pytest.raises(ValueError):
        TripleSpec((1, 1, 2))
    with pytest.raises(ValueError):
        TripleSpec((0, 1, 2))
    assert TripleSpec((3, 1, 2)).indices == (1, 2, 3)
    assert TripleSpec((1, 2, 3)).label == "1-2-3"


def test_arrangement_keeps_orientation():
    # (1,2,3) arranges to identity; a pair found in another slot rotates evenly
    state = make_state((-1, 0, 1), np.ones(3))
    f = triple_field(state, TripleSpec((1, 2, 3)))
    assert f.arrangement == (0, 1, 2)
    f = triple_field(state, TripleSpec((3, 4, 5)))
    perm = f.arrangement
    parity = (perm[1] - perm[0]) * (perm[2] - perm[1]) * (perm[2] - perm[0])
    assert parity > 0


def test_classify_map_kinds():
    state = make_state((-1, 0, 1), np.ones(3))
    grid = GridSpec()
    assert classify_map(canonical_field(state, "123"), grid).kind == "sphere"
    assert classify_map(canonical_field(state, "124"), grid).kind == "disk"
    separable = make_state((-1, 0, 1), [1.0, 0.0, 0.0])
    assert classify_map(canonical_field(separable, "123"), grid).kind == "degenerate"


def test_radial_rule_integrates_known_integral():
    g = GridSpec(r_min=1e-3, r_max=8.0, n_r=512, n_phi=64)
    r, w = g.radial_rule()
    # integral of r^3 exp(-r^2) over the half line is 1/2
    assert_allclose(w @ (r**3 * np.exp(-r * r)), 0.5, atol=1e-6)


def test_grid_resolve_defaults():
    g = GridSpec().resolve((-3, 0, 3))
    assert g.r_max is not None and g.r_max > np.sqrt(3.0)
    assert g.n_phi == 64 * 6
