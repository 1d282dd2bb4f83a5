from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gabinv.cases import BASE_LATTICE, CASES, case
from gabinv.finite_gabor import gabor_matrix, membership, tf_shift
from gabinv.invariance import (
    InvarianceError,
    NotInvariantError,
    OracleMismatchError,
    brute_force_invariant,
    brute_force_lattice,
    build_masks,
    certify_multiplier,
    check,
    condition_d,
    decompose,
    full_shift_invariance,
    geometry,
    integer_invariance,
    invariance_set,
    model_for,
    multiplier_coset,
    multiplier_from_pattern,
    sample_generators,
)
from gabinv.lattice import (
    LatticeError,
    adjoint,
    fundamental_domain,
    integer_lattice,
    intermediate_lattices,
    parse_lattice,
    quotient_cosets,
)
from gabinv.zak import ZakGrid, ZakSplit, finite_zak, inverse_finite_zak
from oracles import dense_projector, points_in_box, symplectic_ok

SPLIT = ZakSplit(32, 4)
RES = SPLIT.resolution
LAM = parse_lattice(BASE_LATTICE)
Z2 = integer_lattice(2)
TILDES = intermediate_lattices(LAM, Z2)
NAMES = [c.name for c in CASES]


def _orbit(lam):
    """Points of Lambda° in [0,1)^2, from the commutation relation alone."""
    cand = points_in_box([(F(1, 8), 0), (0, F(1, 8))], 0, 1, span=8)
    return sorted(p for p in cand if symplectic_ok(p, lam.columns))


def _naive_condition_d(z, lam, tilde, eps=1e-9):
    absval = np.abs(z)
    nz = absval > eps * absval.max() if absval.max() > 0 else absval > 0
    P, Q = z.shape
    for r in _orbit(lam):
        if symplectic_ok(r, tilde.columns):
            continue
        di, dj = int(r[0] * P), int(r[1] * Q)
        for i in range(P):
            for j in range(Q):
                if nz[i, j] and nz[(i + di) % P, (j + dj) % Q]:
                    return False
    return True


def _window_from_zak(z):
    return inverse_finite_zak(ZakGrid(z, split=SPLIT))


def _mask_window(tilde, rng=None):
    mask = geometry(LAM, tilde, RES).masks.masks[0]
    z = mask.astype(complex)
    if rng is not None:
        z = z * np.exp(2j * np.pi * rng.random(RES)) * (1 + rng.random(RES))
    return _window_from_zak(z)


def _random_support_window(rng):
    support = rng.random(RES) < rng.uniform(0.05, 0.5)
    z = support * (rng.standard_normal(RES) + 1j * rng.standard_normal(RES))
    return _window_from_zak(z)


# -- masks ------------------------------------------------------------------------

def _naive_mask(lam, tilde, res, ell_rep):
    """B for the coset of ``ell_rep``: nodes p = r + d with r ~ ell_rep (mod Lambda~°), d in D."""
    adj = adjoint(lam)
    dom = fundamental_domain(adj, res)
    out = np.zeros(res, dtype=bool)
    dnodes = [(F(i, res[0]), F(j, res[1])) for i in range(res[0]) for j in range(res[1])
              if dom.contains((F(i, res[0]), F(j, res[1])))]
    for i in range(res[0]):
        for j in range(res[1]):
            p = (F(i, res[0]), F(j, res[1]))
            for d in dnodes:
                r = (p[0] - d[0], p[1] - d[1])
                if symplectic_ok(r, lam.columns):
                    diff = (r[0] - ell_rep[0], r[1] - ell_rep[1])
                    out[i, j] = symplectic_ok(diff, tilde.columns)
                    break
    return out


@pytest.mark.parametrize("name", NAMES)
def test_masks_partition_and_periodicity(name):
    tilde = case(name).tilde
    geo = geometry(LAM, tilde, RES)
    masks = geo.masks.masks
    assert masks.shape[0] == geo.N
    assert np.array_equal(masks.sum(axis=0), np.ones(RES, dtype=int))
    tilde_adj_pts = [p for p in _orbit(LAM) if symplectic_ok(p, tilde.columns)]
    for mk in masks:
        for p in tilde_adj_pts:
            assert np.array_equal(np.roll(mk, (-int(p[0] * 4), -int(p[1] * 8)), axis=(0, 1)), mk)
    for ell, rep in enumerate(geo.cosets.representatives):
        assert np.array_equal(masks[ell], _naive_mask(LAM, tilde, RES, rep))


def test_mask_cells_of_the_example_figures():
    res = (2, 4)
    vi = geometry(LAM, case("vi").tilde, res).masks.masks[0]
    assert {(int(i), int(j)) for i, j in zip(*np.nonzero(vi))} == {(0, 0), (1, 1), (0, 2), (1, 3)}
    viii = geometry(LAM, case("viii").tilde, res).masks.masks[0]
    assert {(int(i), int(j)) for i, j in zip(*np.nonzero(viii))} == {(0, 0)}
    trivial = geometry(LAM, case("i").tilde, res).masks.masks
    assert trivial.shape[0] == 1 and trivial.all()


def test_build_masks_rejects_coarse_grid():
    adj = adjoint(LAM)
    cosets = quotient_cosets(adj, adjoint(Z2))
    with pytest.raises(LatticeError):
        build_masks(cosets, fundamental_domain(adj, (2, 4)), (2, 2))
    with pytest.raises(LatticeError, match="too coarse"):
        geometry(LAM, Z2, (2, 2))
    with pytest.raises(LatticeError, match="chain"):
        geometry(Z2, LAM, (2, 4))


# -- condition (d) ---------------------------------------------------------------

def test_condition_d_examples():
    ones = ZakGrid(np.ones(RES), split=SPLIT)
    rep = condition_d(ones, LAM, Z2)
    assert not rep.condition_d
    assert rep.witnesses[0].node == (0, 0)
    assert rep.max_active_cosets == 8
    assert condition_d(ones, LAM, LAM).condition_d
    zero = ZakGrid(np.zeros(RES), split=SPLIT)
    assert condition_d(zero, LAM, Z2).condition_d
    for name in NAMES:
        tilde = case(name).tilde
        mask = ZakGrid(geometry(LAM, tilde, RES).masks.masks[0].astype(complex), split=SPLIT)
        assert condition_d(mask, LAM, tilde).condition_d


def test_witnesses_carry_magnitudes():
    z = np.zeros(RES, dtype=complex)
    z[0, 0] = 1
    z[2, 0] = 0.25  # offset (1/2, 0) lies outside the adjoint of 2Z x Z... check with Z^2
    rep = condition_d(ZakGrid(z, split=SPLIT), LAM, Z2)
    assert not rep.condition_d
    mags = {w.magnitudes for w in rep.witnesses}
    assert (1.0, 0.25) in mags and (0.25, 1.0) in mags
    assert all(w.offset == (F(1, 2), 0) for w in rep.witnesses)


def test_condition_d_agrees_with_naive_scan(rng):
    for _ in range(60):
        z = finite_zak(_random_support_window(rng), SPLIT).values
        for tilde in TILDES:
            assert condition_d(ZakGrid(z, split=SPLIT), LAM, tilde).condition_d == _naive_condition_d(z, LAM, tilde)


def test_condition_d_is_monotone_along_the_chain(rng):
    for _ in range(30):
        z = ZakGrid(finite_zak(_random_support_window(rng), SPLIT).values, split=SPLIT)
        verdicts = {t: condition_d(z, LAM, t).condition_d for t in TILDES}
        for big in TILDES:
            if verdicts[big]:
                for small in TILDES:
                    if small.covolume >= big.covolume and all(c in big for c in small.columns):
                        assert verdicts[small]


def test_oracle_equivalence_small_sweep(rng):
    windows = [_mask_window(t, rng) for t in TILDES] + [_random_support_window(rng) for _ in range(10)]
    for phi in windows:
        model = model_for(SPLIT, LAM, phi)
        for tilde in TILDES:
            rep = check(model, tilde)
            assert rep.oracle == rep.condition_d


def test_oracle_mismatch_is_loud():
    rep = condition_d(ZakGrid(np.ones(RES), split=SPLIT), LAM, Z2)
    with pytest.raises(OracleMismatchError):
        rep.with_oracle(True)


def test_brute_force_examples(rng):
    model = model_for(SPLIT, LAM, _window_from_zak(np.ones(RES)))
    assert brute_force_invariant(model, (16, 16))
    assert not brute_force_invariant(model, (4, 0))
    assert not brute_force_lattice(model, Z2)
    masked = model.with_window(_mask_window(Z2))
    assert brute_force_invariant(masked, (4, 8)) and brute_force_lattice(masked, Z2)
    # the oracle itself against a dense projector
    P = dense_projector(gabor_matrix(masked))
    g = gabor_matrix(masked)[:, 0]
    assert np.linalg.norm(tf_shift(g, 4, 0) - P @ tf_shift(g, 4, 0)) < 1e-10


def test_model_for_needs_representable_lattice(rng):
    with pytest.raises(LatticeError, match="must contain"):
        model_for(SPLIT, parse_lattice("16,0;0,2"), np.ones(32))


# -- decomposition ---------------------------------------------------------------

def test_decomposition_invariants(rng):
    for name in NAMES:
        tilde = case(name).tilde
        model = model_for(SPLIT, LAM, _mask_window(tilde, rng))
        f = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        res = decompose(f, model, tilde)
        assert np.allclose(res.components.sum(axis=0), f, atol=1e-12)
        assert res.parseval_error < 1e-12
        assert res.max_cross < 1e-10
        assert res.condition_d and not res.flagged
        # membership is about the model space; project f first
        g = gabor_matrix(model) @ (rng.standard_normal(4) + 1j * rng.standard_normal(4))
        parts = decompose(g, model, tilde)
        assert all(parts.memberships)


def test_decomposition_trivial_and_flagged(rng):
    model = model_for(SPLIT, LAM, _window_from_zak(np.ones(RES)))
    f = rng.standard_normal(32) + 0j
    one = decompose(f, model, LAM)
    assert one.components.shape == (1, 32) and np.allclose(one.components[0], f, atol=1e-13)
    flagged = decompose(f, model, Z2)
    assert flagged.flagged and flagged.memberships is None
    assert flagged.parseval_error < 1e-12


def test_decomposition_of_shifted_mask_window():
    tilde = case("vi").tilde
    model = model_for(SPLIT, LAM, _mask_window(tilde))
    for a, b in [(2, 1), (4, 2), (0, 1)]:
        u, eta = a * 4, b * 8
        f = tf_shift(model.window, u, eta)
        res = decompose(f, model, tilde)
        assert np.allclose(res.components[0], f, atol=1e-12)
        assert np.allclose(res.components[1:], 0, atol=1e-12)


def test_decompose_accepts_grids(rng):
    model = model_for(SPLIT, LAM, _mask_window(Z2))
    f = rng.standard_normal(32) + 0j
    a = decompose(f, model, Z2)
    b = decompose(finite_zak(f, SPLIT), model, Z2)
    assert np.allclose(a.components, b.components)


# -- multipliers -----------------------------------------------------------------

@pytest.mark.parametrize("name", NAMES)
def test_multiplier_identity_on_every_coset(name, rng):
    tilde = case(name).tilde
    geo = geometry(LAM, tilde, RES)
    x = np.arange(4)[:, None] / 4
    w = np.arange(8)[None, :] / 8
    for a, b in sample_generators(tilde, 10, rng):
        plane = np.exp(2j * np.pi * (b * x - a * w))
        for ell in range(geo.N):
            h = multiplier_coset(geo.cosets, geo.masks, ell, (a, b)).values
            chi = geo.masks.masks[ell]
            assert np.max(np.abs(h * chi - plane * chi)) < 1e-12
            # periodic along the orbit of the larger adjoint
            for r in geo.offsets:
                assert np.allclose(np.roll(h, (-r[0], -r[1]), axis=(0, 1)), h, atol=1e-12)


def test_multiplier_for_identity_shift():
    tilde = case("viii").tilde
    geo = geometry(LAM, tilde, RES)
    for ell in range(geo.N):
        h = multiplier_coset(geo.cosets, geo.masks, ell, (0, 0)).values
        assert np.allclose(h[geo.masks.masks[ell]], 1, atol=1e-14)


def test_multiplier_case_viii_on_the_small_grid():
    # 8 x 4 grid: 32 nodes
    tilde = case("viii").tilde
    geo = geometry(LAM, tilde, (8, 4))
    h = multiplier_coset(geo.cosets, geo.masks, 0, (1, 0)).values
    chi = geo.masks.masks[0]
    w = np.arange(4)[None, :] / 4
    plane = np.broadcast_to(np.exp(-2j * np.pi * w), (8, 4))
    assert h.size == 32
    assert np.max(np.abs((h - plane)[chi])) < 1e-12
    assert np.allclose(np.abs(h[chi]), 1)


def test_multiplier_rejects_points_outside_tilde():
    geo = geometry(LAM, case("iii").tilde, RES)
    with pytest.raises(LatticeError, match="not in"):
        multiplier_coset(geo.cosets, geo.masks, 0, (1, 0))


@pytest.mark.parametrize("name", NAMES)
def test_multiplier_from_pattern_certificates(name, rng):
    tilde = case(name).tilde
    phi = _mask_window(tilde, rng)
    zgrid = finite_zak(phi, SPLIT)
    x = np.arange(4)[:, None] / 4
    w = np.arange(8)[None, :] / 8
    for a, b in sample_generators(tilde, 5, rng) + [(0, 0)]:
        h = multiplier_from_pattern(zgrid, LAM, tilde, (a, b))
        target = finite_zak(tf_shift(phi, a * 4, b * 8), SPLIT).values
        assert np.max(np.abs(target - h.values * zgrid.values)) < 1e-10
        assert certify_multiplier(zgrid, h, (a, b)) < 1e-10
    # shifts from Lambda itself: the plane-wave phase on the support
    supp = zgrid.nonzero()
    for a, b in sample_generators(LAM, 5, rng):
        h = multiplier_from_pattern(zgrid, LAM, tilde, (a, b)).values
        assert np.allclose(h[supp], np.exp(2j * np.pi * (b * x - a * w))[np.broadcast_to(True, RES) & supp])


def test_multiplier_from_pattern_for_plain_mask():
    tilde = Z2
    mask = geometry(LAM, tilde, RES).masks.masks[0]
    zgrid = ZakGrid(mask.astype(complex), split=SPLIT)
    h = multiplier_from_pattern(zgrid, LAM, tilde, (1, 1))
    assert certify_multiplier(zgrid, h, (1, 1)) < 1e-12


def test_multiplier_from_pattern_refuses_non_invariant():
    zgrid = ZakGrid(np.ones(RES), split=SPLIT)
    with pytest.raises(NotInvariantError, match="not invariant; no multiplier exists"):
        multiplier_from_pattern(zgrid, LAM, Z2, (1, 0))
    assert issubclass(NotInvariantError, InvarianceError)


# -- extreme cases ---------------------------------------------------------------

def test_integer_invariance_example_box():
    z = np.zeros(RES)
    z[:2, :2] = 1  # [0,1/2) x [0,1/4)
    res = integer_invariance(ZakGrid(z, split=SPLIT), LAM)
    assert res.invariant
    assert set(res.domain) == {(F(i, 4), F(j, 8)) for i in range(2) for j in range(2)}
    assert integer_invariance(ZakGrid(z, split=SPLIT), LAM, require_riesz=True).invariant


def test_integer_invariance_failures_and_trivial():
    ones = ZakGrid(np.ones(RES), split=SPLIT)
    res = integer_invariance(ones, LAM)
    assert not res.invariant and res.witness[0] != res.witness[1]
    assert integer_invariance(ones, Z2).invariant
    z = np.zeros(RES)
    z[0, 0] = 1
    assert integer_invariance(ZakGrid(z, split=SPLIT), LAM).invariant
    assert not integer_invariance(ZakGrid(z, split=SPLIT), LAM, require_riesz=True).invariant


@settings(max_examples=100, deadline=None)
@given(st.lists(st.booleans(), min_size=32, max_size=32))
def test_integer_invariance_counts_orbit_members(bits):
    nz = np.array(bits).reshape(RES)
    z = ZakGrid(nz.astype(float), split=SPLIT)
    counts = {}
    for i in range(4):
        for j in range(8):
            key = (i % 2, j % 2)
            counts[key] = counts.get(key, 0) + int(nz[i, j])
    assert integer_invariance(z, LAM).invariant == all(c <= 1 for c in counts.values())
    assert integer_invariance(z, LAM, require_riesz=True).invariant == all(c == 1 for c in counts.values())


def test_full_shift_examples():
    z = np.zeros(RES)
    z[:, :4] = 1  # [0,1) x [0,1/2)
    g = ZakGrid(z, split=SPLIT)
    t = full_shift_invariance(g, "translation")
    assert t.invariant and t.E == (0, 1, 2, 3)
    assert not full_shift_invariance(g, "modulation").invariant
    assert full_shift_invariance(ZakGrid(z.T.copy()), "modulation").invariant
    ones = ZakGrid(np.ones(RES), split=SPLIT)
    assert all(full_shift_invariance(ones, m).invariant for m in ("translation", "modulation", "all"))
    half = np.ones(RES)
    half[:2, 5] = 0
    bad = full_shift_invariance(ZakGrid(half), "translation")
    assert not bad.invariant and bad.witness == 5
    with pytest.raises(InvarianceError):
        full_shift_invariance(ones, "dilation")


@settings(max_examples=150, deadline=None)
@given(st.lists(st.booleans(), min_size=4, max_size=4), st.lists(st.booleans(), min_size=8, max_size=8),
       st.lists(st.booleans(), min_size=32, max_size=32), st.integers(0, 2))
def test_all_shifts_is_translation_and_modulation(rows, cols, bits, kind):
    if kind == 0:
        nz = np.outer(np.ones(4), cols).astype(bool)
    elif kind == 1:
        nz = np.outer(rows, np.ones(8)).astype(bool)
    else:
        nz = np.array(bits).reshape(RES)
    g = ZakGrid(nz.astype(float))
    both = full_shift_invariance(g, "translation").invariant and full_shift_invariance(g, "modulation").invariant
    assert full_shift_invariance(g, "all").invariant == both


def test_full_shift_verdicts_against_oracle():
    # Z^2 x Z^2 model: the sample lattice N Z x M Z. Translation means all u, modulation all eta.
    split = SPLIT
    z = np.zeros(RES, dtype=complex)
    z[:, :4] = 1
    model = model_for(split, Z2, _window_from_zak(z))
    assert all(brute_force_invariant(model, (u, 0)) for u in range(4))
    assert not all(brute_force_invariant(model, (0, eta)) for eta in range(8))


# -- invariance sets -------------------------------------------------------------

def test_invariance_set_examples(rng):
    phi = _mask_window(Z2)
    model = model_for(SPLIT, LAM, phi)
    full = invariance_set(finite_zak(phi, SPLIT), LAM, model=model)
    assert full.maximal == Z2 and len(full.table) == 8
    assert all(row["condition_d"] and row["oracle"] for row in full.table)
    ones = _window_from_zak(np.ones(RES))
    none = invariance_set(finite_zak(ones, SPLIT), LAM, model=model.with_window(ones))
    assert none.maximal == LAM
    assert [r["condition_d"] for r in none.table].count(True) == 1
    triv = invariance_set(ZakGrid(np.ones(RES), split=SPLIT), Z2)
    assert triv.maximal == Z2 and len(triv.table) == 1


def test_invariance_set_join_is_reverified(rng):
    for _ in range(10):
        phi = _random_support_window(rng)
        res = invariance_set(finite_zak(phi, SPLIT), LAM, model=model_for(SPLIT, LAM, phi))
        good = [parse_lattice(r["lambda_tilde"]) for r in res.table if r["condition_d"]]
        assert all(all(c in res.maximal for c in t.columns) for t in good)
        assert res.maximal in good


def _spread_window(tilde, rng):
    """One live coset per orbit, chosen at random, so every mask carries energy."""
    geo = geometry(LAM, tilde, RES)
    z = np.zeros(RES, dtype=complex)
    for i, j in zip(*np.nonzero(geo.domain_nodes)):
        k = int(rng.integers(0, geo.m))
        r = geo.offsets[k]
        z[(i + r[0]) % 4, (j + r[1]) % 8] = rng.standard_normal() + 1j * rng.standard_normal()
    return _window_from_zak(z)


@pytest.mark.parametrize("name", NAMES)
def test_membership_of_decomposed_parts_are_members(name, rng):
    tilde = case(name).tilde
    model = model_for(SPLIT, LAM, _spread_window(tilde, rng))
    assert check(model, tilde).condition_d
    g = gabor_matrix(model) @ (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    parts = decompose(g, model, tilde)
    assert all(parts.memberships)
    for comp, n in zip(parts.components, parts.norms):
        if n > 1e-9 * np.linalg.norm(g):
            assert membership(comp, model)[0]
