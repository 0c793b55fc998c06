import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compactseg.admm import (
    AdmmConfig,
    AdmmState,
    admm_s_update,
    admm_u_update,
    admm_z_update,
    augmented_lagrangian,
    conjugate_gradient,
    run_admm,
    solve_positive_cubic,
    z_system,
)
from compactseg.force import two_phase_force
from compactseg.metrics import dice, discrete_tv
from compactseg.pd import SolverConfig, run_pdstd
from compactseg.synth import add_gaussian_noise, disk_mask


def u_objective(u, state, f, cfg):
    weight = discrete_tv(state.z, "anisotropic") / state.s
    r = u - state.z + state.nu1
    return cfg.lam * float(np.sum(f * u)) + weight * discrete_tv(u, "anisotropic") + 0.5 * cfg.mu1 * float(np.sum(r * r))


def random_state(r, shape):
    z = r.uniform(0, 1, size=shape)
    return AdmmState(u=(r.uniform(size=shape) < 0.5).astype(np.uint8), z=z, s=float(r.uniform(1, 10)),
                     nu1=r.normal(0, 0.3, size=shape), nu2=float(r.normal()))


@pytest.mark.parametrize("shape", [(3, 3), (2, 5)])
def test_u_update_matches_enumeration(shape, rng):
    cfg = AdmmConfig(lam=1.0, mu1=0.5)
    for _ in range(20):
        state = random_state(rng, shape)
        f = rng.normal(size=shape)
        u = admm_u_update(state, f, cfg)
        values = [u_objective(np.array(b, dtype=float).reshape(shape), state, f, cfg)
                  for b in itertools.product((0, 1), repeat=int(np.prod(shape)))]
        assert u_objective(u.astype(float), state, f, cfg) == pytest.approx(min(values), abs=1e-10)


def test_u_update_constant_z_is_pixelwise(rng):
    cfg = AdmmConfig(lam=1.0, mu1=0.5)
    state = AdmmState(u=np.zeros((5, 5), np.uint8), z=np.full((5, 5), 0.3), s=4.0,
                      nu1=rng.normal(size=(5, 5)), nu2=0.0)
    f = rng.normal(size=(5, 5))
    unary = f + 0.25 * (1 - 2 * (state.z - state.nu1))
    np.testing.assert_array_equal(admm_u_update(state, f, cfg), (unary < 0).astype(np.uint8))


def test_u_update_strong_negative_force():
    state = AdmmState.start(np.zeros((6, 6), np.uint8))
    state.z = np.random.default_rng(0).uniform(size=(6, 6))
    assert admm_u_update(state, np.full((6, 6), -100.0), AdmmConfig(lam=1.0)).all()


def dense_z_matrix(state, cfg, shape):
    apply_a, rhs = z_system(state, cfg)
    N = int(np.prod(shape))
    cols = [apply_a(np.eye(N)[i].reshape(shape)).ravel() for i in range(N)]
    return np.array(cols).T, rhs.ravel()


def test_z_update_closed_form_without_tv(rng):
    shape = (4, 4)
    cfg = AdmmConfig(mu1=0.7, mu2=0.3, z_tv=False, inner_cg_tol=1e-14)
    state = random_state(rng, shape)
    z = admm_z_update(state, cfg)
    # closed form: (mu1 I + mu2 11^T) z = b, independently via a dense solve
    N = 16
    a_dense = cfg.mu1 * np.eye(N) + cfg.mu2 * np.ones((N, N))
    b = (cfg.mu1 * (state.u + state.nu1) + cfg.mu2 * (state.s + state.nu2)).ravel()
    np.testing.assert_allclose(z.ravel(), np.linalg.solve(a_dense, b), atol=1e-10)


def test_z_update_zero_tv_coupling_matches_dense(rng):
    shape = (4, 4)
    cfg = AdmmConfig(mu1=0.7, mu2=0.3, inner_cg_tol=1e-14)
    state = random_state(rng, shape)
    state.u[:] = 1  # |u|_TV = 0
    a_dense, b = dense_z_matrix(state, cfg, shape)
    np.testing.assert_allclose(a_dense, cfg.mu1 * np.eye(16) + cfg.mu2 * np.ones((16, 16)), atol=1e-15)
    np.testing.assert_allclose(admm_z_update(state, cfg).ravel(), np.linalg.solve(a_dense, b), atol=1e-10)


def test_z_update_with_tv_matches_dense(rng):
    shape = (4, 4)
    cfg = AdmmConfig(mu1=0.4, mu2=0.2, inner_cg_tol=1e-14)
    state = random_state(rng, shape)
    a_dense, b = dense_z_matrix(state, cfg, shape)
    np.testing.assert_allclose(a_dense, a_dense.T, atol=1e-12)
    assert np.linalg.eigvalsh(a_dense).min() > 0
    np.testing.assert_allclose(admm_z_update(state, cfg).ravel(), np.linalg.solve(a_dense, b), atol=1e-9)


def test_cg_error_decreases_in_energy_norm(rng):
    N = 30
    m = rng.normal(size=(N, N))
    a = m @ m.T + N * np.eye(N)
    b = rng.normal(size=N)
    exact = np.linalg.solve(a, b)
    errors = []

    def record(x):
        e = x - exact
        errors.append(float(e @ a @ e))

    x, info = conjugate_gradient(lambda v: a @ v, b, np.zeros(N), tol=1e-12, maxiter=200, callback=record)
    assert info["converged"]
    assert all(e1 <= e0 * (1 + 1e-12) + 1e-20 for e0, e1 in zip(errors, errors[1:]))
    np.testing.assert_allclose(x, exact, atol=1e-9)


def test_cg_reports_nonconvergence(rng):
    N = 50
    a = np.diag(np.linspace(1, 1e4, N))
    x, info = conjugate_gradient(lambda v: a @ v, rng.normal(size=N), np.zeros(N), tol=1e-14, maxiter=3)
    assert not info["converged"]
    assert info["iters"] == 3 and np.isfinite(info["residual"])


def test_z_unchanged_at_stationarity():
    u = disk_mask(12, 12, 5.5, 5.5, 3.5)
    state = AdmmState.start(u)
    state.s = float(state.z.sum())
    cfg = AdmmConfig(z_tv=False, inner_cg_tol=1e-14)
    np.testing.assert_allclose(admm_z_update(state, cfg), state.z, atol=1e-10)


def test_s_update_zero_a():
    state = AdmmState(u=np.ones((10, 10), np.uint8), z=np.ones((10, 10)), s=3.0,
                      nu1=np.zeros((10, 10)), nu2=0.0)
    assert admm_s_update(state) == 100.0


def test_s_update_floor():
    state = AdmmState(u=np.ones((2, 2), np.uint8), z=np.zeros((2, 2)), s=3.0, nu1=np.zeros((2, 2)), nu2=0.0)
    assert admm_s_update(state, AdmmConfig(s_min=1.0)) == 1.0


def test_cubic_unit_root():
    assert solve_positive_cubic(1.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=200)
@given(st.floats(1e-4, 1e2), st.floats(-1e3, 1e3), st.floats(1e-6, 1e6))
def test_cubic_stationary(mu2, m, a):
    s = solve_positive_cubic(mu2, m, a)
    assert s > 0
    deriv = -a / s ** 2 + mu2 * (s - m)
    scale = a / s ** 2 + mu2 * (s + abs(m))
    assert abs(deriv) <= 1e-12 * scale


def test_multiplier_bookkeeping(rng):
    # after the update nu <- nu + residual, mu * nu_new equals mu * (nu_old + residual),
    # which is the augmented Lagrangian's gradient in the residual
    f = two_phase_force(disk_mask(20, 20, 9.5, 9.5, 6).astype(float))
    cfg = AdmmConfig(max_iters=1)
    seen = {}

    def grab(it, state):
        seen["state"] = state

    run_admm(f, cfg, callback=grab)
    st_ = seen["state"]
    r1 = st_.u - st_.z
    np.testing.assert_allclose(st_.nu1, r1, atol=1e-15)
    assert st_.nu2 == pytest.approx(st_.s - float(np.sum(st_.z)), abs=1e-12)
    # gradient of the penalty w.r.t. r1 at nu_old = 0 is mu1 * (r1 + 0) == mu1 * nu_new
    np.testing.assert_allclose(cfg.mu1 * (r1 + 0.0), cfg.mu1 * st_.nu1, atol=1e-15)


@pytest.mark.parametrize("kw", [dict(z_tv=False), dict(mu1=1.0), dict(mu1=2.0)])
def test_admm_converged_residuals(kw):
    f = two_phase_force(disk_mask(48, 48, 23.5, 23.5, 12).astype(float))
    cfg = AdmmConfig(max_iters=300, **kw)
    last = {}
    res = run_admm(f, cfg, callback=lambda it, s: last.update(u=s.u.copy(), z=s.z.copy(), s=s.s))
    assert res.converged and res.iters_used < cfg.max_iters
    assert np.max(np.abs(last["u"] - last["z"])) < 1e-3
    assert abs(last["s"] - last["z"].sum()) < 1e-3
    assert len(res.energy_trace) == res.iters_used + 1


def test_admm_unconverged_run_uses_all_iterations():
    # with the default penalties the binary u step keeps oscillating on this image
    f = two_phase_force(disk_mask(48, 48, 23.5, 23.5, 12).astype(float))
    res = run_admm(f, AdmmConfig(max_iters=20))
    assert not res.converged and res.iters_used == 20


def test_admm_large_penalties_enforce_constraints():
    f = two_phase_force(disk_mask(32, 32, 15.5, 15.5, 8).astype(float))
    cfg = AdmmConfig(mu1=1e4, mu2=1e4, max_iters=3)
    states = []
    run_admm(f, cfg, callback=lambda it, s: states.append((s.u.copy(), s.z.copy(), s.s)))
    u, z, s = states[-1]
    assert np.max(np.abs(u - z)) < 1e-2
    assert abs(s - z.sum()) < 1e-2 * z.sum()


def test_admm_close_to_pdstd_but_slower():
    gt = disk_mask(96, 96, 47.5, 47.5, 22)
    image = add_gaussian_noise(0.35 + 0.3 * gt, 0.1, seed=3)
    f = two_phase_force(image)
    a = run_admm(f)
    b = run_pdstd(f, SolverConfig())
    assert abs(dice(a.mask, gt) - dice(b.mask, gt)) <= 0.05
    assert a.wall_time > b.wall_time


def test_augmented_lagrangian_finite():
    state = AdmmState.start(disk_mask(10, 10, 4.5, 4.5, 3))
    assert np.isfinite(augmented_lagrangian(state, np.zeros((10, 10)), AdmmConfig()))


@pytest.mark.parametrize("kw", [dict(mu1=0), dict(mu2=-1), dict(lam=0), dict(max_iters=0), dict(tv_eps=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        AdmmConfig(**kw)
