import math

import numpy as np
import pytest

from dynmd import (
    Box,
    ConstantStep,
    DoublingStep,
    IdentityModel,
    SquaredEuclidean,
    Unconstrained,
    aggregate_prediction,
    default_lambda,
    dfs_step,
    dmd_init,
    dmd_step,
    fixed_share_init,
    least_squares,
)


def make_experts(n, theta0s, geom=None, fset=None, sched=None):
    geom = geom or SquaredEuclidean(1.0)
    fset = fset or Unconstrained(len(theta0s[0]))
    sched = sched or ConstantStep(0.5)
    return [dmd_init(geom, fset, IdentityModel(), sched, theta0=np.asarray(th, float))
            for th in theta0s[:n]]


def linear_share(weights, losses, eta_r, lam):
    wtilde = weights * np.exp(-eta_r * losses)
    w = (lam / len(weights)) * wtilde.sum() + (1.0 - lam) * wtilde
    return w / w.sum()


def test_equal_losses_keep_uniform_weights():
    # zero sensing matrix: every prediction incurs the same loss
    experts = make_experts(3, [[0.0, 0.0], [1.0, -1.0], [2.0, 2.0]])
    state = fixed_share_init(experts, lam=0.2, eta_r=1.0)
    loss = least_squares(np.zeros((2, 2)), np.array([1.0, 2.0]))
    for _ in range(5):
        state, _, losses = dfs_step(state, loss)
        assert np.all(losses == losses[0])
        assert np.array_equal(state.weights, np.full(3, 1.0 / 3.0))


def test_full_share_resets_to_uniform():
    experts = make_experts(3, [[0.0], [1.0], [5.0]])
    state = fixed_share_init(experts, lam=1.0, eta_r=2.0)
    loss = least_squares(np.array([[1.0]]), np.array([0.0]))
    state, _, _ = dfs_step(state, loss)
    assert np.allclose(state.weights, 1.0 / 3.0, atol=1e-15)


def test_two_expert_hand_example():
    # losses 0 and 1 at eta_r = 1, lam = 0: weights are the logistic split
    experts = make_experts(2, [[0.0], [math.sqrt(2.0)]])
    state = fixed_share_init(experts, lam=0.0, eta_r=1.0)
    loss = least_squares(np.array([[1.0]]), np.array([0.0]))
    state, agg, losses = dfs_step(state, loss)
    assert np.allclose(losses, [0.0, 1.0], atol=1e-15)
    assert abs(state.weights[0] - 0.7310585786300049) < 1e-12
    assert abs(state.weights[1] - 0.2689414213699951) < 1e-12
    assert abs(agg[0] - 0.2689414213699951 * math.sqrt(2.0)) < 1e-12


def test_matches_linear_space_oracle():
    rng = np.random.default_rng(43)
    geom = SquaredEuclidean(1.0)
    fset = Box(-1.0, 1.0, shape=3)
    theta0s = [fset.sample(rng, 1)[0] for _ in range(4)]
    experts = [dmd_init(geom, fset, IdentityModel(), ConstantStep(0.3),
                        theta0=th) for th in theta0s]
    lam, eta_r = 0.05, 0.8
    state = fixed_share_init(experts, lam=lam, eta_r=eta_r)
    w = state.weights.copy()
    for _ in range(30):
        loss = least_squares(rng.normal(size=(4, 3)), rng.normal(size=4), tau=0.02)
        preds = np.stack([e.theta_hat for e in state.experts])
        losses_ref = np.array([loss.value(p) for p in preds])
        w = linear_share(w, losses_ref, eta_r, lam)
        agg_ref = w @ preds
        state, agg, losses = dfs_step(state, loss)
        assert np.allclose(losses, losses_ref, atol=1e-12)
        assert np.allclose(state.weights, w, atol=1e-12)
        assert np.allclose(agg, agg_ref, atol=1e-12)


def test_schedule_valued_mixing_rate():
    # the doubling schedule's per-round value drives the weight update
    rng = np.random.default_rng(47)
    experts = make_experts(2, [[0.5, 0.5], [-0.5, 0.2]])
    sched = DoublingStep(1, 2, 1.0)
    state = fixed_share_init(experts, lam=0.1, eta_r=sched)
    w = state.weights.copy()
    for t in range(1, 8):
        loss = least_squares(rng.normal(size=(2, 2)), rng.normal(size=2))
        losses_ref = np.array([loss.value(e.theta_hat) for e in state.experts])
        w = linear_share(w, losses_ref, sched.eta(t), 0.1)
        state, _, _ = dfs_step(state, loss)
        assert np.allclose(state.weights, w, atol=1e-12)


def test_experts_advance_like_standalone_steps():
    rng = np.random.default_rng(53)
    experts = make_experts(3, [[0.0, 0.0], [1.0, 1.0], [-1.0, 0.5]])
    state = fixed_share_init(experts, lam=0.1, eta_r=1.0)
    loss = least_squares(rng.normal(size=(3, 2)), rng.normal(size=3), tau=0.1)
    solo = [dmd_step(e, loss)[0] for e in experts]
    state, _, _ = dfs_step(state, loss)
    for adv, ref in zip(state.experts, solo):
        assert np.array_equal(adv.theta_hat, ref.theta_hat)
        assert adv.t == ref.t == 2


def test_single_expert_reduces_to_plain_dmd():
    # N = 1: weights collapse to exactly 1.0, the stream is bit-identical
    rng = np.random.default_rng(59)
    geom = SquaredEuclidean(1.0)
    fset = Box(0.0, 1.0, shape=4)
    sched = DoublingStep(8, 2, 0.5)
    losses = [least_squares(rng.normal(size=(3, 4)), rng.normal(size=3), tau=0.05)
              for _ in range(50)]
    expert = dmd_init(geom, fset, IdentityModel(), sched)
    state = fixed_share_init([expert], lam=0.3, eta_r=0.7)
    solo = dmd_init(geom, fset, IdentityModel(), sched)
    for loss in losses:
        pred_solo = solo.theta_hat
        solo, _, _ = dmd_step(solo, loss)
        state, agg, _ = dfs_step(state, loss)
        assert state.weights[0] == 1.0
        assert np.array_equal(agg, pred_solo)
    assert np.array_equal(state.experts[0].theta_hat, solo.theta_hat)


def test_weight_floor_and_simplex_invariants():
    rng = np.random.default_rng(61)
    lam = 0.1
    experts = make_experts(5, [[float(i), -float(i)] for i in range(5)])
    state = fixed_share_init(experts, lam=lam, eta_r=2.0)
    for _ in range(40):
        loss = least_squares(rng.normal(size=(2, 2)) * 3.0, rng.normal(size=2))
        state, _, _ = dfs_step(state, loss)
        assert abs(state.weights.sum() - 1.0) <= 1e-12
        assert np.all(state.weights >= lam / 5 - 1e-15)


def test_huge_losses_stay_finite():
    # 1e4-scale losses would underflow exp in linear space
    experts = make_experts(2, [[0.0], [200.0]])
    state = fixed_share_init(experts, lam=0.0, eta_r=1.0)
    loss = least_squares(np.array([[1.0]]), np.array([0.0]))
    state, _, losses = dfs_step(state, loss)
    assert losses[1] == 20000.0
    assert np.all(np.isfinite(state.weights))
    assert state.weights[0] > 1.0 - 1e-12
    assert state.weights[1] >= 0.0


def test_loss_offset_cancels_in_weights():
    # appending a constant-energy row shifts every loss by the same amount
    rng = np.random.default_rng(67)
    A = rng.normal(size=(3, 2))
    x = rng.normal(size=3)
    offset = 8.0
    A2 = np.vstack([A, np.zeros((1, 2))])
    x2 = np.append(x, math.sqrt(2.0 * offset))
    sa = fixed_share_init(make_experts(3, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                          lam=0.05, eta_r=0.5)
    sb = fixed_share_init(make_experts(3, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                          lam=0.05, eta_r=0.5)
    sa, _, la = dfs_step(sa, least_squares(A, x))
    sb, _, lb = dfs_step(sb, least_squares(A2, x2))
    assert np.allclose(lb - la, offset, atol=1e-9)
    assert np.allclose(sa.weights, sb.weights, atol=1e-10)


def test_better_expert_accumulates_weight():
    truth = np.array([0.0, 0.0])
    experts = make_experts(2, [truth.tolist(), [3.0, 3.0]])
    state = fixed_share_init(experts, lam=0.01, eta_r=1.0)
    loss = least_squares(np.eye(2), truth)
    for _ in range(20):
        state, _, _ = dfs_step(state, loss)
    assert state.weights[0] > 0.8
    assert state.weights[0] > state.weights[1]


def test_aggregate_prediction_oracle():
    experts = make_experts(3, [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    state = fixed_share_init(experts, lam=0.1, eta_r=1.0,
                             weights=np.array([0.5, 0.25, 0.25]))
    want = 0.5 * np.array([1.0, 0.0]) + 0.25 * np.array([0.0, 1.0]) \
        + 0.25 * np.array([1.0, 1.0])
    assert np.allclose(aggregate_prediction(state), want, atol=1e-15)
    # explicit weights are normalized before use
    doubled = aggregate_prediction(state, weights=np.array([1.0, 0.5, 0.5]))
    assert np.allclose(doubled, want, atol=1e-15)


def test_default_lambda_values_and_errors():
    assert default_lambda(2, 100) == 0.02
    assert default_lambda(0, 10) == 0.0
    with pytest.raises(ValueError):
        default_lambda(-1, 10)
    with pytest.raises(ValueError):
        default_lambda(10, 10)
    with pytest.raises(ValueError):
        default_lambda(1.5, 10)
    with pytest.raises(ValueError):
        default_lambda(0, 0)


def test_init_validation():
    experts = make_experts(2, [[0.0], [1.0]])
    with pytest.raises(ValueError):
        fixed_share_init([], lam=0.1, eta_r=1.0)
    with pytest.raises(ValueError):
        fixed_share_init(experts, lam=1.5, eta_r=1.0)
    with pytest.raises(ValueError):
        fixed_share_init(experts, lam=0.1, eta_r=0.0)
    with pytest.raises(ValueError):
        fixed_share_init(experts, lam=0.1, eta_r=1.0, weights=np.array([0.5]))
    with pytest.raises(ValueError):
        fixed_share_init(experts, lam=0.1, eta_r=1.0,
                         weights=np.array([0.9, 0.3]))
    mixed = make_experts(1, [[0.0]]) + make_experts(1, [[0.0, 0.0]])
    with pytest.raises(ValueError):
        fixed_share_init(mixed, lam=0.1, eta_r=1.0)


def test_clock_mismatch_and_nonfinite_loss_errors():
    experts = make_experts(2, [[0.0], [1.0]])
    state = fixed_share_init(experts, lam=0.1, eta_r=1.0)
    loss = least_squares(np.array([[1.0]]), np.array([0.0]))
    with pytest.raises(ValueError):
        dfs_step(state, loss, t=3)
    far = make_experts(2, [[0.0], [1e200]])
    state_far = fixed_share_init(far, lam=0.1, eta_r=1.0)
    with pytest.raises(FloatingPointError, match="t=1"):
        dfs_step(state_far, loss)
