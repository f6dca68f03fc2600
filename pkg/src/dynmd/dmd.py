"""Dynamic mirror descent over composite losses.

One step at time t from prediction theta_hat_t:

    theta_tilde_{t+1} = argmin_{theta in Theta}
        eta_t <grad f_t(theta_hat_t), theta> + eta_t r(theta)
        + D(theta || theta_hat_t)
    theta_hat_{t+1}   = Phi(theta_tilde_{t+1})

For the scaled squared Euclidean geometry (scale c) the argmin has the
closed form: gradient step v = theta_hat - (eta_t / 2c) grad, soft
threshold at kappa = eta_t / 2c, then project.  The composite objective
separates per coordinate and each 1-D piece is strictly convex, so
prox-then-clamp is exact for every box set; ball sets fall back to a
projected-subgradient inner loop.  The prox is applied only on steps with
t % reg_period == 0 (reg_period = 1 means every step).  COMID is the
special case Phi = identity with reg_period = 1.
"""

from dataclasses import dataclass, replace

import numpy as np

from .dynamics import IdentityModel
from .geometry import Ball


@dataclass(frozen=True)
class DmdState:
    """Learner state; steps return new states, arrays are never mutated."""

    theta_hat: np.ndarray
    theta_tilde: np.ndarray
    t: int
    geom: object
    fset: object
    model: object
    schedule: object
    reg_period: int = 1


def dmd_init(geom, fset, model, schedule, reg_period=1, theta0=None):
    if int(reg_period) != reg_period or reg_period < 1:
        raise ValueError(f"reg_period must be an integer >= 1, got {reg_period}")
    if theta0 is None:
        theta0 = fset.project(np.zeros(fset.shape))
    else:
        theta0 = np.asarray(theta0, dtype=float)
        if not fset.contains(theta0):
            raise ValueError("theta0 lies outside the feasible set")
    return DmdState(theta_hat=theta0.copy(), theta_tilde=theta0.copy(), t=1,
                    geom=geom, fset=fset, model=model, schedule=schedule,
                    reg_period=int(reg_period))


def comid_init(geom, fset, schedule, theta0=None):
    return dmd_init(geom, fset, IdentityModel(), schedule, reg_period=1, theta0=theta0)


def _inner_objective(geom, loss, g, theta_hat, eta, with_reg, theta):
    val = eta * float(np.vdot(g, theta)) + geom.divergence(theta, theta_hat)
    if with_reg:
        val += eta * loss.r_value(theta)
    return val


def _solve_inner(geom, fset, loss, g, theta_hat, eta, with_reg,
                 max_iter=200, rel_tol=1e-8):
    """Projected subgradient loop for non-box sets (strongly convex objective)."""
    c = geom.scale
    theta = fset.project(theta_hat)
    best = theta
    best_val = _inner_objective(geom, loss, g, theta_hat, eta, with_reg, theta)
    for k in range(1, max_iter + 1):
        sub = eta * g + 2.0 * c * (theta - theta_hat)
        if with_reg:
            sub = sub + eta * loss.r.subgradient(theta)
        theta = fset.project(theta - sub / (c * (k + 1.0)))
        val = _inner_objective(geom, loss, g, theta_hat, eta, with_reg, theta)
        if val < best_val:
            improved = best_val - val
            best, best_val = theta, val
            if improved <= rel_tol * max(1.0, abs(best_val)):
                break
    return best


def dmd_step(state, loss, t=None, diagnostics=False):
    """Advance one round; returns (new state, next prediction, diagnostics).

    loss is the round-t composite loss; t defaults to the state's own clock
    and must match it when given.  diagnostics (opt-in) carries eta_t, the
    gradient and composite-subgradient norms, and the divergence moved.
    """
    if t is None:
        t = state.t
    elif t != state.t:
        raise ValueError(f"step called with t={t} but state clock is {state.t}")
    theta_hat = state.theta_hat
    g = loss.f_gradient(theta_hat)
    if not np.all(np.isfinite(g)):
        raise FloatingPointError(f"non-finite loss gradient at step t={t}")
    eta = state.schedule.eta(t)
    kappa = eta / (2.0 * state.geom.scale)
    with_reg = (t % state.reg_period == 0)
    needs_reg = with_reg and loss.r.tau > 0.0
    if isinstance(state.fset, Ball) and needs_reg:
        # prox-then-project is not exact on balls; see module docstring
        theta_tilde = _solve_inner(state.geom, state.fset, loss, g, theta_hat,
                                   eta, with_reg)
    else:
        # without the l1 term the objective is c * ||theta - v||^2 + const,
        # so projecting v is exact for any convex set; with it, prox-then-
        # clamp is exact per coordinate on boxes
        v = theta_hat - kappa * g
        if needs_reg:
            v = loss.prox_r(v, kappa)
        theta_tilde = state.fset.project(v)
    theta_next = state.model.apply(theta_tilde, t)
    new_state = replace(state, theta_hat=theta_next, theta_tilde=theta_tilde,
                        t=t + 1)
    diag = None
    if diagnostics:
        subgrad = g + loss.r.subgradient(theta_hat)
        diag = {
            "t": t,
            "eta": eta,
            "prox_applied": needs_reg,
            "grad_norm": float(np.linalg.norm(np.ravel(g))),
            "subgrad_norm": float(np.linalg.norm(np.ravel(subgrad))),
            "divergence_moved": state.geom.divergence(theta_tilde, theta_hat),
        }
    return new_state, theta_next, diag


def comid_step(state, loss, t=None, diagnostics=False):
    """dmd_step restricted to the static special case (identity model, prox every step)."""
    if not isinstance(state.model, IdentityModel):
        raise ValueError("comid_step requires an identity-model state")
    if state.reg_period != 1:
        raise ValueError("comid_step requires reg_period = 1")
    return dmd_step(state, loss, t=t, diagnostics=diagnostics)


def lemma1_check(before, after, loss, comparator_pair, constants, tol=1e-8):
    """Per-step certificate for one DMD transition against a comparator pair.

    Checks

        ell_t(theta_hat_t) - ell_t(theta_t)
          <= [D(theta_t || theta_hat_t) - D(theta_{t+1} || theta_hat_{t+1})] / eta_t
             + (4 M / eta_t) ||theta_{t+1} - Phi(theta_t)||
             + eta_t G_ell^2 / (2 sigma)

    which is valid when the model's divergence expansion is <= 0 (audit it
    first) and the constants cover the step's own iterates.  Returns
    (passed, slack) with slack = rhs - lhs; passed allows a relative
    rounding tolerance.
    """
    if after.t != before.t + 1:
        raise ValueError("states are not a consecutive before/after pair")
    theta_t, theta_next = (np.asarray(p, dtype=float) for p in comparator_pair)
    t = before.t
    eta = before.schedule.eta(t)
    geom = before.geom
    lhs = loss.value(before.theta_hat) - loss.value(theta_t)
    d_now = geom.divergence(theta_t, before.theta_hat)
    d_next = geom.divergence(theta_next, after.theta_hat)
    dev = float(np.linalg.norm(np.ravel(theta_next - before.model.apply(theta_t, t))))
    rhs = ((d_now - d_next) / eta
           + (4.0 * constants.big_m / eta) * dev
           + eta * constants.g_ell ** 2 / (2.0 * constants.sigma))
    slack = rhs - lhs
    passed = bool(slack >= -tol * max(1.0, abs(lhs), abs(rhs)))
    return passed, float(slack)
