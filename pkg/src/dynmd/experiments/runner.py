"""Shared experiment driver: run a fixed-share pool over a loss stream,
record scalar traces, then evaluate regrets, bounds, and the tracking
decomposition from those traces.

The driver never stores predictions or sensing matrices; everything the
evaluation needs (losses, norms, divergences to the comparator) is reduced
to scalars while the run is in flight, so horizons in the thousands stay
within a laptop's memory.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..fixedshare import dfs_step, fixed_share_init
from ..geometry import BoundConstants
from ..regret import (
    moving_average,
    theorem2_curve,
    tracking_decomposition_from_losses,
)


def _loss_stream(losses, T):
    if callable(losses):
        return losses
    seq = list(losses)
    if T is not None and len(seq) != T:
        raise ValueError(f"{len(seq)} losses for horizon {T}")
    return lambda t: seq[t - 1]


@dataclass(frozen=True)
class ScenarioResult:
    expert_labels: tuple
    weights: np.ndarray  # (T, N), the weights that formed each aggregate
    expert_losses: np.ndarray  # (T, N)
    dfs_losses: np.ndarray  # (T,)
    pred_norms: np.ndarray  # (T, N)
    subgrad_norms: np.ndarray  # (T, N)
    comparator_points: np.ndarray  # (T + 1, *shape) or None
    comparator_losses: np.ndarray  # (T,) or None
    comparator_divergences: np.ndarray  # (T, N) or None
    comparator_subgrad_norms: np.ndarray  # (T,) or None
    comparator_norms: np.ndarray  # (T,) or None
    agent_values: np.ndarray  # (T, p) or None
    final_state: object
    meta: dict

    @property
    def T(self):
        return self.dfs_losses.shape[0]

    @property
    def n_experts(self):
        return len(self.expert_labels)


def run_scenario(losses, T, experts, lam=0.01, eta_r=None, comparator=None,
                 collect_agent_values=False, meta=None):
    """Drive a fixed-share pool for T rounds.

    losses: callable t -> composite loss (1-based), or a length-T sequence.
    experts: fresh DMD states, one per dynamical model.  eta_r defaults to
    1/sqrt(T).  comparator, when given, must hold T + 1 points; its scalar
    traces feed the bound evaluation later.
    """
    loss_at = _loss_stream(losses, T)
    experts = list(experts)
    n = len(experts)
    if eta_r is None:
        eta_r = 1.0 / math.sqrt(T)
    state = fixed_share_init(experts, lam=lam, eta_r=eta_r)
    pts = None
    if comparator is not None:
        pts = comparator.points if hasattr(comparator, "points") \
            else np.asarray(comparator, dtype=float)
        if pts.shape[0] != T + 1:
            raise ValueError(
                f"comparator must hold {T + 1} points, got {pts.shape[0]}")
    labels = tuple(e.model.label for e in experts)
    weights = np.empty((T, n))
    expert_losses = np.empty((T, n))
    dfs_losses = np.empty(T)
    pred_norms = np.empty((T, n))
    subgrad_norms = np.empty((T, n))
    comp_losses = np.empty(T) if pts is not None else None
    comp_div = np.empty((T, n)) if pts is not None else None
    comp_subgrad = np.empty(T) if pts is not None else None
    comp_norms = np.empty(T) if pts is not None else None
    agent_values = None
    for t in range(1, T + 1):
        loss = loss_at(t)
        for i, e in enumerate(state.experts):
            pred = e.theta_hat
            pred_norms[t - 1, i] = np.linalg.norm(np.ravel(pred))
            subgrad_norms[t - 1, i] = np.linalg.norm(
                np.ravel(loss.subgradient(pred)))
        if pts is not None:
            comp = pts[t - 1]
            comp_losses[t - 1] = loss.value(comp)
            comp_subgrad[t - 1] = np.linalg.norm(np.ravel(loss.subgradient(comp)))
            comp_norms[t - 1] = np.linalg.norm(np.ravel(comp))
            for i, e in enumerate(state.experts):
                comp_div[t - 1, i] = e.geom.divergence(comp, e.theta_hat)
        state, aggregated, losses_t = dfs_step(state, loss)
        weights[t - 1] = state.weights
        expert_losses[t - 1] = losses_t
        dfs_losses[t - 1] = loss.value(aggregated)
        if collect_agent_values:
            per_agent = loss.f.per_agent_values(aggregated)
            if agent_values is None:
                agent_values = np.empty((T, per_agent.shape[0]))
            agent_values[t - 1] = per_agent
    full_meta = {"T": T, "n_experts": n, "lam": lam,
                 "eta_r": eta_r if np.isscalar(eta_r) else repr(eta_r),
                 "labels": ",".join(labels)}
    full_meta.update(meta or {})
    return ScenarioResult(
        expert_labels=labels, weights=weights, expert_losses=expert_losses,
        dfs_losses=dfs_losses, pred_norms=pred_norms,
        subgrad_norms=subgrad_norms,
        comparator_points=pts, comparator_losses=comp_losses,
        comparator_divergences=comp_div,
        comparator_subgrad_norms=comp_subgrad, comparator_norms=comp_norms,
        agent_values=agent_values, final_state=state, meta=full_meta)


@dataclass(frozen=True)
class RunEvaluation:
    dfs_regret: np.ndarray  # (T,) cumulative
    expert_regret: np.ndarray  # (T, N) cumulative
    deviations: np.ndarray  # (T, N) comparator deviation under each model
    v_phi: np.ndarray  # (N,) total deviation per model
    constants: tuple  # one BoundConstants per expert, sampled from the run
    bound_curves: np.ndarray  # (T, N)
    decomposition: object
    dfs_loss_avg: np.ndarray  # (T,) trailing mean
    expert_loss_avg: np.ndarray  # (T, N)


def evaluate_run(result, models, m=0, window=30):
    """Regret curves, run-sampled bound curves, and the m-switch tracking
    decomposition for a run recorded against a comparator."""
    if result.comparator_losses is None:
        raise ValueError("the run was recorded without a comparator")
    models = list(models)
    if len(models) != result.n_experts:
        raise ValueError(f"{len(models)} models for {result.n_experts} experts")
    T, n = result.expert_losses.shape
    pts = result.comparator_points
    diffs = result.expert_losses - result.comparator_losses[:, None]
    expert_regret = np.cumsum(diffs, axis=0)
    dfs_regret = np.cumsum(result.dfs_losses - result.comparator_losses)
    deviations = np.empty((T, n))
    for i, model in enumerate(models):
        for t in range(T):
            d = pts[t + 1] - model.apply(pts[t], t + 1)
            deviations[t, i] = np.linalg.norm(np.ravel(d))
    experts = result.final_state.experts
    constants = []
    curves = np.empty((T, n))
    for i, e in enumerate(experts):
        g = max(result.subgrad_norms[:, i].max(),
                result.comparator_subgrad_norms.max())
        big_m = e.geom.scale * max(result.pred_norms[:, i].max(),
                                   result.comparator_norms.max())
        consts = BoundConstants(
            g_ell=float(g), big_m=float(big_m),
            d_max=float(result.comparator_divergences[:, i].max()),
            sigma=e.geom.sigma)
        constants.append(consts)
        curves[:, i] = theorem2_curve(consts, e.schedule, deviations[:, i])
    decomposition = tracking_decomposition_from_losses(
        result.dfs_losses, result.expert_losses, result.comparator_losses, m)
    expert_loss_avg = np.column_stack(
        [moving_average(result.expert_losses[:, i], window) for i in range(n)])
    return RunEvaluation(
        dfs_regret=dfs_regret, expert_regret=expert_regret,
        deviations=deviations, v_phi=deviations.sum(axis=0),
        constants=tuple(constants), bound_curves=curves,
        decomposition=decomposition,
        dfs_loss_avg=moving_average(result.dfs_losses, window),
        expert_loss_avg=expert_loss_avg)


def write_losses_csv(path, result):
    cols = ["t", "dfs"]
    data = [np.arange(1, result.T + 1), result.dfs_losses]
    if result.comparator_losses is not None:
        cols.append("comparator")
        data.append(result.comparator_losses)
    for i, label in enumerate(result.expert_labels):
        cols.append(f"expert_{label}")
        data.append(result.expert_losses[:, i])
    _write_csv(path, cols, data)


def write_weights_csv(path, result):
    cols = ["t"] + [f"w_{label}" for label in result.expert_labels]
    data = [np.arange(1, result.T + 1)] + \
        [result.weights[:, i] for i in range(result.n_experts)]
    _write_csv(path, cols, data)


def write_regret_csv(path, result, evaluation):
    cols = ["t", "dfs_regret"]
    data = [np.arange(1, result.T + 1), evaluation.dfs_regret]
    for i, label in enumerate(result.expert_labels):
        cols.append(f"regret_{label}")
        data.append(evaluation.expert_regret[:, i])
    for i, label in enumerate(result.expert_labels):
        cols.append(f"bound_{label}")
        data.append(evaluation.bound_curves[:, i])
    _write_csv(path, cols, data)


def write_agents_csv(path, result):
    if result.agent_values is None:
        raise ValueError("the run was recorded without per-agent values")
    p = result.agent_values.shape[1]
    cols = ["t"] + [f"agent_{a}" for a in range(p)]
    data = [np.arange(1, result.T + 1)] + \
        [result.agent_values[:, a] for a in range(p)]
    _write_csv(path, cols, data)


def write_meta(path, mapping):
    with open(path, "w") as fh:
        for key in sorted(mapping):
            fh.write(f"{key}={mapping[key]}\n")


def _write_csv(path, cols, data):
    stacked = np.column_stack(data)
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in stacked:
            fields = [str(int(row[0]))] + [f"{v:.12g}" for v in row[1:]]
            fh.write(",".join(fields) + "\n")


def read_losses_csv(path):
    """Inverse of write_losses_csv: dict of column name -> float array."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty file")
        names = header.split(",")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != len(names):
                raise ValueError(
                    f"{path}:{lineno}: expected {len(names)} fields, got {len(fields)}")
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric field") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    arr = np.array(rows)
    return {name: arr[:, j] for j, name in enumerate(names)}
