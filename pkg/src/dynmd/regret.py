"""Regret evaluation: comparator sequences, variation measures, the
switching-comparator DP, horizon bounds, and the tracking decomposition.

A comparator sequence holds T + 1 points theta_1 .. theta_{T+1}; the
regret sums use the first T points while the variation measures need the
final one.  All norms are Euclidean over flattened points.
"""

import math
from dataclasses import dataclass

import numpy as np

from .losses import CompositeLoss, LeastSquaresLoss


class ComparatorSequence:
    """Finite comparator path; points is (L, *shape), label is free text."""

    def __init__(self, points, label="comparator"):
        pts = np.asarray(points, dtype=float)
        if pts.ndim < 2 or pts.shape[0] < 2:
            raise ValueError("a comparator needs at least two stacked points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("comparator points must be finite")
        self.points = pts
        self.label = str(label)

    def __len__(self):
        return self.points.shape[0]

    @property
    def horizon(self):
        """T such that the sequence is theta_1 .. theta_{T+1}."""
        return self.points.shape[0] - 1

    def __repr__(self):
        return f"ComparatorSequence(label={self.label!r}, len={len(self)})"


def _comparator_points(comparator, T):
    pts = comparator.points if isinstance(comparator, ComparatorSequence) else np.asarray(comparator, dtype=float)
    if pts.shape[0] not in (T, T + 1):
        raise ValueError(f"comparator has {pts.shape[0]} points, expected {T} or {T + 1}")
    return pts


def regret(losses, predictions, comparator):
    """sum_t ell_t(prediction_t) - sum_t ell_t(theta_t)."""
    T = len(losses)
    if len(predictions) != T:
        raise ValueError(f"{len(predictions)} predictions for {T} losses")
    pts = _comparator_points(comparator, T)
    pred_sum = sum(losses[t].value(predictions[t]) for t in range(T))
    comp_sum = sum(losses[t].value(pts[t]) for t in range(T))
    return float(pred_sum - comp_sum)


def cumulative_regret(losses, predictions, comparator):
    """Vector of prefix regrets R_1 .. R_T."""
    T = len(losses)
    if len(predictions) != T:
        raise ValueError(f"{len(predictions)} predictions for {T} losses")
    pts = _comparator_points(comparator, T)
    diffs = np.array([losses[t].value(predictions[t]) - losses[t].value(pts[t])
                      for t in range(T)])
    return np.cumsum(diffs)


def least_squares_minimizer(losses):
    """Batch minimizer of a sum of unregularized least-squares rounds.

    Solves (sum A_t' A_t) theta = sum A_t' x_t; requires every round to be
    a CompositeLoss over LeastSquaresLoss with tau = 0 (the normal
    equations do not account for an l1 term or a constraint set).
    """
    if len(losses) == 0:
        raise ValueError("losses must be non-empty")
    n = None
    gram = None
    rhs = None
    for loss in losses:
        if not (isinstance(loss, CompositeLoss) and isinstance(loss.f, LeastSquaresLoss)):
            raise ValueError("least_squares_minimizer needs least-squares rounds")
        if loss.r.tau != 0.0:
            raise ValueError("least_squares_minimizer requires tau = 0; pass candidates instead")
        A, x = loss.f.A, loss.f.x
        if gram is None:
            n = A.shape[1]
            gram = np.zeros((n, n))
            rhs = np.zeros(n)
        gram += A.T @ A
        rhs += A.T @ x
    theta, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    return theta


def static_regret(losses, predictions, candidates=None):
    """Regret against the best single point: a candidate set, or the batch
    least-squares minimizer when no candidates are given."""
    T = len(losses)
    if len(predictions) != T:
        raise ValueError(f"{len(predictions)} predictions for {T} losses")
    if candidates is None:
        best = least_squares_minimizer(losses)
        candidates = [best]
    else:
        candidates = list(candidates)
        if len(candidates) == 0:
            raise ValueError("candidate set must be non-empty")
    pred_sum = sum(losses[t].value(predictions[t]) for t in range(T))
    comp_sum = min(sum(losses[t].value(c) for t in range(T)) for c in candidates)
    return float(pred_sum - comp_sum)


def variation(comparator):
    """sum_t ||theta_{t+1} - theta_t|| over the sequence."""
    pts = comparator.points if isinstance(comparator, ComparatorSequence) else np.asarray(comparator, dtype=float)
    diffs = pts[1:] - pts[:-1]
    return float(np.sqrt((diffs.reshape(diffs.shape[0], -1) ** 2).sum(axis=1)).sum())


def variation_phi(comparator, model):
    """sum_t ||theta_{t+1} - Phi(theta_t)||: deviation from the model's flow."""
    pts = comparator.points if isinstance(comparator, ComparatorSequence) else np.asarray(comparator, dtype=float)
    total = 0.0
    for t in range(pts.shape[0] - 1):
        d = pts[t + 1] - model.apply(pts[t], t + 1)
        total += float(np.linalg.norm(np.ravel(d)))
    return total


def _segmented_min(cost, n_segments):
    """Exact DP: split steps 1..T into n_segments contiguous nonempty
    segments, pay each segment's best column sum, minimize the total.

    cost is (T, N).  Returns (value, [(start, end)] 1-based inclusive,
    [column index per segment]).  Prefix sums make each segment-cost query
    O(N); the table sweep is O(n_segments * T^2) vector ops.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise ValueError("cost must be a (T, N) matrix")
    T, N = cost.shape
    if not (1 <= n_segments <= T):
        raise ValueError(f"need 1 <= segments <= {T}, got {n_segments}")
    prefix = np.vstack([np.zeros(N), np.cumsum(cost, axis=0)])
    table = np.full((n_segments + 1, T + 1), np.inf)
    split = np.zeros((n_segments + 1, T + 1), dtype=int)
    table[1, 1:] = prefix[1:].min(axis=1)
    for j in range(2, n_segments + 1):
        for b in range(j, T + 1):
            a = np.arange(j - 1, b)  # last step covered by the first j-1 segments
            seg = (prefix[b] - prefix[a]).min(axis=1)
            tot = table[j - 1, a] + seg
            k = int(np.argmin(tot))
            table[j, b] = tot[k]
            split[j, b] = a[k]
    bounds = []
    cols = []
    b = T
    for j in range(n_segments, 0, -1):
        a = 0 if j == 1 else int(split[j, b])
        cols.append(int(np.argmin(prefix[b] - prefix[a])))
        bounds.append((a + 1, b))
        b = a
    bounds.reverse()
    cols.reverse()
    return float(table[n_segments, T]), bounds, cols


@dataclass(frozen=True)
class SegmentationResult:
    """Best m-switch assignment of models to contiguous time segments."""

    m: int
    total_deviation: float
    switch_times: tuple  # t_2 .. t_{m+1}: first step of segments 2..m+1
    model_indices: tuple  # one model per segment
    segments: tuple  # (start, end, model index, deviation) per segment


def best_segmentation(comparator, models, m):
    """Minimal summed deviation of a comparator from m+1 model regimes.

    Picks switch times 1 = t_1 < t_2 < ... < t_{m+2} = T + 1 and one model
    per segment minimizing sum_k sum_{t in segment k} ||theta_{t+1} -
    Phi_{i_k}(theta_t)||.  Exact by dynamic programming.
    """
    pts = comparator.points if isinstance(comparator, ComparatorSequence) else np.asarray(comparator, dtype=float)
    T = pts.shape[0] - 1
    models = list(models)
    if len(models) == 0:
        raise ValueError("at least one model is required")
    if int(m) != m or m < 0:
        raise ValueError(f"m must be an integer >= 0, got {m}")
    if m >= T:
        raise ValueError(f"m must be < T, got m={m}, T={T}")
    cost = np.empty((T, len(models)))
    for i, model in enumerate(models):
        for t in range(T):
            d = pts[t + 1] - model.apply(pts[t], t + 1)
            cost[t, i] = np.linalg.norm(np.ravel(d))
    value, bounds, cols = _segmented_min(cost, m + 1)
    segments = tuple(
        (start, end, col, float(cost[start - 1:end, col].sum()))
        for (start, end), col in zip(bounds, cols))
    return SegmentationResult(
        m=int(m),
        total_deviation=value,
        switch_times=tuple(start for start, _ in bounds[1:]),
        model_indices=tuple(cols),
        segments=segments)


def theorem2_bound(constants, schedule, v_phi, T):
    """Horizon bound for one DMD instance:

        d_max / eta_{T+1} + (4 M / eta_T) * V_Phi
        + (g_ell^2 / (2 sigma)) * sum_{t<=T} eta_t
    """
    if int(T) != T or T < 1:
        raise ValueError(f"T must be an integer >= 1, got {T}")
    if v_phi < 0:
        raise ValueError(f"v_phi must be >= 0, got {v_phi}")
    etas = schedule.etas(T + 1)
    return float(constants.d_max / etas[T]
                 + 4.0 * constants.big_m / etas[T - 1] * v_phi
                 + constants.g_ell ** 2 / (2.0 * constants.sigma) * etas[:T].sum())


def theorem2_curve(constants, schedule, deviations):
    """Vector of theorem2_bound values at every prefix t = 1..T, given the
    per-step comparator deviations ||theta_{t+1} - Phi(theta_t)||."""
    dev = np.asarray(deviations, dtype=float)
    T = dev.shape[0]
    etas = schedule.etas(T + 1)
    return (constants.d_max / etas[1:]
            + 4.0 * constants.big_m / etas[:T] * np.cumsum(dev)
            + constants.g_ell ** 2 / (2.0 * constants.sigma) * np.cumsum(etas[:T]))


@dataclass(frozen=True)
class TrackingDecomposition:
    """Regret split at the best <= m-switch expert sequence.

    t1: aggregated predictions vs that expert sequence (the price of
    aggregation); t2: that sequence vs the comparator (the price of the
    expert pool).  t1 + t2 equals the total regret.
    """

    t1: float
    t2: float
    total: float
    best_sequence_loss: float
    switch_times: tuple
    expert_indices: tuple


def tracking_decomposition_from_losses(dfs_losses, expert_losses, comparator_losses, m):
    """Decomposition from recorded per-round loss traces.

    dfs_losses: (T,) losses of the aggregated predictions; expert_losses:
    (T, N) per-expert losses; comparator_losses: (T,) losses of the
    comparator path.
    """
    dfs_losses = np.asarray(dfs_losses, dtype=float)
    expert_losses = np.asarray(expert_losses, dtype=float)
    comparator_losses = np.asarray(comparator_losses, dtype=float)
    T = dfs_losses.shape[0]
    if expert_losses.shape[0] != T or comparator_losses.shape[0] != T:
        raise ValueError("loss traces must share the horizon")
    if int(m) != m or m < 0:
        raise ValueError(f"m must be an integer >= 0, got {m}")
    if m >= T:
        raise ValueError(f"m must be < T, got m={m}, T={T}")
    best, bounds, cols = _segmented_min(expert_losses, m + 1)
    t1 = float(dfs_losses.sum() - best)
    t2 = float(best - comparator_losses.sum())
    return TrackingDecomposition(
        t1=t1, t2=t2, total=t1 + t2, best_sequence_loss=best,
        switch_times=tuple(start for start, _ in bounds[1:]),
        expert_indices=tuple(cols))


def tracking_decomposition(losses, dfs_predictions, expert_predictions, comparator, m):
    """Decomposition computed from prediction trajectories.

    expert_predictions is indexed [expert][t]; the best <= m-switch expert
    sequence is found by the same DP as best_segmentation, over per-round
    expert losses instead of path deviations.
    """
    T = len(losses)
    pts = _comparator_points(comparator, T)
    dfs_losses = np.array([losses[t].value(dfs_predictions[t]) for t in range(T)])
    expert_losses = np.empty((T, len(expert_predictions)))
    for i, traj in enumerate(expert_predictions):
        if len(traj) != T:
            raise ValueError(f"expert {i} has {len(traj)} predictions, expected {T}")
        for t in range(T):
            expert_losses[t, i] = losses[t].value(traj[t])
    comp_losses = np.array([losses[t].value(pts[t]) for t in range(T)])
    return tracking_decomposition_from_losses(dfs_losses, expert_losses, comp_losses, m)


def fixed_share_bound(n_experts, m, T, eta_r, lam):
    """Aggregation-term bound for fixed share with at most m comparator switches:

        (m+1) log(N) / eta_r
        + log(1 / (lam^m (1-lam)^(T-m-1))) / eta_r
        + eta_r * T / 8
    """
    if n_experts < 1 or T < 1 or not (0 <= m < T):
        raise ValueError("need n_experts >= 1, T >= 1, 0 <= m < T")
    if not (eta_r > 0):
        raise ValueError(f"eta_r must be positive, got {eta_r}")
    if not (0.0 <= lam <= 1.0):
        raise ValueError(f"lam must lie in [0, 1], got {lam}")
    log_share = 0.0
    if m > 0:
        log_share -= m * (math.log(lam) if lam > 0 else -math.inf)
    if T - m - 1 > 0:
        log_share -= (T - m - 1) * (math.log(1.0 - lam) if lam < 1 else -math.inf)
    return ((m + 1) * math.log(n_experts) / eta_r
            + log_share / eta_r
            + eta_r * T / 8.0)


def moving_average(values, window=30):
    """Trailing mean with partial windows at the start of the trace."""
    v = np.asarray(values, dtype=float)
    if int(window) != window or window < 1:
        raise ValueError(f"window must be an integer >= 1, got {window}")
    c = np.concatenate([[0.0], np.cumsum(v)])
    t = np.arange(1, v.shape[0] + 1)
    lo = np.maximum(t - window, 0)
    return (c[t] - c[lo]) / (t - lo)
