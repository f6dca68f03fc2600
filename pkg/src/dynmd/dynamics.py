"""Dynamical models Phi and the non-expansion audit.

All v1 models are time-invariant maps; apply() still takes the time index
so callers can wire in time-varying models later.  Models never mutate
their input and map feasible points to feasible points for the sets they
are used with (shifts preserve boxes containing 0, the attraction map
preserves [-1, 1] entrywise).
"""

from dataclasses import dataclass

import numpy as np

# compass directions for angles 2*pi*i/8, i = 0..7; rows grow downward so
# the row displacement is minus the sine
DIRECTIONS = (
    ("E", 0, 1),
    ("NE", -1, 1),
    ("N", -1, 0),
    ("NW", -1, -1),
    ("W", 0, -1),
    ("SW", 1, -1),
    ("S", 1, 0),
    ("SE", 1, 1),
)


class DynamicalModel:
    label = "model"

    def apply(self, theta, t=None):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(label={self.label!r})"


class IdentityModel(DynamicalModel):
    """Phi(theta) = theta."""

    def __init__(self, label="identity"):
        self.label = label

    def apply(self, theta, t=None):
        return np.array(theta, dtype=float, copy=True)


class PixelShift(DynamicalModel):
    """Translate an image one pixel along one of 8 compass directions.

    direction indexes DIRECTIONS (0 = E, counterclockwise by 45 degrees up
    to 7 = SE); diagonal members move one pixel along each axis.  boundary
    is "zero" (content shifted past the edge is dropped, vacated pixels are
    zero) or "wrap" (toroidal roll).  Input may be a (rows, cols) image or
    its flattened vector; the output matches the input shape.
    """

    def __init__(self, direction, rows, cols, boundary="zero"):
        if direction not in range(8):
            raise ValueError(f"direction must be in 0..7, got {direction}")
        if rows < 1 or cols < 1:
            raise ValueError(f"grid must be at least 1x1, got {rows}x{cols}")
        if boundary not in ("zero", "wrap"):
            raise ValueError(f"boundary must be 'zero' or 'wrap', got {boundary!r}")
        self.direction = int(direction)
        self.rows = int(rows)
        self.cols = int(cols)
        self.boundary = boundary
        self.label, self.dr, self.dc = DIRECTIONS[direction]

    def apply(self, theta, t=None):
        theta = np.asarray(theta, dtype=float)
        if theta.size != self.rows * self.cols:
            raise ValueError(
                f"point has {theta.size} entries, grid needs {self.rows * self.cols}")
        img = theta.reshape(self.rows, self.cols)
        if self.boundary == "wrap":
            out = np.roll(img, (self.dr, self.dc), axis=(0, 1))
        else:
            out = np.zeros_like(img)
            dr, dc = self.dr, self.dc
            r_dst = slice(max(0, dr), self.rows + min(0, dr))
            c_dst = slice(max(0, dc), self.cols + min(0, dc))
            r_src = slice(max(0, -dr), self.rows + min(0, -dr))
            c_src = slice(max(0, -dc), self.cols + min(0, -dc))
            out[r_dst, c_dst] = img[r_src, c_src]
        return out.reshape(theta.shape)


class NetworkAttraction(DynamicalModel):
    """Pull each entry toward the strongest shared-neighbor product.

    For every entry (a, b) let c* = argmax_{c not in {a, b}} |theta_ac *
    theta_bc| (ties to the lowest index).  If |theta_ac* * theta_bc*| >
    |theta_ab| the entry moves to (1 - alpha) theta_ab + alpha theta_ac* *
    theta_bc*; otherwise it is unchanged.  alpha = 0 is exactly the
    identity.  Cost is O(p^3) memory and time per application.
    """

    def __init__(self, alpha):
        if not (0.0 <= alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
        self.alpha = float(alpha)
        self.label = f"alpha={self.alpha:g}"

    def apply(self, theta, t=None):
        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
            raise ValueError(f"theta must be square, got shape {theta.shape}")
        if self.alpha == 0.0:
            return theta.copy()
        p = theta.shape[0]
        prod = theta[:, None, :] * theta[None, :, :]
        score = np.abs(prod)
        idx = np.arange(p)
        score[idx, :, idx] = -1.0  # exclude c == a
        score[:, idx, idx] = -1.0  # exclude c == b
        cstar = score.argmax(axis=2)
        best_abs = np.take_along_axis(score, cstar[..., None], axis=2)[..., 0]
        best = np.take_along_axis(prod, cstar[..., None], axis=2)[..., 0]
        pull = best_abs > np.abs(theta)
        return np.where(pull, (1.0 - self.alpha) * theta + self.alpha * best, theta)


def shift_family(rows, cols, boundary="zero"):
    """The 9-member video family: 8 one-pixel shifts plus the static model."""
    models = [PixelShift(i, rows, cols, boundary=boundary) for i in range(8)]
    models.append(IdentityModel(label="static"))
    return models


@dataclass(frozen=True)
class ContractionAudit:
    """Sampled estimate of max D(Phi a || Phi b) - D(a || b) over a set."""

    model_label: str
    estimate: float
    n_pairs: int
    seed: int
    threshold: float
    violation: bool
    worst_a: np.ndarray
    worst_b: np.ndarray


def audit_contraction(model, geom, fset, n_pairs=1000, seed=0, threshold=1e-10):
    """Estimate the divergence expansion of a model over sampled pairs.

    Samples n_pairs pairs from fset, reports the max (signed) gap
    D(Phi a || Phi b) - D(a || b) together with the worst pair.  The
    estimate is a sampled lower bound on the true supremum; violation
    flags estimate > threshold.  Deterministic for a fixed seed.
    """
    if n_pairs < 1:
        raise ValueError(f"n_pairs must be >= 1, got {n_pairs}")
    rng = np.random.default_rng(seed)
    a_pts = fset.sample(rng, n_pairs)
    b_pts = fset.sample(rng, n_pairs)
    best_gap = -np.inf
    worst = None
    for a, b in zip(a_pts, b_pts):
        gap = geom.divergence(model.apply(a), model.apply(b)) - geom.divergence(a, b)
        if gap > best_gap:
            best_gap = gap
            worst = (a, b)
    return ContractionAudit(
        model_label=model.label,
        estimate=float(best_gap),
        n_pairs=int(n_pairs),
        seed=int(seed),
        threshold=float(threshold),
        violation=bool(best_gap > threshold),
        worst_a=worst[0].copy(),
        worst_b=worst[1].copy(),
    )
