import numpy as np


def central_diff(fun, theta, h=1e-5):
    """Central finite-difference gradient of a scalar function."""
    theta = np.asarray(theta, dtype=float)
    flat = theta.ravel()
    g = np.zeros_like(flat)
    for j in range(flat.size):
        e = np.zeros_like(flat)
        e[j] = h
        g[j] = (fun((flat + e).reshape(theta.shape))
                - fun((flat - e).reshape(theta.shape))) / (2.0 * h)
    return g.reshape(theta.shape)


def rel_err(a, b):
    """Relative error of a against reference b, floored at unit scale."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = max(1.0, float(np.linalg.norm(b.ravel())))
    return float(np.linalg.norm((a - b).ravel())) / denom
