"""
Reference values that do not go through the geometry app.

spaceform_tube_oracle is the textbook principal curvature sum of a tube
around a totally geodesic subspace. embedded_revolution_oracle builds the
surface of revolution in Euclidean 3-space and reads its mean curvature off
the fundamental forms of the sampled embedding. Neither calls
geometry.curvature, so agreement with it is evidence, not tautology.
"""

import numpy as np

from kernels.errors import DomainError, ModelError
from kernels.spaces import Curvature

# angular half-width of the stencil used for the theta derivatives
THETA_STEP = 2e-4


def spaceform_tube_oracle(n, p, compactness, r):
    """
    Mean curvature (sum of principal curvatures) of the constant tube of
    radius r around a totally geodesic p-dimensional subspace of the
    (n+1)-dimensional sphere or hyperbolic space.
    """
    if not 1 <= p <= n - 1:
        raise ModelError(f'Need 1 <= p <= n - 1, got n={n}, p={p}')
    curvature = Curvature.parse(compactness)
    r = np.asarray(r, dtype=float)
    if curvature is Curvature.COMPACT:
        value = (n - p) / np.tan(r) - p * np.tan(r)
    else:
        value = (n - p) / np.tanh(r) + p * np.tanh(r)
    if value.ndim == 0:
        return float(value)
    return value


def _second_difference(values, h):
    """d2/ds2 along axis 0 on a uniform grid, second order up to the ends."""
    out = np.empty_like(values)
    out[1:-1] = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / (h * h)
    out[0] = (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / (h * h)
    out[-1] = (2.0 * values[-1] - 5.0 * values[-2] + 4.0 * values[-3] - values[-4]) / (h * h)
    return out


def _embedding(s, r, theta):
    """X(s, theta) = (s, r cos theta, r sin theta) sampled on s x theta."""
    return np.stack(
        [
            np.broadcast_to(s[:, None], (s.size, theta.size)),
            r[:, None] * np.cos(theta)[None, :],
            r[:, None] * np.sin(theta)[None, :],
        ],
        axis=-1,
    )


def embedded_revolution_oracle(profile, s):
    """
    Per-node mean curvature of {(s, r(s) cos t, r(s) sin t)}.

    profile is a callable r(s) or an array of radii on the nodes s. All
    derivatives of the embedding are finite differences: second order along s
    on the uniform grid and a three-column stencil of width THETA_STEP along the
    circle. The normal X_s x X_t points at the axis, so a cylinder of radius c
    has mean curvature +1/c.
    """
    s = np.asarray(s, dtype=float)
    r = np.asarray(profile(s) if callable(profile) else profile, dtype=float)
    if r.shape != s.shape:
        raise DomainError(f'Profile has shape {r.shape}, grid has {s.shape}')
    if s.size < 4 or not np.allclose(np.diff(s), s[1] - s[0], rtol=1e-9, atol=0.0):
        raise DomainError('The revolution oracle needs a uniform grid of at least 4 nodes')
    if np.any(r <= 0):
        raise DomainError('Degenerate metric: the profile touches the axis')

    d = THETA_STEP
    X = _embedding(s, r, np.array([-d, 0.0, d]))

    h = s[1] - s[0]
    X_s = np.gradient(X, h, axis=0, edge_order=2)
    X_ss = _second_difference(X, h)
    X_t = (X[:, 2] - X[:, 0]) / (2.0 * d)
    X_tt = (X[:, 2] - 2.0 * X[:, 1] + X[:, 0]) / (d * d)
    X_st = (X_s[:, 2] - X_s[:, 0]) / (2.0 * d)
    X_s, X_ss = X_s[:, 1], X_ss[:, 1]

    # first fundamental form
    E = np.einsum('ij,ij->i', X_s, X_s)
    F = np.einsum('ij,ij->i', X_s, X_t)
    G = np.einsum('ij,ij->i', X_t, X_t)

    normal = np.cross(X_s, X_t)
    normal /= np.linalg.norm(normal, axis=1)[:, None]

    # second fundamental form
    L = np.einsum('ij,ij->i', X_ss, normal)
    M = np.einsum('ij,ij->i', X_st, normal)
    N = np.einsum('ij,ij->i', X_tt, normal)

    return (E * N - 2.0 * F * M + G * L) / (E * G - F * F)


def sphere_cap_profile(radius):
    return lambda s: np.sqrt(radius * radius - np.asarray(s, dtype=float) ** 2)


def cylinder_profile(radius):
    return lambda s: np.full_like(np.asarray(s, dtype=float), radius)

