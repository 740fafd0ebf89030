"""Cyclic projection onto affine hyperplanes: the Kaczmarz solver.

A consistent linear system sum_j a_ij x_j = c_i is a family of affine
hyperplanes V_i = {z : <z, y_i> = c_i} with normals y_i = (a_i1..a_iN).
Projecting onto a single hyperplane is closed-form,

    P_i(z) = z - y_i (<z, y_i> - c_i) / ||y_i||^2,

and sweeping the rows cyclically converges in norm to the solution closest
to the starting point; starting from zero this is the unique minimal-norm
solution.

Also here: the string-thirds demonstration, a 3-dimensional two-projection
iteration whose fixed line is the equal-thirds configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg

#: sweeps with no residual improvement before a system is flagged suspect
_STALL_SWEEPS = 50


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The affine hyperplane {z : <z, normal> = offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        v = linalg.as_vector(self.normal)
        if not np.linalg.norm(v):
            raise ValueError("hyperplane normal must be nonzero")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "normal", v)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def ambient_dim(self):
        return self.normal.shape[0]


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Rows of a linear system, one hyperplane per equation."""

    rows: tuple
    ambient_dim: int

    def __post_init__(self):
        rows = tuple(self.rows)
        if not rows:
            raise ValueError("system needs at least one row")
        for h in rows:
            if h.ambient_dim != self.ambient_dim:
                raise ValueError("row normal length does not match ambient dimension")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_arrays(cls, a, c):
        a = linalg.as_matrix(a)
        c = linalg.as_vector(c, dim=a.shape[0])
        return cls(tuple(Hyperplane(a[i], c[i]) for i in range(a.shape[0])), a.shape[1])

    def matrix(self):
        return np.vstack([h.normal for h in self.rows])

    def rhs(self):
        return np.array([h.offset for h in self.rows])


@dataclass(eq=False)
class KaczmarzResult:
    """Solution estimate plus per-sweep residual history."""

    x: np.ndarray
    residual_history: list
    sweeps: int
    converged: bool
    suspected_inconsistent: bool = False


def hyperplane_project(h, z):
    """Nearest point on the hyperplane: z - y (<z,y> - c) / ||y||^2."""
    z = linalg.as_vector(z, dim=h.ambient_dim)
    y = h.normal
    return z - y * ((y @ z - h.offset) / (y @ y))


def max_violation(system, x):
    """Largest normalized row violation max_i |<x,y_i> - c_i| / ||y_i||."""
    a = system.matrix()
    c = system.rhs()
    norms = np.linalg.norm(a, axis=1)
    return float(np.max(np.abs(a @ x - c) / norms))


def solve(system, x0, max_sweeps, tol=1e-10):
    """Cyclic Kaczmarz sweeps until the worst row violation drops to ``tol``.

    Rows are visited in fixed order 1..J each sweep.  A residual history
    entry is recorded after every sweep.  If the residual fails to decrease
    over 50 consecutive sweeps the result is flagged suspected-inconsistent
    rather than raising: the iteration is still Fejer-monotone with respect
    to any solution, so a stall is evidence no solution exists.
    """
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = linalg.as_vector(x0, dim=system.ambient_dim).astype(float, copy=True)
    normals = [h.normal for h in system.rows]
    offsets = [h.offset for h in system.rows]
    sq = [float(y @ y) for y in normals]

    history = []
    best = np.inf
    stall = 0
    converged = False
    suspect = False
    sweeps = 0
    if max_violation(system, x) <= tol:
        return KaczmarzResult(x=x, residual_history=[max_violation(system, x)],
                              sweeps=0, converged=True)
    for sweep in range(1, max_sweeps + 1):
        for y, c, s in zip(normals, offsets, sq):
            x -= y * ((y @ x - c) / s)
        r = max_violation(system, x)
        history.append(r)
        sweeps = sweep
        if r <= tol:
            converged = True
            break
        if r < best:
            best = r
            stall = 0
        else:
            stall += 1
            if stall >= _STALL_SWEEPS:
                suspect = True
                break
    return KaczmarzResult(x=x, residual_history=history, sweeps=sweeps,
                          converged=converged, suspected_inconsistent=suspect)


def load_system(path, dense=False):
    """Read a linear system from a text file.

    Sparse format (default): first line ``n J``; then J lines
    ``c_i k idx_1 val_1 ... idx_k val_k`` with 0-based column indices.
    Dense format (``dense=True``): each line ``a_i1,...,a_iN,c_i``.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [(no, ln) for no, ln in enumerate(lines, start=1) if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty system file")
    if dense:
        rows = []
        for no, ln in lines:
            try:
                vals = [float(t) for t in ln.split(",")]
            except ValueError as exc:
                raise ValueError(f"{path}:{no}: malformed dense row: {exc}") from None
            if len(vals) < 2:
                raise ValueError(f"{path}:{no}: dense row needs coefficients and a right-hand side")
            rows.append(vals)
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError(f"{path}: dense rows have unequal lengths")
        a = np.array([r[:-1] for r in rows])
        c = np.array([r[-1] for r in rows])
        return LinearSystem.from_arrays(a, c)
    no0, header = lines[0]
    try:
        n, j = (int(t) for t in header.split())
    except ValueError:
        raise ValueError(f"{path}:{no0}: header must be 'n J'") from None
    if len(lines) - 1 != j:
        raise ValueError(f"{path}: header promises {j} rows, found {len(lines) - 1}")
    hyperplanes = []
    for no, ln in lines[1:]:
        toks = ln.split()
        try:
            c = float(toks[0])
            k = int(toks[1])
            pairs = [(int(toks[2 + 2 * t]), float(toks[3 + 2 * t])) for t in range(k)]
        except (ValueError, IndexError):
            raise ValueError(f"{path}:{no}: malformed sparse row") from None
        y = np.zeros(n)
        for idx, val in pairs:
            if not 0 <= idx < n:
                raise ValueError(f"{path}:{no}: column index {idx} outside 0..{n - 1}")
            y[idx] = val
        hyperplanes.append(Hyperplane(y, c))
    return LinearSystem(tuple(hyperplanes), n)


#: one fold-and-slide step on each end of the string
THIRDS_STEP_A = np.array([[1.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, 0.5]])
THIRDS_STEP_B = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])


def thirds_demo(x, y, z, n_iters):
    """Fold-and-slide iteration dividing a string of length x+y+z into thirds.

    Section lengths (x, y, z) evolve under the two averaging projections
    above (right end folded to the left clip, then left end to the right
    clip).  Returns the clip positions (left, right) = (x_k, x_k + y_k) for
    k = 0..n_iters and whether every deviation stayed within the geometric
    envelopes (2c/3) 4^-k for the left clip and (c/3) 4^(1-k) for the right.
    """
    if min(x, y, z) <= 0:
        raise ValueError("section lengths must be positive")
    if n_iters < 0:
        raise ValueError("n_iters must be >= 0")
    c = x + y + z
    step = THIRDS_STEP_B @ THIRDS_STEP_A
    v = np.array([x, y, z], dtype=float)
    positions = [(float(v[0]), float(v[0] + v[1]))]
    for _ in range(n_iters):
        v = step @ v
        positions.append((float(v[0]), float(v[0] + v[1])))
    bound_ok = True
    for k, (left, right) in enumerate(positions):
        left_ok = abs(left - c / 3.0) <= (2.0 * c / 3.0) * 4.0 ** (-k) + 1e-12 * c
        right_ok = abs(right - 2.0 * c / 3.0) <= (c / 3.0) * 4.0 ** (1 - k) + 1e-12 * c
        bound_ok = bound_ok and left_ok and right_ok
    return positions, bound_ok
