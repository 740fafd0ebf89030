"""Desk-scale construction of projection schedules that stall convergence.

The pieces, bottom-up:

* ``quarter_circle`` rotates a unit vector u onto an orthogonal unit vector v
  through k equally spaced intermediate lines, approximating each line
  projection by a high power of a three-projection sandwich over a nested
  chain X_1 c ... c X_k.  The output word phi over {plane W, chain} carries
  u to within 2*eps of v.

* ``replace_projection`` swaps the whole chain for just two subspaces: X (the
  chain's top) and a slight tilt Y of it, with ||P_X - P_Y|| < eta and
  (P_X P_Y P_X)^s(j) within eps of each chain projection P_{X_j}.

* ``build_triple`` composes the two: a word psi over three letters
  {W, X, Y} with ||psi(P_W, P_X, P_Y) u - v|| < 3*eps.

* ``glue`` chains K triples on (mostly) orthogonal blocks so the iterates
  visit an orthonormal set e_1, e_2, ..., e_{K+1}: three fixed subspaces
  M1, M2, M3 and one finite schedule whose checkpoint iterates stay within
  4*sum(eps_i) of distinct orthonormal vectors -- a non-Cauchy window.

In R^n the full infinite schedule must eventually converge (finite-
dimensional norm convergence), so only this windowed non-Cauchy behaviour --
not true divergence -- is realizable here; every report states that caveat.

The required powers r(j) and s(j) grow extremely fast as eps shrinks (this
growth is exactly why genuine divergence needs infinitely many dimensions),
so both searches carry caps and raise ``ExponentCapExceeded`` with the
offending stage when a requested accuracy is out of desk-scale reach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .schedules import Schedule
from .words import Word

#: caps on the two power searches; tunable per call, these are the defaults
DEFAULT_R_CAP = 10**6
DEFAULT_S_CAP = 10**8

#: dense eigensystem powers carry noise ~ s * machine-eps, so the dense
#: verification channel is used only below this exponent
_DIRECT_POWER_LIMIT = 10**5

#: measurement precision granted to matrix-channel verifications; the exact
#: scalar channel is always asserted without slack
_MATRIX_CHANNEL_SLACK = 1e-8

FINITE_DIM_CAVEAT = (
    "finite-dimensional ambient space: the infinite schedule must eventually "
    "converge, so this construction demonstrates a non-Cauchy window over its "
    "checkpoints, not true divergence"
)


class ExponentCapExceeded(RuntimeError):
    """A power search needs an exponent beyond the configured cap."""

    def __init__(self, message, stage=None, triple=None, required=None):
        super().__init__(message)
        self.stage = stage
        self.triple = triple
        self.required = required


class BudgetExceeded(ValueError):
    """The accuracy budget sum(4 eps_i) < 1/2 was violated."""


def k_of_eps(eps):
    """Smallest k >= 1 with cos(pi/2k)^k strictly above 1 - eps.

    Exact algebraic ties (cos(pi/2)^1 = 0 at eps = 1, cos(pi/4)^2 = 1/2 at
    eps = 1/2) must not pass the strict inequality, so the comparison carries
    a small guard against floating-point rounding of the cosine powers.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    k = 1
    while True:
        value = math.cos(math.pi / (2.0 * k)) ** k
        if value > 1.0 - eps + 1e-12:
            return k
        k += 1


def _sym_power(m, exponent):
    """m^exponent for a symmetric PSD contraction, via its eigensystem.

    Eigenvalues are clamped to [0, 1] (the operator is a product of
    orthogonal projections) and powered in log space, so huge exponents cost
    one eigendecomposition.
    """
    if exponent == 1:
        return np.asarray(m, dtype=float)
    vals, vecs = np.linalg.eigh(np.asarray(m, dtype=float))
    vals = np.clip(vals, 0.0, 1.0)
    powered = np.where(vals > 0.0, np.exp(exponent * np.log(np.maximum(vals, 1e-300))), 0.0)
    powered[vals == 1.0] = 1.0
    return (vecs * powered) @ vecs.T


def _smallest_power(m, target, bound, cap, stage):
    """Smallest r >= 1 with ||m^r - target|| < bound.

    For the symmetric PSD contractions used here the fixed space of ``m``
    equals the range of ``target``, so ||m^r - target|| = lambda^r with
    lambda = ||m - target||; the candidate from the logarithm is then
    verified (and r-1 refuted) against the actual matrix powers.
    """
    lam = linalg.operator_norm(np.asarray(m) - np.asarray(target))
    if lam < bound:
        return 1
    if lam >= 1.0 - 1e-13:
        raise ExponentCapExceeded(
            f"power search at stage {stage}: contraction factor {lam:.17g} is "
            f"numerically 1, no finite power reaches {bound:.3e}",
            stage=stage, required=math.inf)
    r = max(1, math.ceil(math.log(bound) / math.log(lam)))
    if r > cap:
        raise ExponentCapExceeded(
            f"power search at stage {stage} needs exponent ~{r:.3e} beyond the cap {cap:.3e}; "
            "a larger eps keeps the construction desk-scale",
            stage=stage, required=r)
    value = linalg.operator_norm(_sym_power(m, r) - target)
    guard = 0
    while value >= bound:
        r += 1
        guard += 1
        if r > cap or guard > 64:
            raise ExponentCapExceeded(
                f"power search at stage {stage} exceeded the cap {cap:.3e}",
                stage=stage, required=r)
        value = linalg.operator_norm(_sym_power(m, r) - target)
    while r > 1 and linalg.operator_norm(_sym_power(m, r - 1) - target) < bound:
        r -= 1
    return r


@dataclass(eq=False)
class QuarterCircleResult:
    """Output of ``quarter_circle``; see the module docstring."""

    k: int
    h: list
    alphas: list
    chain: list
    r: list
    phi: Word
    achieved_error: float


def quarter_circle(x_space, u, v, eps, alpha0=0.5, r_cap=DEFAULT_R_CAP):
    """Rotate u to v inside ``x_space`` by a finite word of projections.

    Needs u, v orthonormal in ``x_space`` and dim >= k(eps) + 2 to host the
    k perturbation directions.  Returns the nested chain X_1 c ... c X_k,
    the powers r(j) with ||(P_{X_j} P_W P_{X_j})^r(j) - P_{line h_j}|| <
    eps/k, and the word phi = (b_k c b_k)^r(k) ... (b_1 c b_1)^r(1) over
    {c = W, b_j = X_j} achieving ||phi u - v|| < 2 eps.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    if not 0.0 < alpha0 < 1.0:
        raise ValueError("alpha0 must lie in (0, 1)")
    k = k_of_eps(eps)
    n = x_space.ambient_dim
    u = linalg.as_vector(u, dim=n)
    v = linalg.as_vector(v, dim=n)
    for name, w in (("u", u), ("v", v)):
        if abs(np.linalg.norm(w) - 1.0) > 1e-10:
            raise ValueError(f"{name} must be a unit vector")
        if np.linalg.norm(linalg.project(x_space, w) - w) > 1e-10:
            raise ValueError(f"{name} must lie in the given subspace")
    if abs(u @ v) > 1e-10:
        raise ValueError("u and v must be orthogonal")
    if x_space.dim < k + 2:
        raise ValueError(f"subspace dimension {x_space.dim} too small: need k + 2 = {k + 2}")

    w_plane = linalg.orthonormalize([u, v], ambient_dim=n)
    p_w = linalg.projection_matrix(w_plane)
    # k orthonormal perturbation directions inside x_space, orthogonal to W
    z_pool = linalg.intersect([linalg.complement(w_plane), x_space])
    z = [z_pool.basis[:, i] for i in range(k)]

    h = [u * math.cos(math.pi * j / (2.0 * k)) + v * math.sin(math.pi * j / (2.0 * k))
         for j in range(k + 1)]
    bound = eps / k

    alphas = [alpha0]
    chain = []
    r_list = []
    perturbed = [h[0] + alpha0 * z[0]]
    for j in range(1, k + 1):
        candidate = linalg.orthonormalize(perturbed + [h[j]], ambient_dim=n)
        p_line = np.outer(h[j], h[j])
        m = linalg.projection_matrix(candidate) @ p_w @ linalg.projection_matrix(candidate)
        r_j = _smallest_power(m, p_line, bound, r_cap, stage=j)
        r_list.append(r_j)
        if j == k:
            alphas.append(0.0)
            chain.append(candidate)
            break
        alpha = alphas[-1] / 2.0
        for _ in range(60):
            x_j = linalg.orthonormalize(perturbed + [h[j] + alpha * z[j]], ambient_dim=n)
            p_j = linalg.projection_matrix(x_j)
            if linalg.operator_norm(_sym_power(p_j @ p_w @ p_j, r_j) - p_line) < bound:
                break
            alpha /= 2.0
        else:
            raise ValueError(f"no perturbation size survived at stage {j}")
        alphas.append(alpha)
        perturbed.append(h[j] + alpha * z[j])
        chain.append(x_j)

    # phi = (b_k c b_k)^r(k) ... (b_1 c b_1)^r(1); letter 1 = c = W, letter j+1 = b_j
    factors = []
    for j in range(k, 0, -1):
        sandwich = Word.from_letters(k + 1, [j + 1, 1, j + 1])
        factors.append((sandwich, r_list[j - 1]))
    phi = Word(k + 1, tuple(factors))

    current = u.copy()
    for j in range(1, k + 1):
        p_j = linalg.projection_matrix(chain[j - 1])
        current = _sym_power(p_j @ p_w @ p_j, r_list[j - 1]) @ current
    achieved = float(np.linalg.norm(current - v))
    if achieved >= 2.0 * eps:
        raise ArithmeticError(f"rotation word error {achieved:.6g} did not meet 2*eps = {2 * eps:.6g}")
    return QuarterCircleResult(k=k, h=h, alphas=alphas, chain=chain, r=r_list,
                               phi=phi, achieved_error=achieved)


def _min_exponent(beta, eps):
    """Smallest integer s >= 1 with (1 + beta^2)^(-s) < eps (log-space exact)."""
    rate = math.log1p(beta * beta)
    s = max(1, math.ceil(math.log(1.0 / eps) / rate))
    while math.exp(-s * rate) >= eps:
        s += 1
    while s > 1 and math.exp(-(s - 1) * rate) < eps:
        s -= 1
    return s


def replace_projection(chain, x_space, e_space, eps, eta, a, s_cap=DEFAULT_S_CAP):
    """Tilted copy Y of ``x_space`` whose sandwich powers walk the chain.

    Returns (Y, s, betas) with a < s(k) < ... < s(1), beta_1 < ... <
    beta_{k+1} = eta/4, and

        ||(P_X P_Y P_X)^s(j) - P_{X_j}|| < eps for each chain member,
        ||P_X - P_Y|| < eta,    X intersect Y = {0}.

    Y is spanned by e_i + gamma_i w_i over an orthonormal basis e_i of X
    adapted to the chain (gamma_i = beta of the chain tier of e_i) and
    orthonormal w_i drawn from E orthogonal to X, which requires
    dim(X-perp within E) >= dim X.

    The sandwich P_X P_Y P_X acts diagonally on the adapted basis with
    eigenvalues 1/(1 + gamma_i^2); each posted inequality is checked against
    the dense matrices directly while s(j) is small enough for float64 to
    resolve it, and through the verified diagonal action plus log-space
    scalar powers beyond that.
    """
    if eps <= 0 or eta <= 0:
        raise ValueError("eps and eta must be positive")
    if a < 1:
        raise ValueError("a must be >= 1")
    chain = list(chain)
    if not chain:
        raise ValueError("chain must be non-empty")
    k = len(chain)
    n = x_space.ambient_dim
    nested = chain + [x_space]
    for inner, outer in zip(nested, nested[1:]):
        if not linalg.contains(outer, inner, tol=1e-8):
            raise ValueError("chain members must be nested inside the top subspace")
    if not linalg.contains(e_space, x_space, tol=1e-8):
        raise ValueError("the top subspace must lie inside the enclosing space")

    # orthonormal basis of X adapted to the chain, plus the tier of each vector
    cols = []
    tier_sizes = []
    acc = None
    for s in nested:
        fresh = []
        for j in range(s.dim):
            r = s.basis[:, j].copy()
            if acc is not None:
                r -= acc @ (acc.T @ r)
            for q in fresh:
                r -= (q @ r) * q
            if acc is not None:
                r -= acc @ (acc.T @ r)
            nr = np.linalg.norm(r)
            if nr > 1e-10:
                fresh.append(r / nr)
        tier_sizes.append(len(fresh))
        cols.extend(fresh)
        acc = np.column_stack(cols)
    dim_x = x_space.dim
    if len(cols) != dim_x:
        raise ValueError("chain basis extension does not fill the top subspace")
    adapted = np.column_stack(cols)

    pool = linalg.intersect([linalg.complement(x_space), e_space])
    if pool.dim < dim_x:
        raise ValueError(
            f"need dim(X-perp within E) >= dim X = {dim_x}, have {pool.dim}")
    w = pool.basis[:, :dim_x]

    # exponent ladder: s(k) from beta_{k+1} = eta/4, then alternately the
    # largest halved beta_j preserving the lower tiers at s(j) and the
    # smallest s(j-1) killing tier j
    betas = [0.0] * (k + 2)  # 1-based; betas[k+1] = eta/4
    s_exp = [0] * (k + 1)    # 1-based
    betas[k + 1] = eta / 4.0
    s_exp[k] = max(a + 1, _min_exponent(betas[k + 1], eps))
    if s_exp[k] > s_cap:
        raise ExponentCapExceeded(
            f"tier {k} needs exponent {s_exp[k]:.3e} beyond the cap {s_cap:.3e}; "
            "larger eps or eta keeps the ladder desk-scale", stage=k, required=s_exp[k])
    for j in range(k, 0, -1):
        beta = betas[j + 1]
        for _ in range(200):
            beta /= 2.0
            if -math.expm1(-s_exp[j] * math.log1p(beta * beta)) < eps:
                break
        else:
            raise ValueError(f"no tier weight small enough at tier {j}")
        betas[j] = beta
        if j > 1:
            s_exp[j - 1] = max(s_exp[j] + 1, _min_exponent(beta, eps))
            if s_exp[j - 1] > s_cap:
                raise ExponentCapExceeded(
                    f"tier {j - 1} needs exponent {s_exp[j - 1]:.3e} beyond the cap "
                    f"{s_cap:.3e}; larger eps or eta keeps the ladder desk-scale",
                    stage=j - 1, required=s_exp[j - 1])

    gammas = np.concatenate([
        np.full(size, betas[t + 1]) for t, size in enumerate(tier_sizes)])
    y_cols = (adapted + w * gammas) / np.sqrt(1.0 + gammas**2)
    y_space = linalg.Subspace(n, y_cols)

    p_x = linalg.projection_matrix(x_space)
    p_y = linalg.projection_matrix(y_space)
    sandwich = p_x @ p_y @ p_x

    eta_achieved = linalg.operator_norm(p_x - p_y)
    if eta_achieved >= eta:
        raise ArithmeticError(f"||P_X - P_Y|| = {eta_achieved:.6g} did not stay below {eta:.6g}")
    if linalg.intersect([x_space, y_space], tol=1e-12).dim != 0:
        raise ArithmeticError("tilted subspace unexpectedly intersects the original")

    # diagonal action: the sandwich scales each adapted direction by 1/(1+gamma^2)
    expected = adapted / (1.0 + gammas**2)
    diag_err = float(np.max(np.linalg.norm(sandwich @ adapted - expected, axis=0)))
    if diag_err > 1e-10:
        raise ArithmeticError(f"diagonal action off by {diag_err:.3e}")

    for j in range(1, k + 1):
        p_xj = linalg.projection_matrix(chain[j - 1])
        # binding check in exact scalar arithmetic: the eigenvalue with the
        # least decay among killed tiers and the most decay among kept ones
        kept = -math.expm1(-s_exp[j] * math.log1p(betas[j] ** 2))
        killed = math.exp(-s_exp[j] * math.log1p(betas[j + 1] ** 2))
        if max(kept, killed) >= eps:
            raise ArithmeticError(
                f"tier {j}: ||sandwich^s - P_Xj|| = {max(kept, killed):.6g} "
                f"did not stay below eps = {eps:.6g}")
        # matrix channel: dense power while the exponent noise allows it,
        # the verified diagonal structure beyond; minimal-integer exponents
        # can leave margins below matrix measurement precision, hence slack
        if s_exp[j] <= _DIRECT_POWER_LIMIT:
            observed = linalg.operator_norm(_sym_power(sandwich, s_exp[j]) - p_xj)
        else:
            observed = linalg.operator_norm(
                (adapted * np.exp(-s_exp[j] * np.log1p(gammas**2))) @ adapted.T - p_xj)
        if observed >= eps + _MATRIX_CHANNEL_SLACK:
            raise ArithmeticError(
                f"tier {j}: matrix-channel norm {observed:.6g} disagrees with the "
                f"scalar bound {max(kept, killed):.6g} < {eps:.6g}")
    return y_space, s_exp[1:], betas[1:]


@dataclass(eq=False)
class TripleResult:
    """Two nearly parallel subspaces X, Y plus the plane W = span{u, v} and a
    word psi over {W, X, Y} carrying u to within 3*eps of v."""

    W: linalg.Subspace
    X: linalg.Subspace
    Y: linalg.Subspace
    psi: Word
    eta_achieved: float
    achieved_error: float
    s: list
    betas: list
    quarter: QuarterCircleResult = field(repr=False, default=None)


def build_triple(e_space, x_space, u, v, eps, eta, alpha0=0.5,
                 r_cap=DEFAULT_R_CAP, s_cap=DEFAULT_S_CAP, _quarter=None):
    """Compose the rotation word with the chain replacement.

    Runs ``quarter_circle`` at accuracy ``eps``, then ``replace_projection``
    at accuracy eps/|phi|, and substitutes each chain letter b_j of phi by
    the sandwich block (a2 a3 a2)^s(j) to obtain psi over the three letters
    {a1 = W, a2 = X, a3 = Y}.
    """
    qc = _quarter if _quarter is not None else quarter_circle(
        x_space, u, v, eps, alpha0=alpha0, r_cap=r_cap)
    sub_eps = eps / qc.phi.length
    y_space, s_exp, betas = replace_projection(
        qc.chain, x_space, e_space, sub_eps, eta, a=1, s_cap=s_cap)

    block = Word.from_letters(3, [2, 3, 2])
    mapping = {1: 1}
    for j in range(1, qc.k + 1):
        mapping[j + 1] = Word.group(block, s_exp[j - 1])
    psi = qc.phi.substitute(mapping, alphabet=3)

    u = linalg.as_vector(u, dim=x_space.ambient_dim)
    v = linalg.as_vector(v, dim=x_space.ambient_dim)
    w_plane = linalg.orthonormalize([u, v], ambient_dim=x_space.ambient_dim)
    p_w = linalg.projection_matrix(w_plane)
    p_x = linalg.projection_matrix(x_space)
    p_y = linalg.projection_matrix(y_space)
    eta_achieved = linalg.operator_norm(p_x - p_y)

    sandwich = p_x @ p_y @ p_x
    current = u.copy()
    for j in range(1, qc.k + 1):
        b_j = _sym_power(sandwich, s_exp[j - 1])
        group = b_j @ p_w @ b_j
        current = _sym_power(group, qc.r[j - 1]) @ current
    achieved = float(np.linalg.norm(current - v))
    if achieved >= 3.0 * eps:
        raise ArithmeticError(f"triple word error {achieved:.6g} did not meet 3*eps = {3 * eps:.6g}")
    return TripleResult(W=w_plane, X=x_space, Y=y_space, psi=psi,
                        eta_achieved=eta_achieved, achieved_error=achieved,
                        s=list(s_exp), betas=list(betas), quarter=qc)


@dataclass(eq=False)
class GluedConstruction:
    """Three subspaces plus one finite schedule traversing an orthonormal set.

    ``words[i]`` moves the iterate from near e_i to near e_{i+1};
    ``checkpoints[i]`` is the 1-based step count after word i has been fully
    applied; ``achieved[i]`` is the measured ||word_i(...) e_i - e_{i+1}||.
    """

    ambient_dim: int
    K: int
    epsilons: list
    M1: linalg.Subspace
    M2: linalg.Subspace
    M3: linalg.Subspace
    e: list
    words: list
    schedule: Schedule
    checkpoints: list
    achieved: list
    checkpoint_states: list
    non_cauchy_gap: float
    triples: list = field(repr=False, default=None)
    caveat: str = FINITE_DIM_CAVEAT


def _blocks_for(K, k_values):
    """Coordinate layout: e_1..e_{K+1} first, then one slab per triple."""
    slabs = [2 * (k + 2) - 2 for k in k_values]  # X_i fill + tilt room
    total = (K + 1) + sum(slabs)
    offsets = np.cumsum([K + 1] + slabs[:-1])
    return slabs, offsets, int(total)


def glue(K, epsilons, seed=0, r_cap=DEFAULT_R_CAP, s_cap=DEFAULT_S_CAP):
    """Chain K triples into three subspaces and one schedule.

    Preconditions: K >= 2 and sum(4 eps_i) < 1/2 (the budget that keeps the
    checkpoint iterates near the orthonormal e_i), and every eps_i large
    enough that the per-triple power searches stay under the caps.  Exceeding
    a cap raises ``ExponentCapExceeded`` tagged with the offending triple;
    that is the expected outcome for small eps, because the required word
    lengths grow beyond desk scale (that growth is the mechanism that defeats
    norm convergence in infinite dimension).
    """
    epsilons = [float(e) for e in epsilons]
    if K < 2:
        raise ValueError("glue needs K >= 2")
    if len(epsilons) != K:
        raise ValueError(f"expected {K} accuracy budgets, got {len(epsilons)}")
    if any(e <= 0 for e in epsilons):
        raise ValueError("accuracy budgets must be positive")
    budget = 4.0 * sum(epsilons)
    if budget >= 0.5:
        raise BudgetExceeded(
            f"sum(4 eps_i) = {budget:.6g} must stay below 1/2 for the checkpoint "
            "iterates to stay near the orthonormal targets")

    k_values = [k_of_eps(e) for e in epsilons]
    slabs, offsets, total = _blocks_for(K, k_values)
    rng = np.random.default_rng(seed)

    basis_e = [np.eye(total)[:, i] for i in range(K + 1)]
    x_spaces = []
    e_spaces = []
    for i in range(K):
        off, slab = int(offsets[i]), slabs[i]
        # seeded rotation inside the slab: X_i gets the first k_i directions
        q = linalg.random_subspace(rng, slab, slab).basis
        slab_cols = []
        for c in range(slab):
            col = np.zeros(total)
            col[off:off + slab] = q[:, c]
            slab_cols.append(col)
        x_cols = [basis_e[i], basis_e[i + 1]] + slab_cols[:k_values[i]]
        e_cols = x_cols + slab_cols[k_values[i]:]
        x_spaces.append(linalg.Subspace(total, np.column_stack(x_cols)))
        e_spaces.append(linalg.Subspace(total, np.column_stack(e_cols)))

    # first pass: rotation words (fixes N_i = |phi_1| needed for the eta ladder)
    quarters = []
    for i in range(K):
        try:
            quarters.append(quarter_circle(x_spaces[i], basis_e[i], basis_e[i + 1],
                                           epsilons[i], r_cap=r_cap))
        except ExponentCapExceeded as exc:
            raise ExponentCapExceeded(
                f"triple {i + 1} (eps = {epsilons[i]:.6g}): {exc}",
                stage=exc.stage, triple=i + 1, required=exc.required) from None

    deltas = [epsilons[i] / quarters[i].phi.letter_count(1) for i in range(K)]
    etas = []
    for i in range(K):
        left = 1.0 if i == 0 else deltas[i - 1]
        right = math.inf if i == K - 1 else deltas[i + 1]
        etas.append(min(left, right))

    triples = []
    for i in range(K):
        try:
            triples.append(build_triple(e_spaces[i], x_spaces[i], basis_e[i],
                                        basis_e[i + 1], epsilons[i], etas[i],
                                        r_cap=r_cap, s_cap=s_cap,
                                        _quarter=quarters[i]))
        except ExponentCapExceeded as exc:
            raise ExponentCapExceeded(
                f"triple {i + 1} (eps = {epsilons[i]:.6g}): {exc}",
                stage=exc.stage, triple=i + 1, required=exc.required) from None

    return assemble(triples, [basis_e[i] for i in range(K + 1)], epsilons)


def assemble(triples, e_vectors, epsilons):
    """Glue prebuilt triples into the three subspaces, words and schedule.

    Triple i's tilt subspace Y_i joins M2 when i is even (1-based: triples
    1, 3, ... are odd) -- the grouping alternates so that the two tilts
    adjacent to triple i live together in the subspace that stands in for
    its plane W_i.  The line spanned by e_1 seeds the group that covers
    triple 1's plane.
    """
    K = len(triples)
    if K < 2:
        raise ValueError("need at least two triples")
    n = triples[0].X.ambient_dim
    # group A = tilts of even-numbered triples, group B = odd-numbered ones;
    # the end lines span{e_1} and span{e_{K+1}} seed the groups that stand in
    # for the first and last planes (a finite chain has no outer neighbours
    # to supply those directions)
    group_a = [linalg.orthonormalize([e_vectors[0]], ambient_dim=n)]
    group_b = []
    for i, t in enumerate(triples, start=1):
        (group_a if i % 2 == 0 else group_b).append(t.Y)
    terminal = linalg.orthonormalize([e_vectors[K]], ambient_dim=n)
    ((group_a if (K + 1) % 2 == 0 else group_b)).append(terminal)

    def union(spaces):
        cols = []
        for s in spaces:
            cols.extend(s.basis[:, j] for j in range(s.dim))
        return linalg.orthonormalize(cols, ambient_dim=n)

    m1 = union([t.X for t in triples])
    m2 = union(group_a)
    m3 = union(group_b)

    # per-triple letter map {W, X, Y_i} -> global {1 = M1, 2 = M2, 3 = M3}:
    # the tilt letter goes to its own group, the plane letter to the other
    words = []
    for i, t in enumerate(triples, start=1):
        if i % 2 == 0:
            mapping = {1: 3, 2: 1, 3: 2}   # W -> M3, X -> M1, Y_i -> M2
        else:
            mapping = {1: 2, 2: 1, 3: 3}   # W -> M2, X -> M1, Y_i -> M3
        words.append(t.psi.substitute(mapping, alphabet=3))

    full = words[0]
    for w in words[1:]:
        full = w * full  # later words act after earlier ones
    schedule = Schedule.from_word(full, J=3)

    checkpoints = []
    total = 0
    for w in words:
        total += w.length
        checkpoints.append(total)

    projections = [linalg.projection_matrix(m1), linalg.projection_matrix(m2),
                   linalg.projection_matrix(m3)]
    achieved = []
    states = []
    state = e_vectors[0].astype(float, copy=True)
    for i, w in enumerate(words):
        moved = _evaluate_word(w, projections, state)
        achieved.append(float(np.linalg.norm(_evaluate_word(w, projections,
                                                            e_vectors[i]) - e_vectors[i + 1])))
        state = moved
        states.append(state.copy())
        if achieved[-1] >= 4.0 * epsilons[i]:
            raise ArithmeticError(
                f"glued word {i + 1} error {achieved[-1]:.6g} did not stay below "
                f"4*eps = {4 * epsilons[i]:.6g}")
    gap = float(np.linalg.norm(states[0] - states[1])) if len(states) >= 2 else 0.0

    return GluedConstruction(
        ambient_dim=n, K=K, epsilons=list(epsilons), M1=m1, M2=m2, M3=m3,
        e=[np.asarray(e, dtype=float) for e in e_vectors], words=words,
        schedule=schedule, checkpoints=checkpoints, achieved=achieved,
        checkpoint_states=states, non_cauchy_gap=gap, triples=triples)


def _evaluate_word(word, projections, x):
    """Apply a word of projection letters using eigensystem powers per group."""
    y = np.asarray(x, dtype=float).copy()
    for item, exp in reversed(word.factors):
        if not isinstance(item, Word):
            y = projections[item - 1] @ y  # projections are idempotent
        elif exp == 1:
            y = _evaluate_word(item, projections, y)
        else:
            base = item.matrix(projections)
            if np.allclose(base, base.T, atol=1e-12):
                y = _sym_power(base, exp) @ y
            else:
                y = np.linalg.matrix_power(base, exp) @ y
    return y


def sakai_blowup(construction, step_cap=10**6):
    """Empirical increment-sum constant along the construction's schedule.

    Runs the full finite schedule from x_0 = e_1 with stored iterates and
    returns ``iteration.sakai_constant`` of the trace.  Refuses schedules too
    long to store (the same growth that defeats the caps defeats stepping).
    """
    from . import iteration

    if construction.K < 2:
        raise ValueError("need a construction with K >= 2")
    length = construction.schedule.finite_length
    if length > step_cap:
        raise ExponentCapExceeded(
            f"schedule of length {length:.3e} is too long to run step by step",
            required=length)
    cfg = iteration.RunConfig(max_steps=int(length), stop_tol=1e-300, window_len=5)
    trace = iteration.run([construction.M1, construction.M2, construction.M3],
                          construction.schedule, construction.e[0], cfg,
                          reference=None, store_iterates=True)
    return iteration.sakai_constant(trace)
