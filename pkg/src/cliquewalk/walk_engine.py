"""Exact k-step transition probabilities of the clique walk, three ways.

Routes: a Chebyshev-style matrix polynomial, a three-term matrix
recurrence, and an exact lifted Markov chain on (vertex, clique) pairs.
A brute-force weighted-walk enumerator serves as the independent oracle at
desk scale, plus Monte-Carlo simulation and an empirical mixing-rate
estimator.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import (
    EpsilonAtSimpleWalk,
    InvalidParams,
    TooLarge,
    Underflow,
)
from .graph_core import CliqueRegularGraph, edge_key, incidence_matrix, max_vertex_cap
from .mixing_theory import delta_from_epsilon
from .spectrum import eigenvalues_symmetric

BRUTE_FORCE_MAX_N = 30
BRUTE_FORCE_MAX_K = 6
MC_BLOCK = 1 << 15
_RENORM = 1e200
_LOG_RENORM = math.log(_RENORM)


def chebyshev_U(k: int, x: float) -> float:
    """Second-kind Chebyshev value U_k(x) by the three-term recurrence."""
    if k < -1:
        raise InvalidParams("need k >= -1")
    if k == -1:
        return 0.0
    prev, cur = 0.0, 1.0  # U_{-1}, U_0
    for _ in range(k):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def _qk_coefficients(d: int, l: int, delta: float):
    """q_k(x) = sb*U_k(x) + c2*U_{k-1}(x) - c3*U_{k-2}(x)."""
    base = (l - 1) * (1.0 - delta) * (d - 1 + delta)
    sb = math.sqrt(base)
    c2 = (l - 2) * (1.0 - delta)
    c3 = (1.0 - delta) * math.sqrt((l - 1) * (1.0 - delta)) / math.sqrt(d - 1 + delta)
    return sb, c2, c3


def _check_qk_params(d: int, l: int, delta) -> None:
    if not 0.0 <= float(delta) < 1.0:
        raise InvalidParams(f"need 0 <= delta < 1, got {delta}")
    if d < 2 or l < 2:
        raise InvalidParams("need d >= 2 and l >= 2")


def _auto_prec_bits(y, d: int, l: int, delta: float, k: int) -> int:
    """Bits needed to keep the decaying solution of the recurrence resolved.

    The three-term recurrence loses the decaying solution to roundoff once
    the dominant one has grown past the working precision, which is fatal
    exactly at the exceptional point of the l(1-delta) > d regime.  Away
    from that regime (or for small k) float64 is fine.
    """
    yf = float(y)
    if l * (1.0 - float(delta)) <= d or yf >= -1.0 or k <= 32:
        return 0
    z = abs(yf) + math.sqrt(yf * yf - 1.0)
    return int(2.2 * k * math.log2(z)) + 96


def _float_q_pair(y: float, d: int, l: int, delta: float, k_max: int):
    """Yield (k, log|q_k|, sign) for k = 1..k_max using renormalized floats."""
    sb, c2, c3 = _qk_coefficients(d, l, delta)
    q1 = 2.0 * y * sb + c2
    q2 = sb * (4.0 * y * y - 1.0) + 2.0 * y * c2 - c3
    offset = 0.0

    def emit(k, v):
        if v == 0.0:
            return k, -math.inf, 0
        return k, offset + math.log(abs(v)), (1 if v > 0 else -1)

    yield emit(1, q1)
    if k_max == 1:
        return
    yield emit(2, q2)
    prev, cur = q1, q2
    for k in range(3, k_max + 1):
        prev, cur = cur, 2.0 * y * cur - prev
        m = max(abs(prev), abs(cur))
        if m > _RENORM:
            prev /= _RENORM
            cur /= _RENORM
            offset += _LOG_RENORM
        elif 0.0 < m < 1.0 / _RENORM:
            prev *= _RENORM
            cur *= _RENORM
            offset -= _LOG_RENORM
        yield emit(k, cur)


def _mp_log_abs(x) -> float:
    if x == 0:
        return -math.inf
    m, e = mpmath.frexp(x)
    return math.log(abs(float(m))) + e * math.log(2.0)


def _mp_q_pair(y, d: int, l: int, delta: float, k_max: int, bits: int):
    """High-precision variant of the same recurrence (mpf exponents are unbounded)."""
    with mpmath.workprec(bits):
        ym = mpmath.mpf(y)
        one = mpmath.mpf(1)
        dm, lm, deltam = mpmath.mpf(d), mpmath.mpf(l), mpmath.mpf(delta)
        base = (lm - 1) * (one - deltam) * (dm - 1 + deltam)
        sb = mpmath.sqrt(base)
        c2 = (lm - 2) * (one - deltam)
        c3 = (one - deltam) * mpmath.sqrt((lm - 1) * (one - deltam)) / mpmath.sqrt(dm - 1 + deltam)
        q1 = 2 * ym * sb + c2
        q2 = sb * (4 * ym * ym - 1) + 2 * ym * c2 - c3
        yield 1, _mp_log_abs(q1), int(mpmath.sign(q1))
        if k_max == 1:
            return
        yield 2, _mp_log_abs(q2), int(mpmath.sign(q2))
        prev, cur = q1, q2
        two_y = 2 * ym
        for k in range(3, k_max + 1):
            prev, cur = cur, two_y * cur - prev
            yield k, _mp_log_abs(cur), int(mpmath.sign(cur))


def _qk_stream(y, d: int, l: int, delta: float, k_max: int, prec_bits: int | None):
    bits = _auto_prec_bits(y, d, l, delta, k_max) if prec_bits is None else prec_bits
    if bits:
        return _mp_q_pair(y, d, l, delta, k_max, bits)
    return _float_q_pair(float(y), d, l, float(delta), k_max)


def qk_scalar(k: int, y, d: int, l: int, delta: float,
              prec_bits: int | None = None) -> tuple[float, int]:
    """(log|q_k(y)|, sign) evaluated stably for large k.

    The recurrence q_{k+1} = 2y q_k - q_{k-1} is carried with periodic
    renormalization and a separately accumulated exponent; near the
    decaying point of the l(1-delta) > d regime it switches to a
    high-precision path automatically (pass prec_bits to force either).
    """
    _check_qk_params(d, l, delta)
    if k < 1:
        raise InvalidParams("need k >= 1")
    out = None
    for kk, logabs, sign in _qk_stream(y, d, l, delta, k, prec_bits):
        if kk == k:
            out = (logabs, sign)
    return out


def qk_empirical_growth(y, d: int, l: int, delta: float, k_max: int,
                        prec_bits: int | None = None) -> float:
    """max over k in [k_max/2, k_max] of |q_k(y)|^(1/k).

    A running-max envelope against sign oscillation; approximates the
    limsup growth rate of the recurrence.
    """
    _check_qk_params(d, l, delta)
    if k_max < 200:
        raise InvalidParams("need k_max >= 200")
    k_lo = k_max // 2
    best = 0.0
    for k, logabs, _sign in _qk_stream(y, d, l, delta, k_max, prec_bits):
        if k >= k_lo and logabs != -math.inf:
            best = max(best, math.exp(logabs / k))
    return best


# --- matrix routes ----------------------------------------------------------

@dataclass
class MatrixSequence:
    """R^(k) for k = 1..k_max; R^(1) is the adjacency matrix."""

    matrices: list
    d: int
    l: int
    delta: object
    exact: bool = False

    def __getitem__(self, k: int):
        if not 1 <= k <= len(self.matrices):
            raise IndexError(f"k = {k} outside 1..{len(self.matrices)}")
        return self.matrices[k - 1]


def _check_cap(crg: CliqueRegularGraph) -> None:
    cap = max_vertex_cap()
    if crg.n > cap:
        raise TooLarge(f"graph has {crg.n} vertices; cap is {cap}")


def Rk_recurrence(crg: CliqueRegularGraph, delta, k_max: int,
                  exact: bool = False) -> MatrixSequence:
    """Weighted 2k-step walk-count matrices by the three-term recurrence.

    With exact=True all arithmetic is done in Fractions (delta may be a
    Fraction), which is what the brute-force oracle is compared against.
    Valid for delta in [0, 1]; delta = 1 reduces to plain walk counts.
    """
    _check_cap(crg)
    if k_max < 1:
        raise InvalidParams("need k_max >= 1")
    d, l, n = crg.d, crg.l, crg.n
    if exact:
        dl = Fraction(delta)
        if not 0 <= dl <= 1:
            raise InvalidParams(f"need 0 <= delta <= 1, got {delta}")
        a = np.array(crg.graph.adjacency_matrix(np.int64).tolist(), dtype=object)
        eye = np.array(np.eye(n, dtype=np.int64).tolist(), dtype=object)
        c = (l - 2) * (1 - dl)
        b0 = (l - 1) * (1 - dl) * (d - 1 + dl)
        d2 = d * (l - 1) * (1 - dl)
        mats = [a]
        if k_max >= 2:
            mats.append(a.dot(a) - c * a - d2 * eye)
        for _ in range(3, k_max + 1):
            mats.append(mats[-1].dot(a) - c * mats[-1] - b0 * mats[-2])
        return MatrixSequence(mats, d, l, dl, exact=True)

    dl = float(delta)
    if not 0.0 <= dl <= 1.0:
        raise InvalidParams(f"need 0 <= delta <= 1, got {delta}")
    a = crg.graph.adjacency_matrix(dtype=float)
    eye = np.eye(n)
    c = (l - 2) * (1.0 - dl)
    b0 = (l - 1) * (1.0 - dl) * (d - 1 + dl)
    d2 = d * (l - 1) * (1.0 - dl)
    mats = [a]
    if k_max >= 2:
        mats.append(a @ a - c * a - d2 * eye)
    for _ in range(3, k_max + 1):
        mats.append(mats[-1] @ a - c * mats[-1] - b0 * mats[-2])
    return MatrixSequence(mats, d, l, dl)


def Qk_matrix(crg: CliqueRegularGraph, delta: float, k: int) -> np.ndarray:
    """The closed Chebyshev-combination route to R^(k).

    Runs the U-recurrence on the shifted and scaled adjacency matrix and
    combines the last three terms.  Needs delta < 1 (the scaling
    degenerates at the simple-walk point; use Rk_recurrence there).
    """
    _check_cap(crg)
    if k < 1:
        raise InvalidParams("need k >= 1")
    if not 0.0 <= delta < 1.0 - 1e-12:
        raise InvalidParams("need 0 <= delta < 1; use Rk_recurrence at delta = 1")
    d, l, n = crg.d, crg.l, crg.n
    sb, c2, c3 = _qk_coefficients(d, l, delta)
    a = crg.graph.adjacency_matrix(dtype=float)
    x = (a - c2 * np.eye(n)) / (2.0 * sb)
    u_before = None             # U_{j-2}
    u_prev = np.zeros((n, n))   # U_{j-1}
    u_cur = np.eye(n)           # U_j, starting at j = 0
    for _ in range(k):
        u_before = u_prev
        u_prev, u_cur = u_cur, 2.0 * (x @ u_cur) - u_prev
    q = sb * u_cur + c2 * u_prev - c3 * u_before
    return (sb ** (k - 1)) * q


def transition_matrices(crg: CliqueRegularGraph, eps: float, k_max: int) -> list[np.ndarray]:
    """P^(k) = R^(k) / (d(l-1) ((d-1+delta)(l-1))^(k-1)) for k = 1..k_max.

    Carried in pre-scaled form so entries stay O(1) for any k.  Valid for
    eps in [0, 1/d); the boundary is the plain simple walk.
    """
    _check_cap(crg)
    d, l, n = crg.d, crg.l, crg.n
    if eps >= 1.0 / d - 1e-12:
        raise EpsilonAtSimpleWalk("eps = 1/d is the simple walk; use simple_walk_matrix")
    delta = delta_from_epsilon(eps, d)
    deg = d * (l - 1)
    s = (d - 1 + delta) * (l - 1)
    c = (l - 2) * (1.0 - delta)
    beta = (1.0 - delta) / s
    a = crg.graph.adjacency_matrix(dtype=float)
    eye = np.eye(n)
    out = [a / deg]
    if k_max >= 2:
        out.append((a @ a - c * a - deg * (1.0 - delta) * eye) / (deg * s))
    shifted = a - c * eye
    for _ in range(3, k_max + 1):
        out.append((out[-1] @ shifted) / s - beta * out[-2])
    return out


def transition_matrix(crg: CliqueRegularGraph, eps: float, k: int) -> np.ndarray:
    p = transition_matrices(crg, eps, k)[-1]
    return np.clip(p, 0.0, None)


def simple_walk_matrix(crg: CliqueRegularGraph, k: int) -> np.ndarray:
    """k-step law of the uniform nearest-neighbor walk (the eps = 1/d case)."""
    _check_cap(crg)
    p1 = crg.graph.adjacency_matrix(dtype=float) / crg.degree
    return np.linalg.matrix_power(p1, k)


def mu_ik(lambda_i: float, k: int, d: int, l: int, delta: float) -> float:
    """Eigenvalue of P^(k) attached to an adjacency eigenvalue lambda_i."""
    if k < 1:
        raise InvalidParams("need k >= 1")
    deg = d * (l - 1)
    if delta > 1.0 - 1e-12:
        return (lambda_i / deg) ** k
    sb, c2, _ = _qk_coefficients(d, l, delta)
    y = (lambda_i - c2) / (2.0 * sb)
    logq, sign = qk_scalar(k, y, d, l, delta)
    if sign == 0:
        return 0.0
    beta = (1.0 - delta) / ((d - 1 + delta) * (l - 1))
    return sign * math.exp(logq + 0.5 * (k - 1) * math.log(beta) - math.log(deg))


# --- lifted chain -----------------------------------------------------------

@dataclass
class LiftedChain:
    """Markov chain on (vertex, clique-of-last-edge) incidence pairs."""

    crg: CliqueRegularGraph
    eps: float
    states: list[tuple[int, int]]
    index: dict
    state_vertex: np.ndarray
    transition: np.ndarray
    initial_kernel: np.ndarray
    in_succ: np.ndarray
    out_succ: np.ndarray


def build_lifted_chain(crg: CliqueRegularGraph, eps: float) -> LiftedChain:
    """Exact chain realizing the walk; n*d states, rows sum to one.

    From (v, K) a share eps spreads uniformly over the l-1 moves inside K
    and a share 1-eps over the (d-1)(l-1) moves out of K.  At eps = 1/d
    every neighbor gets weight 1/(d(l-1)), the uniform walk.
    """
    _check_cap(crg)
    d, l = crg.d, crg.l
    if d < 2:
        raise InvalidParams("lifted chain needs d >= 2")
    if not 0.0 <= eps <= 1.0 / d + 1e-15:
        raise InvalidParams(f"eps must lie in [0, 1/{d}]")
    cliques = crg.partition.cliques
    vtc = crg.partition.vertex_to_cliques

    states: list[tuple[int, int]] = []
    index: dict = {}
    for v in range(crg.n):
        for ci in vtc[v]:
            index[(v, ci)] = len(states)
            states.append((v, ci))
    size = len(states)

    p_in = eps / (l - 1)
    p_out = (1.0 - eps) / ((d - 1) * (l - 1))
    t = np.zeros((size, size))
    in_succ = np.zeros((size, l - 1), dtype=np.int64)
    out_succ = np.zeros((size, (d - 1) * (l - 1)), dtype=np.int64)
    for sid, (v, ci) in enumerate(states):
        col = 0
        for w in cliques[ci]:
            if w == v:
                continue
            tid = index[(w, ci)]
            t[sid, tid] += p_in
            in_succ[sid, col] = tid
            col += 1
        col = 0
        for cj in vtc[v]:
            if cj == ci:
                continue
            for w in cliques[cj]:
                if w == v:
                    continue
                tid = index[(w, cj)]
                t[sid, tid] += p_out
                out_succ[sid, col] = tid
                col += 1

    init = np.zeros((crg.n, size))
    first = 1.0 / (d * (l - 1))
    for u in range(crg.n):
        for w in crg.graph.adj[u]:
            ci = crg.edge_to_clique[edge_key(u, w)]
            init[u, index[(w, ci)]] += first

    return LiftedChain(
        crg=crg,
        eps=eps,
        states=states,
        index=index,
        state_vertex=np.array([v for v, _ in states], dtype=np.int64),
        transition=t,
        initial_kernel=init,
        in_succ=in_succ,
        out_succ=out_succ,
    )


def _vertex_marginal_matrix(chain: LiftedChain) -> np.ndarray:
    m = np.zeros((len(chain.states), chain.crg.n))
    m[np.arange(len(chain.states)), chain.state_vertex] = 1.0
    return m


def lifted_k_step(chain: LiftedChain, start_vertex: int, k: int) -> np.ndarray:
    """Exact law of the walk's position after k steps from start_vertex."""
    if k < 1:
        raise InvalidParams("need k >= 1")
    dist = chain.initial_kernel[start_vertex].copy()
    for _ in range(k - 1):
        dist = dist @ chain.transition
    out = np.zeros(chain.crg.n)
    np.add.at(out, chain.state_vertex, dist)
    return out


# --- brute-force oracle ------------------------------------------------------

def weighted_walk_counts(crg: CliqueRegularGraph, k: int) -> np.ndarray:
    """counts[m, u, v]: admissible k-step walks u -> v staying m times.

    Full exponential enumeration over the incidence walk x0 -> K0 -> x1 ->
    ... -> x_k with x_{i+1} != x_i; m counts the indices with K_i =
    K_{i-1}.  Deliberately the dumbest possible route.
    """
    if crg.n > BRUTE_FORCE_MAX_N or k > BRUTE_FORCE_MAX_K:
        raise TooLarge(
            f"brute force capped at n <= {BRUTE_FORCE_MAX_N}, k <= {BRUTE_FORCE_MAX_K}"
        )
    if k < 1:
        raise InvalidParams("need k >= 1")
    cliques = crg.partition.cliques
    vtc = crg.partition.vertex_to_cliques
    counts = np.zeros((k, crg.n, crg.n), dtype=np.int64)

    def rec(u: int, v: int, last_ci: int, m: int, depth: int):
        if depth == k:
            counts[m, u, v] += 1
            return
        for ci in vtc[v]:
            m2 = m + 1 if ci == last_ci else m
            for w in cliques[ci]:
                if w != v:
                    rec(u, w, ci, m2, depth + 1)

    for u in range(crg.n):
        for ci in vtc[u]:
            for w in cliques[ci]:
                if w != u:
                    rec(u, w, ci, 0, 1)
    return counts


def brute_force_weighted_walks(crg: CliqueRegularGraph, delta, k: int) -> np.ndarray:
    """Sum of delta^m over admissible walks, entrywise; equals R^(k).

    Exact (object dtype) when delta is a Fraction or int, float otherwise.
    """
    counts = weighted_walk_counts(crg, k)
    exact = isinstance(delta, (Fraction, int))
    if exact:
        total = np.zeros((crg.n, crg.n), dtype=object)
        for m in range(k):
            total = total + counts[m].astype(object) * (Fraction(delta) ** m)
        return total
    total = np.zeros((crg.n, crg.n))
    for m in range(k):
        total += counts[m] * (float(delta) ** m)
    return total


# --- Monte Carlo -------------------------------------------------------------

@dataclass
class MonteCarloResult:
    counts: np.ndarray
    dist: np.ndarray
    stderr: np.ndarray
    trials: int
    seed: int
    start: int
    k: int

    def as_dict(self) -> dict:
        return {
            "counts": self.counts.tolist(),
            "dist": self.dist.tolist(),
            "stderr": self.stderr.tolist(),
            "trials": self.trials,
            "seed": self.seed,
            "start": self.start,
            "k": self.k,
        }


def monte_carlo(crg: CliqueRegularGraph, eps: float, start: int, k: int,
                trials: int, seed: int, workers: int = 1) -> MonteCarloResult:
    """Empirical law of the walk's position after k steps.

    Trials are split into fixed blocks, block b seeded from (seed, b), so
    the merged counts depend only on (seed, trials) and never on how many
    workers ran them.
    """
    if trials < 1:
        raise InvalidParams("need trials >= 1")
    if k < 1:
        raise InvalidParams("need k >= 1")
    chain = build_lifted_chain(crg, eps)
    d, l, n = crg.d, crg.l, crg.n
    init_states = np.array(
        [
            chain.index[(w, crg.edge_to_clique[edge_key(start, w)])]
            for w in crg.graph.adj[start]
        ],
        dtype=np.int64,
    )
    n_in = l - 1
    n_out = (d - 1) * (l - 1)

    def run_block(block_index: int, m: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence((seed, block_index)))
        states = init_states[rng.integers(0, len(init_states), size=m)]
        for _ in range(k - 1):
            stay = rng.random(m) < eps
            pick_in = rng.integers(0, n_in, size=m)
            pick_out = rng.integers(0, n_out, size=m)
            states = np.where(
                stay,
                chain.in_succ[states, pick_in],
                chain.out_succ[states, pick_out],
            )
        return np.bincount(chain.state_vertex[states], minlength=n)

    blocks = [
        (bi, min(MC_BLOCK, trials - bi * MC_BLOCK))
        for bi in range((trials + MC_BLOCK - 1) // MC_BLOCK)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: run_block(*b), blocks))
    else:
        results = [run_block(*b) for b in blocks]
    counts = np.sum(results, axis=0).astype(np.int64)
    dist = counts / trials
    stderr = np.sqrt(dist * (1.0 - dist) / trials)
    return MonteCarloResult(counts=counts, dist=dist, stderr=stderr,
                            trials=trials, seed=seed, start=start, k=k)


# --- empirical mixing rate ----------------------------------------------------

@dataclass
class RateEstimate:
    rate: float
    diagnostics: dict = field(default_factory=dict)


def _deflate_rows(m: np.ndarray) -> np.ndarray:
    """Project out the all-ones direction (exact row sums of P - J/n are zero).

    Without this, roundoff re-seeds the non-decaying stationary mode and
    floors the measurable distance near machine epsilon.
    """
    return m - m.mean(axis=1, keepdims=True)


def _minus_d_basis(crg: CliqueRegularGraph) -> np.ndarray | None:
    """Orthonormal basis of the eigenvalue -d eigenspace (the kernel of N^T).

    In the l(1-delta) > d regime the suppressed recurrence root of that
    eigenspace has modulus (1-delta)/(d-1+delta) >= the mixing rate, so
    roundoff seeded there decays too slowly and must be projected out; the
    mode's true component is strictly subdominant there and does not carry
    the rate.
    """
    nmat = incidence_matrix(crg).astype(float)
    u_svd, sing, _ = np.linalg.svd(nmat)
    rank = int(np.sum(sing > 1e-9 * max(1.0, float(sing[0]))))
    if rank >= crg.n:
        return None
    return u_svd[:, rank:]


def empirical_mixing_rate(crg: CliqueRegularGraph, eps: float, k_max: int,
                          window: int = 10) -> RateEstimate:
    """Decay rate of s_k = max_uv |P^(k)_uv - 1/n| from the exact evolution.

    Powers the deviation from uniform through the scaled transition
    recurrence (the uniform matrix is an exact fixed point), deflating the
    stationary direction each step and renormalizing in log scale, so s_k
    is tracked with full relative precision at any depth.  A running-max
    envelope over a sliding window absorbs sign oscillation; the log
    envelope is least-squares fitted over the back half of the range and
    exp(slope) returned.
    """
    if k_max < 50:
        raise InvalidParams("need k_max >= 50")
    _check_cap(crg)
    n = crg.n
    d, l = crg.d, crg.l
    deg = crg.degree
    a = crg.graph.adjacency_matrix(dtype=float)
    uniform = np.full((n, n), 1.0 / n)
    simple = eps >= 1.0 / d - 1e-12

    if simple:
        bker = None
    else:
        delta = delta_from_epsilon(eps, d)
        bker = _minus_d_basis(crg) if l * (1.0 - delta) > d else None

    def deflate(m: np.ndarray) -> np.ndarray:
        m = _deflate_rows(m)
        if bker is not None:
            m = m - (m @ bker) @ bker.T
        return m

    def log_peaks():
        offset = 0.0
        if simple:
            step_mat = a / deg
            cur = deflate(step_mat - uniform)
            while True:
                peak = float(np.max(np.abs(cur)))
                if peak <= 0.0:
                    return
                yield offset + math.log(peak)
                cur = deflate(cur @ step_mat)
                if float(np.max(np.abs(cur))) < 1e-150:
                    cur = cur * 1e150
                    offset -= 150.0 * math.log(10.0)
        else:
            s_norm = (d - 1 + delta) * (l - 1)
            c = (l - 2) * (1.0 - delta)
            beta = (1.0 - delta) / s_norm
            shifted = a - c * np.eye(n)
            prev = deflate(a / deg - uniform)
            cur = deflate(
                (a @ a - c * a - deg * (1.0 - delta) * np.eye(n)) / (deg * s_norm)
                - uniform
            )
            peak = float(np.max(np.abs(prev)))
            if peak <= 0.0:
                return
            yield math.log(peak)
            while True:
                peak = float(np.max(np.abs(cur)))
                if peak <= 0.0:
                    return
                yield offset + math.log(peak)
                prev, cur = cur, deflate((cur @ shifted) / s_norm - beta * prev)
                m = float(np.max(np.abs(cur)))
                if 0.0 < m < 1e-150:
                    cur = cur * 1e150
                    prev = prev * 1e150
                    offset -= 150.0 * math.log(10.0)

    log_s: list[float] = []
    for k, val in enumerate(log_peaks(), start=1):
        log_s.append(val)
        if k == k_max:
            break
    steps = len(log_s)
    if steps < 30:
        raise Underflow(f"distance vanished by k = {steps + 1}; nothing to fit")
    logs_all = np.array(log_s)

    env = np.array([logs_all[max(0, i - window + 1): i + 1].max() for i in range(steps)])
    k_lo = steps // 2
    ks = np.arange(k_lo, steps + 1)
    logs = env[k_lo - 1: steps]
    slope, intercept = np.polyfit(ks, logs, 1)
    resid = logs - (slope * ks + intercept)
    return RateEstimate(
        rate=float(math.exp(slope)),
        diagnostics={
            "slope": float(slope),
            "intercept": float(intercept),
            "max_abs_residual": float(np.max(np.abs(resid))),
            "fit_from": int(k_lo),
            "fit_to": int(steps),
            "k_max": int(k_max),
            "truncated": bool(steps < k_max),
            "window": int(window),
            "log_final_distance": float(logs_all[-1]),
        },
    )


# --- bundled verification -----------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    skipped: bool = False


@dataclass
class VerificationReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed or c.skipped for c in self.checks)


def run_verification(crg: CliqueRegularGraph, eps: float, k_max: int) -> VerificationReport:
    """Cross-route and oracle checks on one instance.

    Compares the recurrence against the Chebyshev route (relative 1e-8),
    the transition rows against the lifted chain (1e-10), the brute-force
    oracle when n <= 20 (1e-12, or exact in rationals at rational delta),
    spectral consistency of P^(k) (1e-8), and the sandwich inequality
    mu(k)/n <= max|P^(k) - 1/n| <= mu(k).
    """
    checks: list[CheckResult] = []
    delta = delta_from_epsilon(eps, crg.d)
    n = crg.n

    rk = Rk_recurrence(crg, delta, k_max)
    worst = 0.0
    for k in range(1, k_max + 1):
        qk = Qk_matrix(crg, delta, k)
        scale = max(np.max(np.abs(rk[k])), 1e-30)
        worst = max(worst, float(np.max(np.abs(rk[k] - qk)) / scale))
    checks.append(CheckResult(
        "recurrence vs Chebyshev route", worst <= 1e-8, f"max rel diff {worst:.3e}"))

    ps = transition_matrices(crg, eps, k_max)
    chain = build_lifted_chain(crg, eps)
    marg = _vertex_marginal_matrix(chain)
    dist = chain.initial_kernel.copy()
    worst = 0.0
    row_err = 0.0
    for k in range(1, k_max + 1):
        worst = max(worst, float(np.max(np.abs(ps[k - 1] - dist @ marg))))
        row_err = max(row_err, float(np.max(np.abs(ps[k - 1].sum(axis=1) - 1.0))))
        if k < k_max:
            dist = dist @ chain.transition
    checks.append(CheckResult(
        "transition rows vs lifted chain", worst <= 1e-10, f"max abs diff {worst:.3e}"))
    checks.append(CheckResult(
        "row sums equal one", row_err <= 1e-10, f"max |row sum - 1| {row_err:.3e}"))

    if n <= 20:
        kb = min(k_max, 5)
        bf = brute_force_weighted_walks(crg, delta, kb)
        diff = float(np.max(np.abs(rk[kb] - bf)))
        scale = max(float(np.max(np.abs(bf))), 1e-30)
        ok = diff / scale <= 1e-12
        checks.append(CheckResult(
            f"brute-force oracle at k = {kb}", ok, f"max rel diff {diff / scale:.3e}"))
    else:
        checks.append(CheckResult(
            "brute-force oracle", True, f"skipped: n = {n} > 20", skipped=True))

    spec = eigenvalues_symmetric(crg.graph.adjacency_matrix(dtype=float))
    mu_err = 0.0
    sandwich_ok = True
    for k in (max(1, k_max // 2), k_max):
        # spec.eigenvalues is sorted descending, so index 0 is the stationary mode
        mus = [mu_ik(lam, k, crg.d, crg.l, delta) for lam in spec.eigenvalues]
        pk_eigs = sorted(eigenvalues_symmetric(ps[k - 1]).eigenvalues)
        mu_err = max(mu_err, float(np.max(np.abs(np.array(sorted(mus)) - np.array(pk_eigs)))))
        mu_k = max(abs(m) for m in mus[1:])
        s_k = float(np.max(np.abs(ps[k - 1] - 1.0 / n)))
        if not (mu_k / n <= s_k + 1e-12 and s_k <= mu_k + 1e-12):
            sandwich_ok = False
    checks.append(CheckResult(
        "P^(k) spectrum matches scalar eigenvalues", mu_err <= 1e-8,
        f"max abs diff {mu_err:.3e}"))
    checks.append(CheckResult(
        "sandwich inequality mu(k)/n <= max|P-1/n| <= mu(k)", sandwich_ok, ""))

    return VerificationReport(checks)
