"""Exact kernel-driven walk simulation of the isotropic stable process.

Each walk step jumps directly to the exact exit position of the largest
admissible ball centred at the current point, sampled from the closed-form
exit law.  Two exact samplers drive everything:

* exit position from the centre of a ball: the squared overshoot
  W = R^2 - 1 of the exit radius follows a beta-prime(1 - a/2, a/2) law
  (dimension-free), the direction is uniform;
* occupation position (normalized Green density from the centre): latent
  representation  s ~ beta-prime(a/2, d/2),  R = U^{1/a} / sqrt(1 + s),
  which reproduces the radial density  ~ R^{a-1} J((1-R^2)/R^2)  exactly.

Reproducibility: every path owns a counter-based Philox stream keyed by
(seed, path index), so results are bit-identical for a fixed seed across
any worker count; reductions run over the path-ordered score array.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import GeometryViolation
from .fields import ScalarField
from .kernels import Ball, exit_time_constant

#: Stream/generator identity recorded in experiment reports.
RNG_IDENTITY = "philox4x64(numpy), key=(seed, path_index)"

#: Fraction of the distance to the allowed region's boundary used as the
#: walk-ball radius.  The full distance risks boundary-snapping pathologies
#: in the exit law; 0.99 keeps geometric convergence.
WALK_BALL_FACTOR = 0.99

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MCConfig:
    n_paths: int
    seed: int = 0
    max_steps_per_path: int = 10_000
    workers: int = 1

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if self.max_steps_per_path < 1:
            raise ValueError("max_steps_per_path must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n: int
    truncated_paths: int

    def __post_init__(self):
        if self.std_error < 0 or not (0 <= self.truncated_paths <= self.n):
            raise ValueError("inconsistent Monte Carlo estimate fields")


def path_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for one path."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class _PathStreams:
    """Reusable generator re-keyed per path.

    Philox construction costs ~20 us; resetting the key/counter on one
    shared bit generator costs ~1 us and yields streams bit-identical to
    path_rng(seed, index) (asserted in the test suite).
    """

    def __init__(self, seed: int):
        self._bg = np.random.Philox(key=[seed & _MASK64, 0])
        self.generator = np.random.Generator(self._bg)
        self._state = self._bg.state

    def rekey(self, index: int) -> np.random.Generator:
        st = self._state
        st["state"]["key"][1] = index & _MASK64
        st["state"]["counter"][:] = 0
        st["buffer_pos"] = 4
        self._bg.state = st
        return self.generator


def _uniform_direction(rng: np.random.Generator, d: int) -> np.ndarray:
    if d == 1:
        return np.array([1.0 if rng.random() < 0.5 else -1.0])
    if d == 2:
        phi = rng.uniform(0.0, 2.0 * math.pi)
        return np.array([math.cos(phi), math.sin(phi)])
    if d == 3:
        t = rng.uniform(-1.0, 1.0)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        s = math.sqrt(max(1.0 - t * t, 0.0))
        return np.array([s * math.cos(phi), s * math.sin(phi), t])
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _exit_radius(rng: np.random.Generator, alpha: float) -> float:
    """Exit radius R > 1 from the unit ball started at its centre."""
    while True:
        z = rng.beta(1.0 - alpha / 2.0, alpha / 2.0)
        if 0.0 < z < 1.0:
            w = z / (1.0 - z)
            r = math.sqrt(1.0 + w)
            if r > 1.0:  # guard against underflow to the boundary
                return r


def _occupation_radius(rng: np.random.Generator, alpha: float, d: int) -> float:
    """Radius R in (0, 1) of a Green-density-distributed point (centre start)."""
    while True:
        z = rng.beta(alpha / 2.0, d / 2.0)
        if 0.0 < z < 1.0:
            s = z / (1.0 - z)
            r = rng.random() ** (1.0 / alpha) / math.sqrt(1.0 + s)
            if 0.0 < r < 1.0:
                return r


def sample_ball_exit(x, ball: Ball, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Draw the exact exit position of the process started at x inside the ball.

    The centre start is a direct draw; a general interior start uses
    rejection against the centre law with acceptance probability
    ((1-|xt|) |yt| / |xt-yt|)^d, exact but increasingly expensive as x
    approaches the boundary.
    """
    x = np.asarray(x, dtype=float)
    c = ball.center_array()
    r = ball.radius
    rel = (x - c) / r
    a = float(np.linalg.norm(rel))
    if a >= 1.0 - 1e-12:
        raise GeometryViolation("start point must lie strictly inside the ball")
    if a <= 1e-14:
        R = _exit_radius(rng, alpha)
        y = R * _uniform_direction(rng, ball.d)
        return c + r * y
    d = ball.d
    while True:
        R = _exit_radius(rng, alpha)
        y = R * _uniform_direction(rng, d)
        ratio = (1.0 - a) * R / float(np.linalg.norm(rel - y))
        if rng.random() <= ratio**d:
            return c + r * y


# ---------------------------------------------------------------------------
# hitting probability

def _step_offset(rng: np.random.Generator, d: int, length: float):
    """Jump offset of magnitude ``length``; draw order matches _uniform_direction."""
    if d == 1:
        return (length if rng.random() < 0.5 else -length,)
    if d == 2:
        phi = rng.uniform(0.0, 2.0 * math.pi)
        return (length * math.cos(phi), length * math.sin(phi))
    if d == 3:
        t = rng.uniform(-1.0, 1.0)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        s = math.sqrt(max(1.0 - t * t, 0.0))
        return (length * s * math.cos(phi), length * s * math.sin(phi), length * t)
    return tuple(length * _uniform_direction(rng, d))


def _hit_walk_chunk(seed: int, lo: int, hi: int, d: int, alpha: float,
                    x0: tuple, tc: tuple, tr: float, ec: tuple, er: float,
                    max_steps: int):
    """Scores (1 hit / 0 miss) and truncation flags for paths lo..hi-1."""
    scores = np.zeros(hi - lo)
    trunc = np.zeros(hi - lo, dtype=np.int64)
    streams = _PathStreams(seed)
    for i in range(lo, hi):
        rng = streams.rekey(i)
        z = list(x0)
        dist_t = math.dist(z, tc) - tr
        dist_e = er - math.dist(z, ec)
        for _ in range(max_steps):
            rho = WALK_BALL_FACTOR * min(dist_t, dist_e)
            step = rho * _exit_radius(rng, alpha)
            off = _step_offset(rng, d, step)
            for k in range(d):
                z[k] += off[k]
            dist_t = math.dist(z, tc) - tr
            if dist_t <= 0.0:
                scores[i - lo] = 1.0
                break
            dist_e = er - math.dist(z, ec)
            if dist_e <= 0.0:
                break
        else:
            trunc[i - lo] = 1  # budget exhausted: conservatively a miss
    return scores, trunc


def _run_chunks(worker_fn, args_common: tuple, n: int, workers: int):
    chunk = 4096
    ranges = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
    if workers == 1 or len(ranges) == 1:
        parts = [worker_fn(*(args_common[:1] + rng_pair + args_common[1:]))
                 for rng_pair in ranges]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(worker_fn, *(args_common[:1] + rng_pair + args_common[1:]))
                for rng_pair in ranges
            ]
            parts = [f.result() for f in futures]
    scores = np.concatenate([p[0] for p in parts])
    trunc = np.concatenate([p[1] for p in parts])
    return scores, trunc


def _estimate_from_scores(scores: np.ndarray, truncated: int) -> MCEstimate:
    n = scores.size
    mean = float(np.sum(scores) / n)
    if n > 1:
        se = float(np.sqrt(np.sum((scores - mean) ** 2) / (n - 1)) / math.sqrt(n))
    else:
        se = 0.0
    return MCEstimate(mean=mean, std_error=se, n=n, truncated_paths=truncated)


def estimate_hitting_probability(x, target: Ball, enclosure: Ball, alpha: float,
                                 cfg: MCConfig) -> MCEstimate:
    """P_x(hit the closed target ball before exiting the enclosure).

    The walk exits the largest ball centred at the current point inside
    enclosure minus target; a landing in the closed target scores a hit, a
    landing outside the open enclosure a miss.  Paths exceeding the step
    budget are counted in truncated_paths and scored as misses, which biases
    the estimate conservatively downward.
    """
    x = np.asarray(x, dtype=float)
    d = target.d
    if enclosure.d != d or x.shape != (d,):
        raise GeometryViolation("dimension mismatch")
    gap = float(np.linalg.norm(target.center_array() - enclosure.center_array()))
    if gap >= target.radius + enclosure.radius:
        raise GeometryViolation("target and enclosure do not overlap")
    if float(np.linalg.norm(x - enclosure.center_array())) >= enclosure.radius:
        raise GeometryViolation("start point outside the enclosure")
    if float(np.linalg.norm(x - target.center_array())) <= target.radius:
        scores = np.ones(cfg.n_paths)
        return _estimate_from_scores(scores, truncated=0)
    scores, trunc = _run_chunks(
        _hit_walk_chunk,
        (cfg.seed, d, alpha, tuple(x), tuple(target.center), target.radius,
         tuple(enclosure.center), enclosure.radius, cfg.max_steps_per_path),
        cfg.n_paths,
        cfg.workers,
    )
    return _estimate_from_scores(scores, truncated=int(np.sum(trunc)))


# ---------------------------------------------------------------------------
# occupation functional  E_x[ int_0^tau f(X_s) ds ]

def _exit_functional_chunk(seed: int, lo: int, hi: int, d: int, alpha: float,
                           x0: tuple, bc: tuple, br: float, f: ScalarField,
                           max_steps: int):
    scores = np.zeros(hi - lo)
    trunc = np.zeros(hi - lo, dtype=np.int64)
    cexit = exit_time_constant(d, alpha)
    origin = (0.0,) * d
    if f.is_radial:
        prof = f.radial_profile

        def feval(pt):
            return float(prof(np.array([math.dist(pt, origin)]))[0])
    else:
        def feval(pt):
            return float(f.values_at(np.asarray(pt)[None, :])[0])

    streams = _PathStreams(seed)
    for i in range(lo, hi):
        rng = streams.rekey(i)
        z = list(x0)
        total = 0.0
        for _ in range(max_steps):
            dist = br - math.dist(z, bc)
            if dist <= 0.0:
                break
            rho = WALK_BALL_FACTOR * dist
            # Rao-Blackwellized occupation increment for the sub-ball:
            # expected duration times f at a Green-distributed point.
            ry = _occupation_radius(rng, alpha, d)
            off = _step_offset(rng, d, rho * ry)
            total += cexit * rho**alpha * feval(tuple(z[k] + off[k] for k in range(d)))
            step = rho * _exit_radius(rng, alpha)
            off = _step_offset(rng, d, step)
            for k in range(d):
                z[k] += off[k]
        else:
            trunc[i - lo] = 1
        scores[i - lo] = total
    return scores, trunc


def estimate_exit_functional(x, ball: Ball, alpha: float, f: ScalarField,
                             cfg: MCConfig) -> MCEstimate:
    """Unbiased estimate of E_x[int_0^tau f(X_s) ds] for the given ball.

    Each step adds (expected sub-ball exit time) x (f at an exact
    occupation draw) and jumps to the exact sub-ball exit position; the sum
    telescopes to the occupation integral by the strong Markov property.
    Truncated paths keep their partial sums (bias toward zero for
    sign-definite f) and are counted separately.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (ball.d,):
        raise GeometryViolation("dimension mismatch")
    if float(np.linalg.norm(x - ball.center_array())) >= ball.radius:
        raise GeometryViolation("start point must lie inside the ball")
    scores, trunc = _run_chunks(
        _exit_functional_chunk,
        (cfg.seed, ball.d, alpha, tuple(x), tuple(ball.center), ball.radius, f,
         cfg.max_steps_per_path),
        cfg.n_paths,
        cfg.workers,
    )
    return _estimate_from_scores(scores, truncated=int(np.sum(trunc)))
