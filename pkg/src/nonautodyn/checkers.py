"""Finite-horizon empirical checkers for dynamical properties.

Every checker runs against a SystemView, which is either the non-autonomous
system (orbit operator omega_n) or its autonomous limit (orbit operator f^n);
nothing else differs between the modes. Verdicts are three-valued and carry
reproducible witnesses.

Semi-decidability policy: Holds verdicts are evidence at the configured
horizon. Refuted verdicts require either a concrete finite counterexample or
a symbolic step rule that extends to all times (isometric steps keep pair
distances and region widths constant; a flat piece collapses an interval to
a point; a rotation family with a summable displacement tail confines every
orbit to a computable arc). Pure absence of evidence yields Inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import verdict as V
from .descriptors import (
    MapDescriptor,
    PiecewiseLinear,
    Rotation,
    apply,
    apply_batch,
    circle_canonical,
    circle_map_fixed_points,
    compose,
    pl_fixed_points,
)
from .family import MapFamily
from .regions import (
    ArcRegion,
    Region,
    ball_region,
    family_supports_regions,
    region_is_point,
    region_midpoint,
    step_region,
)
from .space import (
    TWO_PI,
    BinaryWord,
    CircleAngle,
    IntervalPoint,
    PhaseSpace,
    Point,
    SpaceError,
    SpaceKind,
    ball_sample,
    distance,
    encode_word,
    point_to_json,
    sample_grid,
    word_distance_batch,
)
from .verdict import Verdict


class Mode(str, Enum):
    NON_AUTONOMOUS = "non_autonomous"
    AUTONOMOUS_LIMIT = "autonomous_limit"


def verdict_record(property_name: str, mode: "Mode", cfg: "CheckConfig", verdict: Verdict) -> dict:
    """Standalone serialization of one checker run."""
    return {
        "property": property_name,
        "mode": mode.value,
        "outcome": verdict.outcome.value,
        "witness": verdict.witness,
        "config": cfg.to_json(),
        "narrative": verdict.narrative,
    }


@dataclass(frozen=True, eq=False)
class SystemView:
    """One of the two systems under comparison: (X, F) or (X, f)."""

    fam: MapFamily
    mode: Mode
    #: memo for expensive intermediates (orbits, hit tables); results are
    #: pure functions of (fam, mode, config), so caching is transparent
    _cache: dict = field(default_factory=dict)

    @property
    def space(self) -> PhaseSpace:
        return self.fam.space

    def step_map(self, n: int) -> MapDescriptor:
        """The map applied at step n (1-based)."""
        if self.mode is Mode.AUTONOMOUS_LIMIT:
            return self.fam.limit
        return self.fam.member(n)

    def orbit(self, x: Point, horizon: int) -> list[Point]:
        """Scalar orbit sweep: states[n] is the point after n steps."""
        states = [x]
        for n in range(1, horizon + 1):
            states.append(apply(self.step_map(n), states[-1]))
        return states

    @property
    def steps_isometric(self) -> bool:
        """Every step map is known to be an isometry (symbolic knowledge)."""
        if self.mode is Mode.AUTONOMOUS_LIMIT:
            from .descriptors import OdometerAdd

            return isinstance(self.fam.limit, (Rotation, OdometerAdd))
        return self.fam.steps_isometric

    def constant_tail_from(self) -> int | None:
        """Index from which every step map equals the limit, if known."""
        if self.mode is Mode.AUTONOMOUS_LIMIT:
            return 1
        return self.fam.eventually_constant_from

    def rotation_amounts(self, horizon: int) -> list[float] | None:
        """Step rotation amounts for rotation-only systems, else None."""
        if self.mode is Mode.AUTONOMOUS_LIMIT:
            if isinstance(self.fam.limit, Rotation):
                return [self.fam.limit.amount] * horizon
            return None
        if not self.fam.steps_isometric or not isinstance(self.fam.limit, Rotation):
            return None
        amounts = []
        for n in range(1, horizon + 1):
            m = self.fam.member(n)
            if not isinstance(m, Rotation):
                return None
            amounts.append(m.amount)
        return amounts


@dataclass(frozen=True)
class CheckConfig:
    """Shared knobs for all checkers.

    eps is the closeness target, delta the separation target, and the tail
    window [horizon - tail_window, horizon] is the finite surrogate for
    liminf/limsup quantifiers.
    """

    horizon: int = 5000
    grid_resolution: int = 20
    ball_count: int = 9
    eps: float = 0.05
    delta: float = 0.25
    tol: float = 1e-9
    tail_window: int = 2000
    max_period: int = 16
    repetitions: int = 3

    def validate(self, space: PhaseSpace) -> None:
        if not (0.0 < self.eps < self.delta <= space.diameter):
            raise SpaceError(
                f"need 0 < eps < delta <= diameter, got eps={self.eps}, "
                f"delta={self.delta}, diameter={space.diameter}"
            )
        if not (0 < self.tail_window <= self.horizon):
            raise SpaceError("tail window must lie within the horizon")
        if space.kind is SpaceKind.BINARY_SEQ and 1.0 / self.eps >= space.word_length:
            raise SpaceError(
                f"eps={self.eps} needs words longer than {1.0 / self.eps:.0f}, "
                f"space carries {space.word_length}"
            )
        if self.horizon < 1 or self.grid_resolution < 2 or self.ball_count < 1:
            raise SpaceError("horizon, grid resolution, and ball count must be positive")

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "grid_resolution": self.grid_resolution,
            "ball_count": self.ball_count,
            "eps": self.eps,
            "delta": self.delta,
            "tol": self.tol,
            "tail_window": self.tail_window,
            "max_period": self.max_period,
            "repetitions": self.repetitions,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CheckConfig":
        return cls(**{k: doc[k] for k in doc})


# ---------------------------------------------------------------------------
# shared machinery

def grid_points(space: PhaseSpace, cfg: CheckConfig) -> list[Point]:
    """Checker grid; binary words are padded to full length with zeros so
    orbits keep enough resolution for the horizon."""
    pts = list(sample_grid(space, cfg.grid_resolution))
    if space.kind is SpaceKind.BINARY_SEQ:
        L = space.word_length
        pts = [
            BinaryWord(p.bits + (0,) * (L - len(p.bits)), L) if len(p.bits) < L else p
            for p in pts
        ]
    return pts


def _coords(points: list[Point], kind: SpaceKind) -> np.ndarray:
    if kind is SpaceKind.CIRCLE:
        return np.array([p.theta for p in points], dtype=float)
    return np.array([p.x for p in points], dtype=float)


def _dist_arrays(kind: SpaceKind, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a - b)
    if kind is SpaceKind.CIRCLE:
        return np.minimum(d, TWO_PI - d)
    return d


def orbit_matrix(sys: SystemView, coords: np.ndarray, horizon: int) -> np.ndarray:
    """Vectorized orbit sweep on coordinate arrays, shape (horizon+1, len)."""
    kind = sys.space.kind
    rows = np.empty((horizon + 1, coords.shape[0]), dtype=float)
    rows[0] = coords
    for n in range(1, horizon + 1):
        rows[n] = apply_batch(sys.step_map(n), rows[n - 1], kind)
    return rows


# All binary-space thresholds used by checkers sit far above the 1/12
# resolution floor of the shared integer word frame (see space.encode_word).
_bin_encode = encode_word
_bin_series_ints = word_distance_batch


def _bin_orbit_ints(sys: SystemView, x: Point, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """Orbit encoded as (frame values, trusted depths), cached per system."""
    key = ("orbit_ints", x, horizon)
    hit = sys._cache.get(key)
    if hit is not None:
        return hit
    orb = sys.orbit(x, horizon)
    vals = np.empty(horizon + 1, dtype=np.int64)
    deps = np.empty(horizon + 1, dtype=np.int64)
    for n, w in enumerate(orb):
        vals[n], deps[n] = _bin_encode(w)
    sys._cache[key] = (vals, deps)
    return vals, deps


def _region_chain(sys: SystemView, start: Region, horizon: int) -> list[Region] | None:
    chain = [start]
    for n in range(1, horizon + 1):
        nxt = step_region(chain[-1], sys.step_map(n))
        if nxt is None:
            return None
        chain.append(nxt)
    return chain


def _supports_regions(sys: SystemView, horizon: int) -> bool:
    if sys.space.kind is SpaceKind.BINARY_SEQ:
        return False
    cutoff = sys.constant_tail_from()
    depth = min(horizon, 64) if cutoff is None else min(horizon, cutoff)
    probe = [sys.step_map(n) for n in range(1, depth + 1)] + [sys.fam.limit]
    return family_supports_regions(sys.space, probe)


def _chain_arrays(chain: list[Region]) -> tuple[str, np.ndarray, np.ndarray]:
    if isinstance(chain[0], ArcRegion):
        return (
            "arc",
            np.array([r.start for r in chain]),
            np.array([r.length for r in chain]),
        )
    return (
        "interval",
        np.array([r.lo for r in chain]),
        np.array([r.hi for r in chain]),
    )


def _chain_point_distance(kind: str, a: np.ndarray, b: np.ndarray, v: float) -> np.ndarray:
    """Vectorized distance from the point v to each region of a chain."""
    if kind == "arc":
        starts, lengths = a, b
        z = np.mod(v - starts, TWO_PI)
        inside = z <= lengths
        to_start = np.minimum(z, TWO_PI - z)
        w = np.mod(z - lengths, TWO_PI)
        to_end = np.minimum(w, TWO_PI - w)
        out = np.minimum(to_start, to_end)
        out[inside] = 0.0
        out[lengths >= TWO_PI] = 0.0
        return out
    los, his = a, b
    return np.maximum(np.maximum(los - v, v - his), 0.0)


def _chain_diameters(kind: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if kind == "arc":
        return np.minimum(b, math.pi)
    return b - a


def _chain_covering_defect(kind: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if kind == "arc":
        return np.where(b >= TWO_PI, 0.0, (TWO_PI - b) / 2.0)
    return np.maximum(a, 1.0 - b)


def _cloud_diam_series(kind: SpaceKind, orbits: np.ndarray) -> np.ndarray:
    """Max pairwise distance per time row of an orbit matrix."""
    n_cols = orbits.shape[1]
    out = np.zeros(orbits.shape[0])
    for i in range(n_cols):
        for j in range(i + 1, n_cols):
            out = np.maximum(out, _dist_arrays(kind, orbits[:, i], orbits[:, j]))
    return out


def _sens_rungs(space: PhaseSpace, cfg: CheckConfig) -> list[float]:
    rungs = [cfg.eps, cfg.eps / 4.0, cfg.eps / 16.0]
    if space.kind is SpaceKind.BINARY_SEQ:
        rungs = [r for r in rungs if r > 1.0 / space.word_length]
        if not rungs:
            raise SpaceError("no resolvable ball radius for this word length")
    return rungs


def _rotation_displacements(sys: SystemView, horizon: int) -> tuple[np.ndarray, float] | None:
    """Cumulative rotation displacements d_1..d_N plus a forever-tail bound.

    Returns None unless every step is a rotation and the displacement after
    the horizon is provably confined: either the steps are eventually the
    identity-limit with a summable perturbation tail, or the limit itself is
    the identity and the family carries a closed-form tail bound.
    """
    amounts = sys.rotation_amounts(horizon)
    if amounts is None:
        return None
    disp = np.cumsum(amounts)
    if sys.mode is Mode.AUTONOMOUS_LIMIT:
        if sys.fam.limit.amount == 0.0:
            return disp, 0.0
        return None
    if sys.fam.limit.amount != 0.0:
        return None
    tail = sys.fam.series_tail_bound
    if tail is None:
        return None
    return disp, float(tail(horizon))


def _point_coord(p: Point) -> float:
    return p.theta if isinstance(p, CircleAngle) else p.x


def _ball_points(space: PhaseSpace, center: Point, radius: float, count: int) -> list[Point]:
    return list(ball_sample(space, center, radius, count))


# ---------------------------------------------------------------------------
# pointwise checkers

def check_equicontinuity(sys: SystemView, cfg: CheckConfig) -> Verdict:
    """Search a ladder of pair separations delta' for one that keeps all
    sampled pairs within eps for every time up to the horizon."""
    cfg.validate(sys.space)
    space = sys.space
    N = cfg.horizon
    base = min(cfg.eps, cfg.delta)
    rungs = [base / 2.0**i for i in range(5)]
    if space.kind is SpaceKind.BINARY_SEQ:
        rungs = [r for r in rungs if r > 1.0 / space.word_length]
        if not rungs:
            raise SpaceError("no resolvable pair radius for this word length")
    centers = grid_points(space, cfg)

    worst_for_smallest: tuple[Point, Point, int, float] | None = None
    for rung in rungs:
        worst_sep = 0.0
        worst_pair: tuple[Point, Point, int] | None = None
        for c in centers:
            partners = [p for p in _ball_points(space, c, rung, cfg.ball_count) if p != c]
            if not partners:
                continue
            if space.kind is SpaceKind.BINARY_SEQ:
                cv, cd = _bin_orbit_ints(sys, c, N)
                for p in partners:
                    pv, pdep = _bin_orbit_ints(sys, p, N)
                    series = _bin_series_ints(cv, cd, pv, pdep)
                    t = int(np.argmax(series))
                    if series[t] > worst_sep:
                        worst_sep, worst_pair = float(series[t]), (c, p, t)
            else:
                cols = _coords([c] + partners, space.kind)
                orbits = orbit_matrix(sys, cols, N)
                seps = _dist_arrays(space.kind, orbits[:, 1:], orbits[:, :1])
                flat = int(np.argmax(seps))
                t, j = divmod(flat, seps.shape[1])
                if seps[t, j] > worst_sep:
                    worst_sep, worst_pair = float(seps[t, j]), (c, partners[j], t)
        if worst_sep <= cfg.eps:
            return V.holds(
                {"delta_prime": rung, "max_separation": worst_sep, "horizon": N},
                f"pairs within {rung:g} stay {cfg.eps:g}-close up to n={N}",
            )
        if rung == rungs[-1] and worst_pair is not None:
            x, y, t = worst_pair
            worst_for_smallest = (x, y, t, worst_sep)

    if worst_for_smallest is not None:
        x, y, t, sep = worst_for_smallest
        return V.refuted(
            {
                "pair": [point_to_json(x), point_to_json(y)],
                "time": t,
                "separation": sep,
                "delta_floor": rungs[-1],
            },
            f"a pair within {rungs[-1]:g} separates to {sep:.3g} by n={t}",
        )
    return V.inconclusive({"horizon": N, "rungs": rungs}, "no conclusive rung at this horizon")


def _diam_series_for_ball(
    sys: SystemView, center: Point, radius: float, cfg: CheckConfig, use_regions: bool
) -> tuple[np.ndarray, list[Region] | None]:
    """Orbit-diameter series of a ball, exact via regions when possible."""
    N = cfg.horizon
    if use_regions:
        chain = _region_chain(sys, ball_region(sys.space, center, radius), N)
        if chain is not None:
            kind, a, b = _chain_arrays(chain)
            return _chain_diameters(kind, a, b), chain
    pts = _ball_points(sys.space, center, radius, cfg.ball_count)
    if sys.space.kind is SpaceKind.BINARY_SEQ:
        encoded = [_bin_orbit_ints(sys, p, N) for p in pts]
        out = np.zeros(N + 1)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                out = np.maximum(
                    out, _bin_series_ints(*encoded[i], *encoded[j])
                )
        return out, None
    orbits = orbit_matrix(sys, _coords(pts, sys.space.kind), N)
    return _cloud_diam_series(sys.space.kind, orbits), None


def _collapse_step(chain: list[Region]) -> int | None:
    for n, r in enumerate(chain):
        if region_is_point(r):
            return n
    return None


def _sensitivity_scan(sys: SystemView, cfg: CheckConfig):
    """Shared sweep for the sensitivity checkers.

    Yields (center, radius, diam_series, chain) over the grid and the radius
    ladder.
    """
    use_regions = _supports_regions(sys, cfg.horizon)
    for c in grid_points(sys.space, cfg):
        for r in _sens_rungs(sys.space, cfg):
            series, chain = _diam_series_for_ball(sys, c, r, cfg, use_regions)
            yield c, r, series, chain


def _refute_ball(
    sys: SystemView, cfg: CheckConfig, center: Point, radius: float,
    series: np.ndarray, chain: list[Region] | None, what: str
) -> Verdict | None:
    """Symbolic refutation for a ball whose diameter never clears delta."""
    if float(np.max(series[1:])) > cfg.delta - cfg.tol:
        return None
    if chain is not None:
        step = _collapse_step(chain)
        if step is not None and _constant_after_collapse(sys, chain, step, cfg.horizon):
            return V.refuted(
                {
                    "ball_center": point_to_json(center),
                    "radius": radius,
                    "collapse_step": step,
                    "max_diameter": float(np.max(series)),
                },
                f"{what}: the ball collapses to a point at step {step} and stays collapsed",
            )
    if sys.steps_isometric:
        return V.refuted(
            {
                "ball_center": point_to_json(center),
                "radius": radius,
                "max_diameter": float(np.max(series)),
                "rule": "isometric-steps",
            },
            f"{what}: isometric steps keep the ball diameter at most {2 * radius:g} forever",
        )
    return None


def _constant_after_collapse(
    sys: SystemView, chain: list[Region], step: int, horizon: int
) -> bool:
    """True when the collapsed point provably stays a point forever.

    The chain already witnesses collapse up to the horizon; forever needs the
    step maps to be eventually constant with the collapsed orbit landing on a
    fixed point of the limit.
    """
    cutoff = sys.constant_tail_from()
    if cutoff is None:
        return False
    p = region_midpoint(chain[-1])
    return apply(sys.fam.limit, p) == p


def check_sensitivity(sys: SystemView, cfg: CheckConfig) -> Verdict:
    """Every grid point, every ladder radius: some time with ball diameter > delta."""
    cfg.validate(sys.space)
    times: list[dict] = []
    failing: list[tuple[Point, float, np.ndarray, list[Region] | None]] = []
    for c, r, series, chain in _sensitivity_scan(sys, cfg):
        hits = np.nonzero(series[1:] > cfg.delta)[0]
        if hits.size:
            times.append(
                {"center": point_to_json(c), "radius": r, "separation_time": int(hits[0]) + 1}
            )
        else:
            failing.append((c, r, series, chain))
    if not failing:
        worst = max(t["separation_time"] for t in times)
        return V.holds(
            {"separation_times": times, "max_separation_time": worst, "delta": cfg.delta},
            f"every sampled neighborhood reaches diameter {cfg.delta:g} by n={worst}",
        )
    for c, r, series, chain in failing:
        refutation = _refute_ball(sys, cfg, c, r, series, chain, "sensitivity")
        if refutation is not None:
            return refutation
    c, r, series, _ = failing[0]
    return V.inconclusive(
        {
            "ball_center": point_to_json(c),
            "radius": r,
            "max_diameter": float(np.max(series)),
            "horizon": cfg.horizon,
        },
        "some sampled neighborhoods never separated and no symbolic rule applies",
    )


def check_cofinite_sensitivity(sys: SystemView, cfg: CheckConfig) -> Verdict:
    """Sensitivity with persistence: diameters stay above delta from some
    K <= horizon/2 onward, for every sampled ball."""
    cfg.validate(sys.space)
    N = cfg.horizon
    entries: list[dict] = []
    failing: list[tuple[Point, float, np.ndarray, list[Region] | None]] = []
    for c, r, series, chain in _sensitivity_scan(sys, cfg):
        below = np.nonzero(series <= cfg.delta)[0]
        K = int(below[-1]) + 1 if below.size else 1
        if K <= N // 2 and K <= N:
            entries.append({"center": point_to_json(c), "radius": r, "K": K})
        else:
            failing.append((c, r, series, chain))
    if not failing:
        worst = max(e["K"] for e in entries)
        return V.holds(
            {"persistence_starts": entries, "max_K": worst, "delta": cfg.delta},
            f"every sampled ball stays spread past delta from K <= {worst}",
        )
    for c, r, series, chain in failing:
        refutation = _refute_ball(sys, cfg, c, r, series, chain, "cofinite sensitivity")
        if refutation is not None:
            return refutation
    c, r, series, _ = failing[0]
    return V.inconclusive(
        {"ball_center": point_to_json(c), "radius": r, "horizon": N},
        "no persistent spreading found and no symbolic rule applies",
    )


# ---------------------------------------------------------------------------
# open-set checkers (transitivity family)

@dataclass
class _HitData:
    """Hit evidence between grid balls: hits[u][v][n] for n in 0..N."""

    centers: list[Point]
    hits: np.ndarray  # bool, shape (U, V, N+1)
    chains: list[list[Region]] | None
    radius: float


def _hit_data(sys: SystemView, cfg: CheckConfig) -> _HitData:
    key = ("hit_data", cfg)
    cached = sys._cache.get(key)
    if cached is not None:
        return cached
    sys._cache[key] = data = _compute_hit_data(sys, cfg)
    return data


def _compute_hit_data(sys: SystemView, cfg: CheckConfig) -> _HitData:
    space = sys.space
    N = cfg.horizon
    centers = grid_points(space, cfg)
    G = len(centers)
    use_regions = _supports_regions(sys, N)
    hits = np.zeros((G, G, N + 1), dtype=bool)

    if use_regions:
        chains: list[list[Region]] | None = []
        ok = True
        for c in centers:
            chain = _region_chain(sys, ball_region(space, c, cfg.eps), N)
            if chain is None:
                ok = False
                break
            chains.append(chain)
        if ok:
            for u, chain in enumerate(chains):
                kind, a, b = _chain_arrays(chain)
                for v, vc in enumerate(centers):
                    d = _chain_point_distance(kind, a, b, _point_coord(vc))
                    hits[u, v] = d < cfg.eps
            return _HitData(centers, hits, chains, cfg.eps)

    if space.kind is SpaceKind.BINARY_SEQ:
        enc_centers = [_bin_encode(c) for c in centers]
        for u, c in enumerate(centers):
            pts = _ball_points(space, c, cfg.eps, cfg.ball_count)
            encoded = [_bin_orbit_ints(sys, p, N) for p in pts]
            for v, (vv, vd) in enumerate(enc_centers):
                col = np.full(N + 1, np.inf)
                for ov, od in encoded:
                    col = np.minimum(
                        col, _bin_series_ints(ov, od, np.int64(vv), np.int64(vd))
                    )
                hits[u, v] = col < cfg.eps
        return _HitData(centers, hits, None, cfg.eps)

    for u, c in enumerate(centers):
        pts = _ball_points(space, c, cfg.eps, cfg.ball_count)
        orbits = orbit_matrix(sys, _coords(pts, space.kind), N)
        for v, vc in enumerate(centers):
            d = _dist_arrays(space.kind, orbits, np.full(1, _point_coord(vc)))
            hits[u, v] = d.min(axis=1) < cfg.eps
    return _HitData(centers, hits, None, cfg.eps)


def _prove_pair_miss(
    sys: SystemView, cfg: CheckConfig, data: _HitData, u: int, v: int
) -> dict | None:
    """Proof that ball u can never meet the eps-ball around center v."""
    uc, vc = data.centers[u], data.centers[v]
    # collapse rule: the ball degenerates to an eventually fixed point
    if data.chains is not None:
        chain = data.chains[u]
        step = _collapse_step(chain)
        if step is not None and _constant_after_collapse(sys, chain, step, cfg.horizon):
            p = region_midpoint(chain[-1])
            gap = distance(sys.space, p, vc)
            if gap >= cfg.eps:
                return {
                    "rule": "collapse",
                    "collapse_step": step,
                    "stuck_at": point_to_json(p),
                    "gap": gap,
                }
    # displacement confinement for rotation families with a summable tail
    conf = _rotation_displacements(sys, cfg.horizon)
    if conf is not None:
        disp, tail = conf
        need = cfg.eps + data.radius + cfg.tol
        base = _point_coord(vc) - _point_coord(uc)
        gaps = _dist_arrays(SpaceKind.CIRCLE, np.mod(base - disp, TWO_PI), np.zeros(1))
        future = max(0.0, float(gaps[-1]) - tail)
        if float(gaps.min()) >= need and future >= need:
            return {
                "rule": "displacement-confinement",
                "min_gap": float(gaps.min()),
                "tail_bound": tail,
            }
    return None


def check_transitivity(sys: SystemView, cfg: CheckConfig) -> Verdict:
    """Every ordered pair of grid balls interacts at some time <= horizon."""
    cfg.validate(sys.space)
    data = _hit_data(sys, cfg)
    G = len(data.centers)
    any_hits = data.hits[:, :, 1:].any(axis=2)
    first_hit = np.where(any_hits, data.hits[:, :, 1:].argmax(axis=2) + 1, -1)
    if any_hits.all():
        return V.holds(
            {
                "hit_times": first_hit.tolist(),
                "max_hit_time": int(first_hit.max()),
                "grid_resolution": cfg.grid_resolution,
            },
            f"all {G * G} ordered ball pairs interact by n={int(first_hit.max())}",
        )
    missed = [(u, v) for u in range(G) for v in range(G) if not any_hits[u, v]]
    for u, v in missed:
        proof = _prove_pair_miss(sys, cfg, data, u, v)
        if proof is not None:
            return V.refuted(
                {
                    "from_center": point_to_json(data.centers[u]),
                    "to_center": point_to_json(data.centers[v]),
                    **proof,
                },
                "a ball provably never reaches a target ball",
            )
    return V.inconclusive(
        {
            "missed_pairs": [
                [point_to_json(data.centers[u]), point_to_json(data.centers[v])]
                for u, v in missed[:8]
            ],
            "missed_count": len(missed),
            "horizon": cfg.horizon,
        },
        f"{len(missed)} ball pairs never interacted at this horizon",
    )


def check_weak_mixing(sys: SystemView, cfg: CheckConfig) -> Verdict:
    """Pairs of ball pairs must interact simultaneously at a single time."""
    cfg.validate(sys.space)
    data = _hit_data(sys, cfg)
    G = len(data.centers)
    H = data.hits[:, :, 1:].reshape(G * G, -1)
    sim = (H.astype(np.float32) @ H.astype(np.float32).T) > 0.5
    if sim.all():
        return V.holds(
            {"pairs": G * G, "grid_resolution": cfg.grid_resolution},
            "every two ball pairs interact at a shared time",
        )
    flat = int(np.argmin(sim))
    p1, p2 = divmod(flat, G * G)
    u1, v1 = divmod(p1, G)
    u2, v2 = divmod(p2, G)
    quad = {
        "U1": point_to_json(data.centers[u1]),
        "V1": point_to_json(data.centers[v1]),
        "U2": point_to_json(data.centers[u2]),
        "V2": point_to_json(data.centers[v2]),
    }
    for u, v in ((u1, v1), (u2, v2)):
        proof = _prove_pair_miss(sys, cfg, data, u, v)
        if proof is not None:
            return V.refuted({**quad, **proof}, "one leg of the quadruple provably never hits")
    if sys.steps_isometric:
        extreme = _isometric_spacing_witness(sys, cfg, data)
        if extreme is not None:
            return V.refuted(
                extreme,
                "isometric steps preserve the spacing between the two source balls, "
                "which is incompatible with the target spacing",
            )
    missed = int(sim.size - int(sim.sum()))
    return V.inconclusive(
        {"missed_quadruples": missed, "witness_quadruple": quad, "horizon": cfg.horizon},
        "no simultaneous interaction found for some quadruples",
    )


def _isometric_spacing_witness(sys: SystemView, cfg: CheckConfig, data: _HitData) -> dict | None:
    """A quadruple whose source/target spacings differ too much for any
    isometry to reconcile: take sources at maximal spacing and targets at
    minimal spacing."""
    centers = data.centers
    G = len(centers)
    slack = 2.0 * (cfg.eps + data.radius) + cfg.tol
    dmat = np.array(
        [[distance(sys.space, centers[i], centers[j]) for j in range(G)] for i in range(G)]
    )
    hi = int(np.argmax(dmat))
    u1, u2 = divmod(hi, G)
    if dmat[u1, u2] - 0.0 <= slack:  # targets at spacing 0: v1 = v2
        return None
    return {
        "U1": point_to_json(centers[u1]),
        "U2": point_to_json(centers[u2]),
        "V1": point_to_json(centers[0]),
        "V2": point_to_json(centers[0]),
        "rule": "isometric-spacing",
        "source_gap": float(dmat[u1, u2]),
        "target_gap": 0.0,
    }


def check_topological_mixing(sys: SystemView, cfg: CheckConfig) -> Verdict:
    """Two tests, both reported: hit persistence and cloud convergence."""
    cfg.validate(sys.space)
    N = cfg.horizon
    data = _hit_data(sys, cfg)
    G = len(data.centers)

    # (a) hit persistence: for each pair a K with hits at every n in [K, N]
    persistence_ok = True
    worst_K = 0
    miss_pair = None
    for u in range(G):
        for v in range(G):
            misses = np.nonzero(~data.hits[u, v, 1:])[0]
            K = int(misses[-1]) + 2 if misses.size else 1
            if K > N // 2:
                persistence_ok = False
                if miss_pair is None:
                    miss_pair = (u, v)
            worst_K = max(worst_K, K if K <= N // 2 else 0)

    # (b) cloud convergence: image covering defect below eps from some K on
    convergence_ok = True
    conv_K = 0
    conv_fail = None
    defects_final: list[float] = []
    if data.chains is not None:
        for u, chain in enumerate(data.chains):
            kind, a, b = _chain_arrays(chain)
            defect = _chain_covering_defect(kind, a, b)
            defects_final.append(float(defect[-1]))
            bad = np.nonzero(defect >= cfg.eps)[0]
            K = int(bad[-1]) + 1 if bad.size else 0
            if K > N // 2:
                convergence_ok = False
                if conv_fail is None:
                    conv_fail = u
            conv_K = max(conv_K, K if K <= N // 2 else 0)
    else:
        full = sample_grid(sys.space, cfg.grid_resolution)
        for u, c in enumerate(data.centers):
            pts = _ball_points(sys.space, c, cfg.eps, cfg.ball_count)
            if sys.space.kind is SpaceKind.BINARY_SEQ:
                encoded = [_bin_orbit_ints(sys, p, N) for p in pts]
                defect = np.zeros(N + 1)
                for g in full:
                    gv, gd = _bin_encode(g)
                    best = np.full(N + 1, np.inf)
                    for ov, od in encoded:
                        best = np.minimum(
                            best, _bin_series_ints(ov, od, np.int64(gv), np.int64(gd))
                        )
                    defect = np.maximum(defect, best)
            else:
                orbits = orbit_matrix(sys, _coords(pts, sys.space.kind), N)
                gcols = _coords(list(full), sys.space.kind)
                defect = np.empty(N + 1)
                for n in range(N + 1):
                    d = _dist_arrays(
                        sys.space.kind, orbits[n][None, :], gcols[:, None]
                    )
                    defect[n] = float(d.min(axis=1).max())
            defects_final.append(float(defect[-1]))
            bad = np.nonzero(defect >= cfg.eps)[0]
            K = int(bad[-1]) + 1 if bad.size else 0
            if K > N // 2:
                convergence_ok = False
                if conv_fail is None:
                    conv_fail = u
            conv_K = max(conv_K, K if K <= N // 2 else 0)

    tests = {
        "hit_persistence": {"passed": persistence_ok, "K": worst_K},
        "cloud_convergence": {
            "passed": convergence_ok,
            "K": conv_K,
            "final_defects": defects_final,
        },
    }
    if persistence_ok and convergence_ok:
        return V.holds(
            {**tests, "grid_resolution": cfg.grid_resolution},
            f"hits persist from K={worst_K} and ball images become "
            f"{cfg.eps:g}-dense from K={conv_K}",
        )
    # symbolic refutations
    if miss_pair is not None:
        proof = _prove_pair_miss(sys, cfg, data, *miss_pair)
        if proof is not None:
            u, v = miss_pair
            return V.refuted(
                {
                    **tests,
                    "from_center": point_to_json(data.centers[u]),
                    "to_center": point_to_json(data.centers[v]),
                    **proof,
                },
                "a ball pair provably stops interacting",
            )
    if sys.steps_isometric:
        idx = conv_fail if conv_fail is not None else 0
        return V.refuted(
            {**tests, "rule": "isometric-steps", "ball_center": point_to_json(data.centers[idx])},
            "isometric steps preserve ball image spread, so small balls never become dense",
        )
    return V.inconclusive(
        {**tests, "horizon": N}, "mixing evidence incomplete at this horizon"
    )


def check_minimality(sys: SystemView, cfg: CheckConfig) -> Verdict:
    """Dense-orbit surrogate: every grid start visits every grid cell within eps."""
    cfg.validate(sys.space)
    space = sys.space
    N = cfg.horizon
    starts = grid_points(space, cfg)
    targets = list(sample_grid(space, cfg.grid_resolution))

    uncovered: list[tuple[Point, Point]] = []
    visit_times: list[int] = []
    orbits_by_start: dict[int, list[Point] | np.ndarray] = {}
    if space.kind is SpaceKind.BINARY_SEQ:
        enc_targets = [_bin_encode(t) for t in targets]
        for i, x in enumerate(starts):
            orbits_by_start[i] = sys.orbit(x, N)
            ov, od = _bin_orbit_ints(sys, x, N)
            for t, (tv, td) in zip(targets, enc_targets):
                series = _bin_series_ints(ov, od, np.int64(tv), np.int64(td))
                hit = np.nonzero(series <= cfg.eps)[0]
                if hit.size:
                    visit_times.append(int(hit[0]))
                else:
                    uncovered.append((x, t))
    else:
        cols = _coords(starts, space.kind)
        orbits = orbit_matrix(sys, cols, N)
        tcols = _coords(targets, space.kind)
        for i, x in enumerate(starts):
            orbits_by_start[i] = orbits[:, i]
            d = _dist_arrays(space.kind, orbits[:, i][:, None], tcols[None, :])
            ok = d <= cfg.eps
            any_ok = ok.any(axis=0)
            if any_ok.all():
                visit_times.append(int(ok.argmax(axis=0).max()))
            else:
                j = int(np.argmin(any_ok))
                uncovered.append((x, targets[j]))

    if not uncovered:
        worst = max(visit_times)
        return V.holds(
            {"max_cell_visit_time": worst, "starts": len(starts), "targets": len(targets)},
            f"every grid orbit is {cfg.eps:g}-dense by n={worst}",
        )

    # symbolic refutations
    cutoff = sys.constant_tail_from()
    for x, t in uncovered:
        i = starts.index(x)
        orb = orbits_by_start[i]
        # eventually-fixed orbit: once the step maps are the constant limit,
        # an orbit that lands on a fixed point of the limit stays there forever
        if cutoff is not None:
            stuck_at = None
            for m in range(max(0, cutoff - 1), N + 1):
                if space.kind is SpaceKind.BINARY_SEQ:
                    p = orb[m]
                else:
                    coord = float(orb[m])
                    p = CircleAngle(coord) if space.kind is SpaceKind.CIRCLE else IntervalPoint(coord)
                if apply(sys.fam.limit, p) == p:
                    stuck_at = (m, p)
                    break
            if stuck_at is not None:
                m, p = stuck_at
                if space.kind is SpaceKind.BINARY_SEQ:
                    gap = min(distance(space, s, t) for s in orb[: m + 1])
                else:
                    gap = float(
                        _dist_arrays(
                            space.kind, np.asarray(orb[: m + 1]), np.full(1, _point_coord(t))
                        ).min()
                    )
                if gap > cfg.eps:
                    return V.refuted(
                        {
                            "start": point_to_json(x),
                            "stuck_at": point_to_json(p),
                            "stuck_from": m,
                            "missed_target": point_to_json(t),
                            "gap": gap,
                            "rule": "eventually-fixed-orbit",
                        },
                        "an orbit freezes at a fixed point and misses a cell forever",
                    )
        conf = _rotation_displacements(sys, N)
        if conf is not None:
            disp, tail = conf
            base = _point_coord(t) - _point_coord(x)
            gaps = _dist_arrays(SpaceKind.CIRCLE, np.mod(base - disp, TWO_PI), np.zeros(1))
            future = max(0.0, float(gaps[-1]) - tail)
            if float(gaps.min()) > cfg.eps + cfg.tol and future > cfg.eps + cfg.tol:
                return V.refuted(
                    {
                        "start": point_to_json(x),
                        "missed_target": point_to_json(t),
                        "min_gap": float(gaps.min()),
                        "tail_bound": tail,
                        "rule": "displacement-confinement",
                    },
                    "total rotation displacement is confined, leaving a cell unreachable",
                )
    return V.inconclusive(
        {
            "non_covered_starts": [point_to_json(x) for x, _ in uncovered[:8]],
            "uncovered_count": len(uncovered),
            "horizon": N,
        },
        f"{len(uncovered)} start/cell combinations stayed unvisited at this horizon",
    )


# ---------------------------------------------------------------------------
# recurrence checkers

def check_periodic(
    sys: SystemView, x: Point, cfg: CheckConfig,
    max_period: int | None = None, repetitions: int | None = None,
) -> Verdict:
    """Least n <= P with orbit returns at every multiple n*k, k <= R, within tol.

    Both modes use the same multiple-revisit rule so that autonomous wrappers
    produce identical verdicts in either mode.
    """
    cfg.validate(sys.space)
    P = max_period if max_period is not None else cfg.max_period
    R = repetitions if repetitions is not None else cfg.repetitions
    orbit = sys.orbit(x, P * R)
    gaps = [distance(sys.space, orbit[n], x) for n in range(1, P + 1)]
    for n in range(1, P + 1):
        revisits = [distance(sys.space, orbit[n * k], x) for k in range(1, R + 1)]
        if all(g <= cfg.tol for g in revisits):
            return V.holds(
                {
                    "point": point_to_json(x),
                    "period": n,
                    "revisit_gaps": revisits,
                    "repetitions": R,
                },
                f"orbit returns within {cfg.tol:g} at every multiple of {n}",
            )
    return V.refuted(
        {
            "point": point_to_json(x),
            "max_period": P,
            "min_recurrence_gap": min(gaps),
        },
        f"no period up to {P}; closest return misses by {min(gaps):.3g}",
    )


def _window_descriptor(sys: SystemView, n: int) -> MapDescriptor | None:
    """Canonical composition of maps 1..n, when the algebra supports it."""
    out: MapDescriptor | None = None
    for i in range(1, n + 1):
        step = sys.step_map(i)
        out = step if out is None else compose(step, out)
    if out is None:
        return None
    if sys.space.kind is SpaceKind.CIRCLE:
        return out if circle_canonical(out) is not None else None
    if sys.space.kind is SpaceKind.UNIT_INTERVAL:
        return out if isinstance(out, PiecewiseLinear) else None
    return None


def _periodic_candidates(sys: SystemView, cfg: CheckConfig, P: int) -> list[Point] | None:
    """Solve omega_n(x) = x symbolically for n <= P; None when unsupported."""
    space = sys.space
    if space.kind is SpaceKind.BINARY_SEQ:
        return None
    candidates: list[Point] = []
    for n in range(1, P + 1):
        m = _window_descriptor(sys, n)
        if m is None:
            return None
        if space.kind is SpaceKind.CIRCLE:
            slope, offset = circle_canonical(m)
            fixed = circle_map_fixed_points(slope, offset)
            if fixed is None:
                # identity window: every point qualifies; grid stands in
                candidates.extend(grid_points(space, cfg))
            else:
                candidates.extend(CircleAngle(t) for t in fixed)
        else:
            candidates.extend(IntervalPoint(t) for t in pl_fixed_points(m))
    return candidates


def check_dense_periodicity(
    sys: SystemView, cfg: CheckConfig,
    max_period: int | None = None, repetitions: int | None = None,
) -> Verdict:
    """Every eps-ball on the grid contains a verified periodic point."""
    cfg.validate(sys.space)
    P = max_period if max_period is not None else cfg.max_period
    R = repetitions if repetitions is not None else cfg.repetitions

    # global refutation: a rotation system whose displacements stay away
    # from zero has no periodic points at all
    conf = _rotation_displacements(sys, P * R)
    if conf is not None:
        disp, tail = conf
        gaps = _dist_arrays(SpaceKind.CIRCLE, np.mod(disp, TWO_PI), np.zeros(1))
        if float(gaps.min()) > cfg.tol + tail:
            return V.refuted(
                {
                    "rule": "nonzero-displacement",
                    "min_displacement": float(gaps.min()),
                    "max_period": P,
                },
                "every window rotates by a provably nonzero angle, so no point is periodic",
            )

    candidates = _periodic_candidates(sys, cfg, P)
    centers = grid_points(sys.space, cfg)
    witnesses: list[dict] = []
    unfilled: list[Point] = []
    for c in centers:
        pool: list[Point] = []
        if candidates is not None:
            pool = [p for p in candidates if distance(sys.space, p, c) < cfg.eps]
        pool.extend(_ball_points(sys.space, c, cfg.eps, cfg.ball_count))
        found = None
        for p in pool:
            v = check_periodic(sys, p, cfg, P, R)
            if v.holds:
                found = {"center": point_to_json(c), **v.witness}
                break
        if found is not None:
            witnesses.append(found)
        else:
            unfilled.append(c)
    if not unfilled:
        return V.holds(
            {"balls": len(centers), "witnesses": witnesses[:8], "max_period": P},
            f"every {cfg.eps:g}-ball contains a point of period <= {P}",
        )
    if candidates is not None:
        # the candidate solver is exhaustive for periods <= P, so an empty
        # ball is a genuine counterexample at this period horizon
        for c in unfilled:
            near = [p for p in candidates if distance(sys.space, p, c) < cfg.eps]
            if not near:
                return V.refuted(
                    {
                        "ball_center": point_to_json(c),
                        "radius": cfg.eps,
                        "max_period": P,
                        "rule": "no-candidate-solutions",
                    },
                    f"no solution of any window equation of period <= {P} lies in this ball",
                )
    return V.inconclusive(
        {
            "unfilled_balls": [point_to_json(c) for c in unfilled[:8]],
            "unfilled_count": len(unfilled),
            "max_period": P,
        },
        "some balls produced no verified periodic point at this period horizon",
    )


# ---------------------------------------------------------------------------
# proximality checkers

@dataclass(frozen=True)
class _TailStats:
    """Tail-window statistics of one pair-distance series."""

    tail_min: float
    tail_max: float
    min_time: int
    overall_min: float


def _pair_tail_batch(sys: SystemView, x: Point, ys: list[Point], cfg: CheckConfig) -> list[_TailStats]:
    """Tail stats of d(orbit(x), orbit(y)) for every y, one orbit sweep."""
    N, W = cfg.horizon, cfg.tail_window
    if sys.space.kind is SpaceKind.BINARY_SEQ:
        xv, xd = _bin_orbit_ints(sys, x, N)
        out = []
        for y in ys:
            yv, yd = _bin_orbit_ints(sys, y, N)
            series = _bin_series_ints(xv, xd, yv, yd)
            tail = series[N - W :]
            out.append(
                _TailStats(
                    float(tail.min()),
                    float(tail.max()),
                    int(N - W + int(tail.argmin())),
                    float(series.min()),
                )
            )
        return out
    cols = _coords([x] + ys, sys.space.kind)
    orbits = orbit_matrix(sys, cols, N)
    series = _dist_arrays(sys.space.kind, orbits[:, 1:], orbits[:, :1])
    tail = series[N - W :]
    mins = tail.min(axis=0)
    maxs = tail.max(axis=0)
    args = tail.argmin(axis=0)
    overall = series.min(axis=0)
    return [
        _TailStats(float(mins[j]), float(maxs[j]), int(N - W + args[j]), float(overall[j]))
        for j in range(len(ys))
    ]


def _proximal_decide(
    sys: SystemView, x: Point, y: Point, cfg: CheckConfig, stats: _TailStats | None
) -> Verdict:
    pair = [point_to_json(x), point_to_json(y)]
    if x == y:
        return V.holds(
            {"pair": pair, "tail_min": 0.0, "time": cfg.horizon},
            "identical points stay at distance zero",
        )
    if sys.steps_isometric:
        d0 = distance(sys.space, x, y)
        if d0 >= cfg.eps:
            return V.refuted(
                {"pair": pair, "distance": d0, "rule": "isometric-steps"},
                "isometric steps keep the pair distance constant, never below eps",
            )
        return V.holds(
            {"pair": pair, "tail_min": d0, "time": cfg.horizon},
            "isometric steps keep the pair closer than eps forever",
        )
    if stats is None:
        stats = _pair_tail_batch(sys, x, [y], cfg)[0]
    if stats.tail_min < cfg.eps:
        return V.holds(
            {"pair": pair, "tail_min": stats.tail_min, "time": stats.min_time},
            f"pair distance falls to {stats.tail_min:.3g} inside the tail window",
        )
    return V.inconclusive(
        {
            "pair": pair,
            "tail_min": stats.tail_min,
            "overall_min": stats.overall_min,
            "horizon": cfg.horizon,
        },
        "pair never approached within eps at this horizon",
    )


def _li_yorke_decide(
    sys: SystemView, x: Point, y: Point, cfg: CheckConfig, stats: _TailStats | None
) -> Verdict:
    pair = [point_to_json(x), point_to_json(y)]
    if x == y:
        return V.refuted(
            {"pair": pair, "tail_max": 0.0},
            "identical points have zero spread forever",
        )
    if sys.steps_isometric:
        d0 = distance(sys.space, x, y)
        return V.refuted(
            {"pair": pair, "distance": d0, "rule": "isometric-steps"},
            "a constant pair distance cannot both vanish and exceed delta",
        )
    if stats is None:
        stats = _pair_tail_batch(sys, x, [y], cfg)[0]
    parts = {
        "pair": pair,
        "tail_min": stats.tail_min,
        "tail_max": stats.tail_max,
        "eps": cfg.eps,
        "delta": cfg.delta,
    }
    if stats.tail_min < cfg.eps and stats.tail_max > cfg.delta:
        return V.holds(parts, "the pair both approaches and separates inside the tail window")
    return V.inconclusive(
        {**parts, "horizon": cfg.horizon},
        "tail window does not show both approach and separation",
    )


def proximal_check(sys: SystemView, x: Point, y: Point, cfg: CheckConfig) -> Verdict:
    """Tail-window minimum of the pair distance as a liminf proxy."""
    cfg.validate(sys.space)
    return _proximal_decide(sys, x, y, cfg, None)


def li_yorke_check(sys: SystemView, x: Point, y: Point, cfg: CheckConfig) -> Verdict:
    """Tail min below eps and tail max above delta, components reported."""
    cfg.validate(sys.space)
    return _li_yorke_decide(sys, x, y, cfg, None)


class PairPredicate(str, Enum):
    PROXIMAL = "proximal"
    LI_YORKE = "li_yorke"


def cell_density(sys: SystemView, x: Point, cfg: CheckConfig, predicate: PairPredicate) -> Verdict:
    """Every eps-ball on the grid contains a partner for x under the predicate."""
    cfg.validate(sys.space)
    decide = _proximal_decide if predicate is PairPredicate.PROXIMAL else _li_yorke_decide
    need_series = not sys.steps_isometric
    centers = grid_points(sys.space, cfg)
    found: list[dict] = []
    unfilled: list[tuple[Point, Verdict | None]] = []
    for c in centers:
        pool = _ball_points(sys.space, c, cfg.eps, cfg.ball_count)
        stats = _pair_tail_batch(sys, x, pool, cfg) if need_series else [None] * len(pool)
        best: Verdict | None = None
        partner = None
        for y, st in zip(pool, stats):
            if predicate is PairPredicate.LI_YORKE and y == x:
                continue
            v = decide(sys, x, y, cfg, st)
            if v.holds:
                best, partner = v, y
                break
            if best is None or (v.refuted and not best.refuted):
                best, partner = v, y
        if best is not None and best.holds:
            found.append({"center": point_to_json(c), "partner": point_to_json(partner)})
        else:
            unfilled.append((c, best))
    if not unfilled:
        return V.holds(
            {"balls": len(centers), "witnesses": found[:8], "predicate": predicate.value},
            f"every {cfg.eps:g}-ball contains a {predicate.value} partner",
        )
    refutations = [(c, v) for c, v in unfilled if v is not None and v.refuted]
    if sys.steps_isometric and len(refutations) == len(unfilled):
        c, v = refutations[0]
        return V.refuted(
            {
                "ball_center": point_to_json(c),
                "sample_verdict": v.to_json(),
                "predicate": predicate.value,
            },
            "isometric steps exclude such partners in some balls",
        )
    c, v = unfilled[0]
    return V.inconclusive(
        {
            "unfilled_balls": [point_to_json(c) for c, _ in unfilled[:8]],
            "unfilled_count": len(unfilled),
            "predicate": predicate.value,
        },
        f"{len(unfilled)} balls produced no {predicate.value} partner at this horizon",
    )
