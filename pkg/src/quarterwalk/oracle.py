"""Reference values by exact dynamic programming on a truncated lattice, and Monte Carlo.

The forward recursion moves the whole interior distribution one step at a
time. Mass reaching ``j = 0`` or ``i = 0`` is recorded as absorbed; mass
leaving a capped grid is kept in an ``escaped`` counter so that nothing
is dropped silently.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as sparse_linalg

from .errors import CapTooSmall
from .walk import StartPoint, WalkParams

ACC = np.longdouble


@dataclass
class _Step:
    n: int
    plane: np.ndarray  # interior mass, indices [i, j] with the axes in row/column 0
    hit_x: np.ndarray  # absorbed at (i, 0) at this step, index i
    hit_y: np.ndarray  # absorbed at (0, j) at this step, index j
    escaped: float  # mass leaving the grid at this step


def _grid_shape(start: StartPoint, n_cap: int, grid_cap: int | tuple[int, int] | None) -> tuple[int, int]:
    if grid_cap is None:
        return start.n0 + n_cap, start.m0 + n_cap
    if isinstance(grid_cap, int):
        grid_cap = (grid_cap, grid_cap)
    size_i, size_j = grid_cap
    if size_i < start.n0 or size_j < start.m0:
        raise CapTooSmall(f"grid {grid_cap} does not contain the start point {start}")
    return size_i, size_j


def _evolve(
    params: WalkParams, start: StartPoint, n_cap: int, grid: tuple[int, int]
) -> Iterator[_Step]:
    """Yield the state after each of the steps 1..n_cap."""
    size_i, size_j = grid
    cur = np.zeros((size_i + 2, size_j + 2), dtype=ACC)
    cur[start.n0, start.m0] = 1
    pe, pw, pn, ps = (ACC(v) for v in (params.p_e, params.p_w, params.p_n, params.p_s))
    for n in range(1, n_cap + 1):
        nxt = np.zeros_like(cur)
        # after n steps the mass sits in i <= n0 + n, j <= m0 + n
        ei = min(size_i + 2, start.n0 + n + 1)
        ej = min(size_j + 2, start.m0 + n + 1)
        src, dst = cur[:ei, :ej], nxt[:ei, :ej]
        dst[1:, :] += pe * src[:-1, :]
        dst[:-1, :] += pw * src[1:, :]
        dst[:, 1:] += pn * src[:, :-1]
        dst[:, :-1] += ps * src[:, 1:]
        hit_x = nxt[:, 0].copy()
        hit_y = nxt[0, :].copy()
        escaped = nxt[size_i + 1, :].sum() + nxt[: size_i + 1, size_j + 1].sum()
        nxt[:, 0] = 0
        nxt[0, :] = 0
        nxt[size_i + 1, :] = 0
        nxt[:, size_j + 1] = 0
        cur = nxt
        yield _Step(n, cur, hit_x[: size_i + 1], hit_y[: size_j + 1], float(escaped))


@dataclass
class AbsorptionTable:
    """Absorption probabilities per site and time.

    ``h[i, n]`` is the probability of first reaching the boundary at
    ``(i, 0)`` at time ``n``; ``h_tilde[j, n]`` the same at ``(0, j)``.
    """

    params: WalkParams
    start: StartPoint
    i_cap: int
    j_cap: int
    n_cap: int
    grid: tuple[int, int]
    h: np.ndarray
    h_tilde: np.ndarray
    interior_mass: float
    escaped_mass: float
    beyond_cap_mass: float

    @property
    def tail_mass(self) -> float:
        return self.interior_mass + self.escaped_mass + self.beyond_cap_mass

    def caps(self) -> dict[str, object]:
        return {"i_cap": self.i_cap, "j_cap": self.j_cap, "n_cap": self.n_cap, "grid": list(self.grid)}

    def site_totals(self) -> tuple[np.ndarray, np.ndarray]:
        """Probability of absorption at each site within the time cap."""
        return self.h.sum(axis=1), self.h_tilde.sum(axis=1)


def dp_absorption(
    params: WalkParams,
    start: StartPoint,
    i_cap: int,
    n_cap: int,
    j_cap: int | None = None,
    grid_cap: int | tuple[int, int] | None = None,
) -> AbsorptionTable:
    if i_cap < 1 or n_cap < 1:
        raise CapTooSmall("caps must be at least 1")
    j_cap = i_cap if j_cap is None else j_cap
    grid = _grid_shape(start, n_cap, grid_cap)
    if i_cap > grid[0] or j_cap > grid[1]:
        raise CapTooSmall(f"site caps ({i_cap}, {j_cap}) exceed the grid {grid}")
    h = np.zeros((i_cap + 1, n_cap + 1))
    h_tilde = np.zeros((j_cap + 1, n_cap + 1))
    beyond = ACC(0)
    escaped = ACC(0)
    plane = None
    for step in _evolve(params, start, n_cap, grid):
        h[:, step.n] = step.hit_x[: i_cap + 1]
        h_tilde[:, step.n] = step.hit_y[: j_cap + 1]
        beyond += step.hit_x[i_cap + 1 :].sum() + step.hit_y[j_cap + 1 :].sum()
        escaped += step.escaped
        plane = step.plane
    return AbsorptionTable(
        params=params,
        start=start,
        i_cap=i_cap,
        j_cap=j_cap,
        n_cap=n_cap,
        grid=grid,
        h=h,
        h_tilde=h_tilde,
        interior_mass=float(plane.sum()),
        escaped_mass=float(escaped),
        beyond_cap_mass=float(beyond),
    )


@dataclass
class TauTail:
    """Distributions of the hitting times of the two axes and of the boundary.

    ``survival[n]`` is the probability that neither axis has been reached
    by time ``n``. Mass that left a capped grid counts as surviving and is
    reported in ``escaped`` as well.
    """

    s: np.ndarray
    t: np.ndarray
    survival: np.ndarray
    escaped: np.ndarray

    @property
    def n_cap(self) -> int:
        return len(self.survival) - 1


def dp_tau(
    params: WalkParams,
    start: StartPoint,
    n_cap: int,
    grid_cap: int | tuple[int, int] | None = None,
) -> TauTail:
    if n_cap < 1:
        raise CapTooSmall("n_cap must be at least 1")
    grid = _grid_shape(start, n_cap, grid_cap)
    s = np.zeros(n_cap + 1)
    t = np.zeros(n_cap + 1)
    survival = np.zeros(n_cap + 1)
    escaped = np.zeros(n_cap + 1)
    survival[0] = 1.0
    total_escaped = ACC(0)
    for step in _evolve(params, start, n_cap, grid):
        s[step.n] = float(step.hit_x.sum())
        t[step.n] = float(step.hit_y.sum())
        total_escaped += step.escaped
        escaped[step.n] = float(total_escaped)
        survival[step.n] = float(step.plane.sum() + total_escaped)
    return TauTail(s=s, t=t, survival=survival, escaped=escaped)


@dataclass
class GreenTable:
    """Expected visit counts ``G[i, j]`` for the interior sites of a finite grid.

    ``residual_bound`` is the probability mass not yet resolved when the
    computation stopped: mass still alive at the time cap for the
    time-stepping engine, or mass that left the box for the stationary one.
    """

    params: WalkParams
    start: StartPoint
    grid: tuple[int, int]
    n_cap: int | None
    G: np.ndarray
    residual_bound: float
    method: str = "time"

    def caps(self) -> dict[str, object]:
        return {"grid": list(self.grid), "n_cap": self.n_cap, "method": self.method}

    def diagonal_sum(self, a: int, k: int) -> float:
        """Sum of ``G`` over the interior sites with ``i - 1 + a (j - 1) = k``."""
        total = 0.0
        for j in range(1, self.grid[1] + 1):
            i = k + 1 - a * (j - 1)
            if i < 1:
                break
            if i <= self.grid[0]:
                total += self.G[i, j]
            elif a == 0:
                break
        return total


def dp_green(
    params: WalkParams,
    start: StartPoint,
    grid_cap: int | tuple[int, int],
    n_cap: int,
) -> GreenTable:
    """Visit counts summed over times 0..n_cap by forward evolution."""
    if n_cap < 1:
        raise CapTooSmall("n_cap must be at least 1")
    grid = _grid_shape(start, n_cap, grid_cap)
    acc = np.zeros((grid[0] + 2, grid[1] + 2), dtype=ACC)
    acc[start.n0, start.m0] = 1
    plane = acc.copy()
    escaped = ACC(0)
    for step in _evolve(params, start, n_cap, grid):
        acc += step.plane
        plane = step.plane
        escaped += step.escaped
    G = np.asarray(acc[: grid[0] + 1, : grid[1] + 1], dtype=float)
    return GreenTable(params, start, grid, n_cap, G, float(plane.sum() + escaped), "time")


def green_box(params: WalkParams, start: StartPoint, box: int | tuple[int, int]) -> GreenTable:
    """Visit counts for the walk also killed on leaving a finite box.

    This is the infinite-time limit of :func:`dp_green` on that box,
    obtained from the sparse linear system ``G (I - P) = e_start``.
    ``residual_bound`` is the probability of leaving the box.
    """
    size_i, size_j = _grid_shape(start, 0, box)
    ii, jj = np.meshgrid(np.arange(size_i), np.arange(size_j), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    index = ii * size_j + jj
    rows, cols, vals = [], [], []
    for di, dj, p in ((1, 0, params.p_e), (-1, 0, params.p_w), (0, 1, params.p_n), (0, -1, params.p_s)):
        ni, nj = ii + di, jj + dj
        inside = (ni >= 0) & (ni < size_i) & (nj >= 0) & (nj < size_j)
        rows.append(index[inside])
        cols.append(ni[inside] * size_j + nj[inside])
        vals.append(np.full(int(inside.sum()), p))
    size = size_i * size_j
    transition = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    )
    system = (sparse.identity(size, format="csr") - transition).T.tocsc()
    rhs = np.zeros(size)
    rhs[(start.n0 - 1) * size_j + (start.m0 - 1)] = 1.0
    visits = sparse_linalg.spsolve(system, rhs).reshape(size_i, size_j)
    G = np.zeros((size_i + 1, size_j + 1))
    G[1:, 1:] = visits
    left = params.p_e * visits[-1, :].sum() + params.p_n * visits[:, -1].sum()
    return GreenTable(params, start, (size_i, size_j), None, G, float(left), "box")


def dp_genfunc(
    params: WalkParams,
    start: StartPoint,
    x: complex,
    z: complex,
    n_cap: int,
    grid_cap: int | tuple[int, int] | None = None,
) -> tuple[complex, float]:
    """Partial sum of ``sum_{i,n} h[i, n] x^i z^n`` and a bound on what is missing.

    Requires ``|x| <= 1`` and ``|z| <= 1``. Terms not yet resolved at the
    time cap come with a factor of modulus at most ``|z|^(n_cap + 1)``; mass
    that left a capped grid is bounded by its total.
    """
    partial, _, alive, escaped = _genfunc_sums(params, start, x, z, n_cap, grid_cap)
    return partial, alive * abs(z) ** (n_cap + 1) + escaped


def _genfunc_sums(
    params: WalkParams,
    start: StartPoint,
    x: complex,
    z: complex,
    n_cap: int,
    grid_cap: int | tuple[int, int] | None,
    y: complex | None = None,
) -> tuple[complex, complex, float, float]:
    grid = _grid_shape(start, n_cap, grid_cap)
    x_pow = np.asarray(x, dtype=complex) ** np.arange(grid[0] + 1)
    y_pow = np.asarray(x if y is None else y, dtype=complex) ** np.arange(grid[1] + 1)
    h_sum = 0j
    h_tilde_sum = 0j
    escaped = 0.0
    alive = 1.0
    for step in _evolve(params, start, n_cap, grid):
        zn = z**step.n
        h_sum += zn * complex(np.dot(step.hit_x.astype(float), x_pow))
        h_tilde_sum += zn * complex(np.dot(step.hit_y.astype(float), y_pow))
        escaped += step.escaped
        alive = float(step.plane.sum())
    return h_sum, h_tilde_sum, alive, escaped


def dp_genfunc_both(
    params: WalkParams,
    start: StartPoint,
    x: complex,
    y: complex,
    z: complex,
    n_cap: int,
    grid_cap: int | tuple[int, int] | None = None,
) -> dict[str, complex | float]:
    """Partial sums of ``h(x, z)``, ``h_tilde(y, z)`` and ``G(x, y, z)`` with a common bound.

    ``G`` is the time-indexed generating function
    ``sum_n z^n sum_{i,j} P(X_n = i, Y_n = j) x^(i-1) y^(j-1)``.
    """
    grid = _grid_shape(start, n_cap, grid_cap)
    x_pow = complex(x) ** np.arange(grid[0] + 2)
    y_pow = complex(y) ** np.arange(grid[1] + 2)
    g_weights = np.outer(np.r_[0, x_pow[: grid[0] + 1]], np.r_[0, y_pow[: grid[1] + 1]])
    g_sum = x_pow[start.n0 - 1] * y_pow[start.m0 - 1]
    h_sum = 0j
    h_tilde_sum = 0j
    escaped = 0.0
    alive = 1.0
    for step in _evolve(params, start, n_cap, grid):
        zn = z**step.n
        h_sum += zn * complex(np.dot(step.hit_x.astype(float), x_pow[: grid[0] + 1]))
        h_tilde_sum += zn * complex(np.dot(step.hit_y.astype(float), y_pow[: grid[1] + 1]))
        g_sum += zn * complex(np.sum(step.plane.astype(float) * g_weights))
        escaped += step.escaped
        alive = float(step.plane.sum())
        last_plane = step.plane
    # exact remainder of the one-step recursion truncated at n_cap
    weights = np.asarray(last_plane, dtype=float)[: grid[0] + 1, : grid[1] + 1] * g_weights[: grid[0] + 1, : grid[1] + 1]
    occupation = complex(np.sum(weights))
    step_sum = params.p_e * x + params.p_w / x + params.p_n * y + params.p_s / y if x != 0 and y != 0 else 0.0
    boundary_term = z ** (n_cap + 1) * x * y * step_sum * occupation
    return {
        "boundary_term": boundary_term,
        "h": h_sum,
        "h_tilde": h_tilde_sum,
        "G": g_sum,
        "alive": alive,
        "escaped": escaped,
        "tail_bound": alive * abs(z) ** (n_cap + 1) + escaped,
    }


def gambler_dp(p_n: float, p_s: float, m0: int, n_cap: int) -> np.ndarray:
    """``P(ruin at step k)`` for ``k = 0..n_cap`` of the walk on the half-line.

    Up with probability ``p_n``, down with ``p_s``, otherwise stay. Start at
    ``m0``, absorbed at 0.
    """
    if p_n < 0 or p_s < 0 or p_n + p_s > 1 + 1e-12:
        raise ValueError("need p_n, p_s >= 0 with p_n + p_s <= 1")
    hold = 1.0 - p_n - p_s
    cur = np.zeros(m0 + n_cap + 2, dtype=ACC)
    cur[m0] = 1
    ruin = np.zeros(n_cap + 1)
    for k in range(1, n_cap + 1):
        nxt = hold * cur
        nxt[1:] += p_n * cur[:-1]
        nxt[:-1] += p_s * cur[1:]
        ruin[k] = float(nxt[0])
        nxt[0] = 0
        cur = nxt
    return ruin


@dataclass(frozen=True)
class McConfig:
    seed: int
    n_walks: int
    step_cap: int
    block_size: int = 4096

    def __post_init__(self) -> None:
        if self.n_walks < 1:
            raise ValueError("n_walks must be at least 1")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_walks: int


def _mc_block(
    params: WalkParams,
    start: StartPoint,
    rng: np.random.Generator,
    count: int,
    step_cap: int,
    functional: Sequence,
) -> np.ndarray:
    kind = functional[0]
    x = np.full(count, start.n0, dtype=np.int64)
    y = np.full(count, start.m0, dtype=np.int64)
    alive = np.ones(count, dtype=bool)
    hit_time = np.full(count, -1, dtype=np.int64)
    score = np.zeros(count)
    if kind == "visits":
        score += (x == functional[1]) & (y == functional[2])
    edges = np.cumsum([params.p_e, params.p_w, params.p_n])
    for n in range(1, step_cap + 1):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        u = rng.random(idx.size)
        move = np.searchsorted(edges, u, side="right")
        x[idx] += np.where(move == 0, 1, np.where(move == 1, -1, 0))
        y[idx] += np.where(move == 2, 1, np.where(move == 3, -1, 0))
        done = idx[(x[idx] == 0) | (y[idx] == 0)]
        hit_time[done] = n
        alive[done] = False
        if kind == "visits":
            still = idx[alive[idx]]
            score[still] += (x[still] == functional[1]) & (y[still] == functional[2])
    on_x = (y == 0) & (hit_time > 0)
    on_y = (x == 0) & (hit_time > 0)
    if kind == "site":
        return (on_x & (x == functional[1])).astype(float)
    if kind == "S":
        return (on_x & (hit_time == functional[1])).astype(float)
    if kind == "T":
        return (on_y & (hit_time == functional[1])).astype(float)
    if kind == "tau_gt":
        return ((hit_time < 0) | (hit_time > functional[1])).astype(float)
    if kind == "visits":
        return score
    raise ValueError(f"unknown functional {functional!r}")


def mc_estimate(
    params: WalkParams, start: StartPoint, cfg: McConfig, functional: Sequence
) -> McEstimate:
    """Monte Carlo mean and standard error of a per-walk functional.

    ``functional`` is one of ``("site", i)``, ``("S", k)``, ``("T", k)``,
    ``("tau_gt", n)`` or ``("visits", i, j)``. Walks are simulated in blocks
    whose random streams are keyed by ``(seed, block index)``, so results
    depend only on the configuration.
    """
    samples = []
    n_blocks = math.ceil(cfg.n_walks / cfg.block_size)
    for block in range(n_blocks):
        count = min(cfg.block_size, cfg.n_walks - block * cfg.block_size)
        seq = np.random.SeedSequence(entropy=cfg.seed, spawn_key=(block,))
        rng = np.random.Generator(np.random.Philox(seq))
        samples.append(_mc_block(params, start, rng, count, cfg.step_cap, functional))
    values = np.concatenate(samples)
    stderr = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.inf
    return McEstimate(float(values.mean()), stderr, int(values.size))


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _metadata(params: WalkParams, start: StartPoint, caps: dict, extra: dict | None = None) -> dict:
    meta = {"params": params.as_dict(), "start": {"n0": start.n0, "m0": start.m0}, "caps": caps}
    if extra:
        meta.update(extra)
    return meta


def absorption_to_csv(table: AbsorptionTable, axis: str = "x") -> str:
    data = table.h if axis == "x" else table.h_tilde
    label = "i" if axis == "x" else "j"
    out = io.StringIO()
    meta = _metadata(table.params, table.start, table.caps(), {"tail_mass": table.tail_mass})
    out.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([label, "n", "value"])
    for site in range(1, data.shape[0]):
        for n in range(data.shape[1]):
            if data[site, n] != 0.0:
                writer.writerow([site, n, _fmt(data[site, n])])
    return out.getvalue()


def absorption_to_json(table: AbsorptionTable) -> str:
    payload = _metadata(table.params, table.start, table.caps())
    payload["tail_mass"] = table.tail_mass
    payload["data"] = {"h": table.h.tolist(), "h_tilde": table.h_tilde.tolist()}
    return json.dumps(payload, sort_keys=True)


def green_to_csv(table: GreenTable) -> str:
    out = io.StringIO()
    meta = _metadata(table.params, table.start, table.caps(), {"tail_mass": table.residual_bound})
    out.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["i", "j", "value"])
    for i in range(1, table.G.shape[0]):
        for j in range(1, table.G.shape[1]):
            writer.writerow([i, j, _fmt(table.G[i, j])])
    return out.getvalue()


def green_to_json(table: GreenTable) -> str:
    payload = _metadata(table.params, table.start, table.caps())
    payload["tail_mass"] = table.residual_bound
    payload["data"] = table.G[1:, 1:].tolist()
    return json.dumps(payload, sort_keys=True)
