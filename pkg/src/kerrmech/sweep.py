"""Parameter-sweep engine for the figure recipes: cooling maps, hysteresis
traces, branch diagrams, optimal-drive searches and spectrum maps.

Sweeps contain no randomness and assemble results in grid order, so their
output is identical across runs and across worker counts.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (NoStationaryStateError, UnphysicalAbsorptionError,
                     UnphysicalLossError)
from .fluctuations import stationary_occupation
from .model import SystemParams
from .spectrum import spectrum_series
from .steady_state import SteadyState, enumerate_states

__all__ = [
    "SweepAxis",
    "SweepPoint",
    "SweepGrid",
    "Branch",
    "HysteresisTrace",
    "OptimalDrive",
    "SpectrumMap",
    "evaluate_point",
    "grid_sweep",
    "hysteresis_trace",
    "partition_branches",
    "optimal_drive",
    "spectrum_map",
    "find_root_count_window",
]

#: relative nearest-neighbour threshold for branch matching
BRANCH_MATCH_REL = 0.1
#: relative E localization of fold points under bisection refinement
FOLD_REFINE_REL = 1e-6
_MAX_BISECTIONS = 20

_SWEEPABLE = ("omega_m", "kappa0", "gamma_m", "g_L", "g_NL", "delta", "E",
              "n0", "kappa_L")


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter with its grid values."""

    name: str
    values: np.ndarray

    def __post_init__(self):
        if self.name not in _SWEEPABLE:
            raise ValueError(f"unknown sweep parameter {self.name!r}; "
                             f"expected one of {_SWEEPABLE}")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("axis needs at least one value")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_range(cls, name: str, lo: float, hi: float, count: int,
                   scale: str = "linear") -> "SweepAxis":
        if scale == "linear":
            values = np.linspace(lo, hi, count)
        elif scale == "log":
            if lo <= 0 or hi <= 0:
                raise ValueError("log axis needs positive bounds")
            values = np.geomspace(lo, hi, count)
        else:
            raise ValueError(f"unknown axis scale {scale!r}")
        return cls(name, values)


@dataclass
class SweepPoint:
    """All steady states and observables at one grid point."""

    coords: dict
    states: list
    n_phonon: list          # aligned with states; None for non-stable states
    model_valid: list       # |alpha_s|^2 >= 1 per state
    no_physical: bool = False
    no_stable: bool = False
    selected: int | None = None  # branch-followed state (hysteresis mode)


@dataclass
class SweepGrid:
    axis1: SweepAxis
    axis2: SweepAxis
    points: list  # points[i][j] for axis1.values[i], axis2.values[j]


@dataclass
class Branch:
    """One continuously connected steady-state branch along a 1-d sweep."""

    id: int
    coords: list = field(default_factory=list)
    states: list = field(default_factory=list)
    stable_flags: list = field(default_factory=list)

    @property
    def mostly_stable(self) -> bool:
        return sum(self.stable_flags) * 2 > len(self.stable_flags)


@dataclass
class HysteresisTrace:
    up: list            # SweepPoint per ascending E
    down: list          # SweepPoint per descending E
    jumps_up: list      # (E_before, E_after, n_from, n_to), refined locations
    jumps_down: list
    truncated: bool = False  # trace ended early: no stable state anywhere


@dataclass
class OptimalDrive:
    E_opt: float
    n_min: float
    state: SteadyState | None
    photon_number: float
    model_valid: bool
    multimodal: bool = False
    found: bool = True


@dataclass
class SpectrumMap:
    outer_name: str
    outer_values: np.ndarray
    nu_grid: np.ndarray
    s_total: np.ndarray          # shape (n_outer, n_nu), NaN where no stable state
    dressed: list                # per outer point, array of dressed frequencies
    selected_n: np.ndarray       # photon number of the followed state (NaN markers)


def _set(params: SystemParams, **overrides) -> SystemParams:
    return replace(params, **overrides)


def evaluate_point(params: SystemParams, coords: dict | None = None) -> SweepPoint:
    """Enumerate, classify and weigh up all steady states at one parameter
    point; failures of the fluctuation pipeline become markers, not errors."""
    try:
        states = enumerate_states(params)
    except UnphysicalLossError:
        states = []
    point = SweepPoint(coords=dict(coords or {}), states=states,
                       n_phonon=[], model_valid=[])
    if not states:
        point.no_physical = True
        point.no_stable = True
        return point
    for state in states:
        point.model_valid.append(state.n_s >= 1.0)
        if state.stability is not None and state.stability.is_stable:
            try:
                point.n_phonon.append(stationary_occupation(state, params))
            except (NoStationaryStateError, UnphysicalAbsorptionError,
                    ArithmeticError):
                point.n_phonon.append(None)
        else:
            point.n_phonon.append(None)
    point.no_stable = all(n is None for n in point.n_phonon)
    return point


def grid_sweep(params_template: SystemParams, axis1: SweepAxis,
               axis2: SweepAxis, threads: int = 1) -> SweepGrid:
    """Evaluate the full cartesian grid; points are independent and may be
    evaluated concurrently, with deterministic assembly order."""
    tasks = []
    for v1 in axis1.values:
        for v2 in axis2.values:
            overrides = {axis1.name: v1, axis2.name: v2}
            tasks.append((overrides, _set(params_template, **overrides)))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flat = list(pool.map(lambda t: evaluate_point(t[1], t[0]), tasks))
    else:
        flat = [evaluate_point(p, c) for c, p in tasks]
    n2 = axis2.values.size
    rows = [flat[i * n2:(i + 1) * n2] for i in range(axis1.values.size)]
    return SweepGrid(axis1=axis1, axis2=axis2, points=rows)


def _stable_indices(point: SweepPoint) -> list[int]:
    return [i for i, s in enumerate(point.states)
            if s.stability is not None and s.stability.is_stable]


def _nearest_stable(point: SweepPoint, n_prev: float) -> int | None:
    stable = _stable_indices(point)
    if not stable:
        return None
    return min(stable, key=lambda i: abs(point.states[i].n_s - n_prev))


def _continuous(n_prev: float, n_new: float) -> bool:
    if n_prev <= 0:
        return True  # growing out of the vacuum state
    return 0.5 * n_prev <= n_new <= 2.0 * n_prev


def _advance(params: SystemParams, e0: float, n0: float, e1: float,
             jumps: list, depth: int = 0) -> float | None:
    """Follow the occupied branch from drive e0 (photon number n0) to e1.

    The step is bisected whenever the nearest stable state moves by more
    than a factor 2, so steep-but-continuous branch segments are followed
    through while genuine fold jumps are localized to FOLD_REFINE_REL in E
    and recorded as (E_jump, n_before, n_after).  Returns the followed
    photon number at e1, or None if no stable state remains.
    """
    point = evaluate_point(_set(params, E=e1))
    sel = _nearest_stable(point, n0)
    if sel is not None and _continuous(n0, point.states[sel].n_s):
        return point.states[sel].n_s
    if depth >= _MAX_BISECTIONS or (
            abs(e1 - e0) <= FOLD_REFINE_REL * max(abs(e0), abs(e1))):
        n_new = point.states[sel].n_s if sel is not None else None
        jumps.append((0.5 * (e0 + e1), n0, n_new))
        return n_new
    mid = 0.5 * (e0 + e1)
    n_mid = _advance(params, e0, n0, mid, jumps, depth + 1)
    if n_mid is None:
        return None
    return _advance(params, mid, n_mid, e1, jumps, depth + 1)


def hysteresis_trace(params_template: SystemParams,
                     E_grid_up: np.ndarray) -> HysteresisTrace:
    """Quasi-static drive sweep, E up then down, following the stable state
    nearest in photon number and jumping to the nearest remaining stable
    state when the occupied branch is lost (first-order transition).

    Jump records carry (refined drive, photon number before, after)."""
    E_grid_up = np.asarray(E_grid_up, dtype=float)
    if np.any(np.diff(E_grid_up) <= 0):
        raise ValueError("E grid must be strictly ascending")

    def _run(grid, n_prev):
        points, jumps = [], []
        truncated = False
        for idx, E in enumerate(grid):
            point = evaluate_point(_set(params_template, E=E), {"E": E})
            if n_prev is None:
                cands = _stable_indices(point)
                sel = (min(cands, key=lambda i: point.states[i].n_s)
                       if cands else None)
                if sel is None:
                    truncated = True
                    points.append(point)
                    break
            else:
                n_prev = _advance(params_template, grid[idx - 1], n_prev, E,
                                  jumps)
                if n_prev is None:
                    truncated = True
                    points.append(point)
                    break
                sel = _nearest_stable(point, n_prev)
            point.selected = sel
            points.append(point)
            n_prev = point.states[sel].n_s
        return points, jumps, truncated, n_prev

    up, jumps_up, trunc_up, n_last = _run(E_grid_up, None)
    down, jumps_down, trunc_down, _ = _run(E_grid_up[::-1], n_last)
    return HysteresisTrace(up=up, down=down, jumps_up=jumps_up,
                           jumps_down=jumps_down,
                           truncated=trunc_up or trunc_down)


def _log_distance(n1: float, n2: float) -> float:
    return abs(np.log((n1 + 1e-30) / (n2 + 1e-30)))


def _align_sorted(prev: list[float], cur: list[float]) -> list[tuple[int, int]]:
    """Order-preserving minimum-cost alignment of two ascending photon-number
    lists; min(len) pairs are matched.  Branches of one polynomial cannot
    cross as the drive varies, so preserving the n-order is exact and far
    more robust than thresholded nearest-neighbour matching on coarse grids.
    """
    from itertools import combinations
    m, k = len(prev), len(cur)
    if m == 0 or k == 0:
        return []
    if m == k:
        return list(zip(range(m), range(k)))
    if m > k:
        best, best_cost = None, np.inf
        for dropped in combinations(range(m), m - k):
            kept = [i for i in range(m) if i not in dropped]
            cost = sum(_log_distance(prev[i], cur[j])
                       for i, j in zip(kept, range(k)))
            if cost < best_cost:
                best_cost, best = cost, list(zip(kept, range(k)))
        return best
    pairs = _align_sorted(cur, prev)
    return [(j, i) for i, j in pairs]


def partition_branches(points: list[SweepPoint],
                       rel_threshold: float = BRANCH_MATCH_REL) -> list[Branch]:
    """Partition the states of a 1-d sweep into continuous branches.

    Adjacent grid points are matched by the order-preserving alignment of
    their photon numbers; every state of every point lands in exactly one
    branch.  ``rel_threshold`` flags ambiguous alignments (two branches
    closer to each other than to their continuations), which indicates the
    grid needs refinement.  Branch ids are assigned in ascending
    characteristic photon number.
    """
    open_branches: list[Branch] = []
    closed: list[Branch] = []
    for point in points:
        coord = next(iter(point.coords.values())) if point.coords else 0.0
        open_branches.sort(key=lambda b: b.states[-1].n_s)
        prev_ns = [b.states[-1].n_s for b in open_branches]
        cur_ns = [s.n_s for s in point.states]
        pairs = _align_sorted(prev_ns, cur_ns)
        taken_b = {i for i, _ in pairs}
        taken_s = {j for _, j in pairs}
        for bi, si in pairs:
            branch = open_branches[bi]
            state = point.states[si]
            branch.coords.append(coord)
            branch.states.append(state)
            branch.stable_flags.append(bool(state.stability and
                                            state.stability.is_stable))
        survivors = []
        for bi, branch in enumerate(open_branches):
            (survivors if bi in taken_b else closed).append(branch)
        open_branches = survivors
        for si, state in enumerate(point.states):
            if si in taken_s:
                continue
            branch = Branch(id=-1, coords=[coord], states=[state],
                            stable_flags=[bool(state.stability and
                                               state.stability.is_stable)])
            open_branches.append(branch)
    closed.extend(open_branches)
    closed = [b for b in closed if b.states]
    closed.sort(key=lambda b: np.median([s.n_s for s in b.states]))
    for i, branch in enumerate(closed):
        branch.id = i + 1
    return closed


def optimal_drive(params_template: SystemParams,
                  E_range: tuple[float, float], coarse: int = 64,
                  refine_iters: int = 40) -> OptimalDrive:
    """Minimize the phonon number over the drive strength.

    Coarse scan first (guards against multimodality, which is reported),
    then golden-section refinement of the smooth valley.
    """
    e_lo, e_hi = E_range
    if not np.isfinite(e_lo) or not np.isfinite(e_hi) or e_hi < e_lo:
        raise ValueError("E range must be finite with max >= min")

    def best_n(E):
        point = evaluate_point(_set(params_template, E=E))
        candidates = [(n, i) for i, n in enumerate(point.n_phonon)
                      if n is not None]
        if not candidates:
            return np.inf, None, point
        n, i = min(candidates)
        return n, i, point

    if e_hi == e_lo:
        n, i, point = best_n(e_lo)
        if i is None:
            return OptimalDrive(e_lo, np.inf, None, np.nan, False, found=False)
        state = point.states[i]
        return OptimalDrive(e_lo, n, state, state.n_s, state.n_s >= 1.0)

    grid = np.linspace(e_lo, e_hi, coarse)
    values = [best_n(E)[0] for E in grid]
    finite = [v for v in values if np.isfinite(v)]
    if not finite:
        return OptimalDrive(np.nan, np.inf, None, np.nan, False, found=False)
    k = int(np.argmin(values))
    minima = sum(1 for i in range(1, coarse - 1)
                 if values[i] < values[i - 1] and values[i] < values[i + 1]
                 and np.isfinite(values[i]))
    multimodal = minima > 1

    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, coarse - 1)]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = best_n(x1)[0], best_n(x2)[0]
    for _ in range(refine_iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = best_n(x1)[0]
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = best_n(x2)[0]
    e_opt = 0.5 * (lo + hi)
    n_opt, i_opt, point = best_n(e_opt)
    if i_opt is None or not np.isfinite(n_opt):
        e_opt = grid[k]
        n_opt, i_opt, point = best_n(e_opt)
    state = point.states[i_opt] if i_opt is not None else None
    photon = state.n_s if state is not None else np.nan
    return OptimalDrive(float(e_opt), float(n_opt), state, photon,
                        bool(photon >= 1.0), multimodal)


def spectrum_map(params_template: SystemParams, outer_axis: SweepAxis,
                 nu_grid: np.ndarray) -> SpectrumMap:
    """Spectrum versus an outer parameter (detuning or drive), following
    the stable branch continuously; dressed drift-matrix frequencies are
    emitted alongside so avoided crossings can be overlaid."""
    nu_grid = np.asarray(nu_grid, dtype=float)
    n_outer = outer_axis.values.size
    s = np.full((n_outer, nu_grid.size), np.nan)
    dressed: list[np.ndarray] = []
    selected_n = np.full(n_outer, np.nan)
    n_prev = None
    for i, value in enumerate(outer_axis.values):
        params = _set(params_template, **{outer_axis.name: value})
        point = evaluate_point(params)
        sel = (_nearest_stable(point, n_prev) if n_prev is not None
               else (min(_stable_indices(point),
                         key=lambda j: point.states[j].n_s)
                     if _stable_indices(point) else None))
        if sel is None:
            dressed.append(np.empty(0))
            continue
        state = point.states[sel]
        n_prev = state.n_s
        selected_n[i] = state.n_s
        series = spectrum_series(nu_grid, state, params)
        s[i, :] = [p.s_total for p in series]
        dressed.append(np.asarray(state.stability.dressed_frequencies))
    return SpectrumMap(outer_name=outer_axis.name,
                       outer_values=outer_axis.values, nu_grid=nu_grid,
                       s_total=s, dressed=dressed, selected_n=selected_n)


def find_root_count_window(params_template: SystemParams, e_lo: float,
                           e_hi: float, target_count: int,
                           coarse: int = 256) -> tuple[float, float] | None:
    """Scan the drive for a window with the requested number of steady
    states; edges are refined by bisection.  Returns None if absent."""
    grid = np.linspace(e_lo, e_hi, coarse)
    counts = [len(enumerate_states(_set(params_template, E=E), classify=False))
              for E in grid]
    hits = [i for i, c in enumerate(counts) if c == target_count]
    if not hits:
        return None
    i0, i1 = hits[0], hits[-1]

    def _edge(e_out, e_in):
        for _ in range(_MAX_BISECTIONS):
            if abs(e_in - e_out) <= FOLD_REFINE_REL * max(abs(e_in), abs(e_out), 1e-300):
                break
            mid = 0.5 * (e_out + e_in)
            c = len(enumerate_states(_set(params_template, E=mid),
                                     classify=False))
            if c == target_count:
                e_in = mid
            else:
                e_out = mid
        return e_in

    left = _edge(grid[i0 - 1], grid[i0]) if i0 > 0 else grid[0]
    right = _edge(grid[i1 + 1], grid[i1]) if i1 + 1 < coarse else grid[-1]
    return left, right
