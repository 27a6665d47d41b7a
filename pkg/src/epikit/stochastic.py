"""Exact stochastic simulation of the SIR reaction network.

Reactions per cell (mass action):

    S + I -> 2 I    a = k1 S I
    I -> 0          a = k2 I       (removal, split into recovered/dead by g)
    S -> 0          a = k3 S
    0 -> S          a = k4

plus nearest-neighbour hops of S and I at rate ``d`` per particle on a 1-D
chain of cells with reflective ends (no hop channel leaves the chain).

Rate constants are mapped from the density model with cell volume ``V`` and
population scale ``Omega`` (individuals per unit density):
``k1 = lam / (Omega V)``, ``k2 = mu``, ``k3 = nu``, ``k4 = f Omega V`` and
``d = D / h**2`` for hops of length ``h = V``.

Propensities sit in a flat list and only those touched by the fired reaction
are recomputed. A binary tree over the list is the drop-in upgrade if systems
grow well past ~1e4 channels.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import Extinction
from .spatial import SpatialParams

SPECIES = ("S", "I")
_BLOCK = 4096

# accumulator codes for the fired reaction
_NONE, _INFECT, _REMOVE = 0, 1, 2


@dataclass(frozen=True)
class Reaction:
    label: str
    rate: float
    reactants: tuple[int, ...]
    stoich: tuple[tuple[int, int], ...]
    cell: int = 0
    kind: int = _NONE

    def propensity(self, counts) -> float:
        a = self.rate
        for idx in self.reactants:
            a *= counts[idx]
        return float(a)


@dataclass
class ReactionSystem:
    reactions: list[Reaction]
    n_cells: int
    death_fraction: float = 0.0
    dependents: list[list[int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.dependents:
            readers: dict[int, list[int]] = {}
            for j, rx in enumerate(self.reactions):
                for idx in set(rx.reactants):
                    readers.setdefault(idx, []).append(j)
            self.dependents = [
                sorted({d for idx, _ in rx.stoich for d in readers.get(idx, [])})
                for rx in self.reactions
            ]

    def __len__(self) -> int:
        return len(self.reactions)

    def propensities(self, counts) -> np.ndarray:
        return np.array([rx.propensity(counts) for rx in self.reactions])


def species_index(cell: int, species: str) -> int:
    return 2 * cell + SPECIES.index(species)


def build_sir_reactions(p: SpatialParams, cells: int = 1, cell_volume: float = 1.0,
                        population_scale: float = 1.0) -> ReactionSystem:
    if cells < 1:
        raise ValueError("need at least one cell")
    scale = population_scale * cell_volume
    k1 = p.lam / scale
    k4 = p.f_source * scale
    hop = {"S": p.d_s / cell_volume ** 2, "I": p.d_i / cell_volume ** 2}
    reactions = []
    for c in range(cells):
        s, i = species_index(c, "S"), species_index(c, "I")
        reactions += [
            Reaction("infect", k1, (s, i), ((s, -1), (i, 1)), c, _INFECT),
            Reaction("remove", p.mu, (i,), ((i, -1),), c, _REMOVE),
            Reaction("death_S", p.nu, (s,), ((s, -1),), c),
            Reaction("birth_S", k4, (), ((s, 1),), c),
        ]
    for c in range(cells):
        for sp in SPECIES:
            src = species_index(c, sp)
            for step, name in ((-1, "left"), (1, "right")):
                dst = c + step
                if 0 <= dst < cells:
                    reactions.append(Reaction(f"hop_{sp}_{name}", hop[sp], (src,),
                                              ((src, -1), (species_index(dst, sp), 1)), c))
    return ReactionSystem(reactions, cells, p.g)


@dataclass
class OccupancyState:
    counts: np.ndarray
    r_total: int = 0
    d_total: int = 0
    c_total: int = 0
    t: float = 0.0

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if np.any(self.counts < 0):
            raise ValueError("occupation numbers must be non-negative")

    @classmethod
    def uniform(cls, cells: int, s: int, i: int) -> "OccupancyState":
        return cls(np.tile([s, i], cells))

    @property
    def s_total(self) -> int:
        return int(self.counts[0::2].sum())

    @property
    def i_total(self) -> int:
        return int(self.counts[1::2].sum())


def gillespie_delta_t(total_propensity: float, r1: float) -> float:
    """Waiting time ``ln(1/r1) / a`` to the next reaction."""
    if total_propensity <= 0:
        raise Extinction("total propensity is zero")
    if not 0.0 < r1 <= 1.0:
        raise ValueError("r1 must lie in (0, 1]")
    return math.log(1.0 / r1) / total_propensity


def gillespie_select(propensities, r2: float) -> int:
    """Zero-based index ``j`` with ``cum[j-1] <= r2 a < cum[j]``."""
    cum = np.cumsum(propensities, dtype=float)
    a = cum[-1]
    if a <= 0:
        raise Extinction("no reaction has positive propensity")
    j = int(np.searchsorted(cum, r2 * a, side="right"))
    if j >= len(cum):
        j = int(np.flatnonzero(np.asarray(propensities) > 0)[-1])
    return j


TOTAL_NAMES = ("S", "I", "R", "D", "C")


@dataclass
class GillespieResult:
    """Event trajectory; row 0 is the initial state (reaction ``-1``)."""

    t: np.ndarray
    reaction: np.ndarray
    totals: np.ndarray  # columns TOTAL_NAMES
    final: OccupancyState
    extinct: bool

    def sample(self, grid) -> np.ndarray:
        return resample_locf(self.t, self.totals, grid)


def gillespie_run(system: ReactionSystem, init: OccupancyState, t_end: float,
                  seed=None, rng: np.random.Generator | None = None) -> GillespieResult:
    """Direct-method simulation until ``t_end`` or until nothing can fire."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    rxs = system.reactions
    n_rx = len(rxs)
    rates = [rx.rate for rx in rxs]
    reactants = [rx.reactants for rx in rxs]
    stoich = [rx.stoich for rx in rxs]
    kinds = [rx.kind for rx in rxs]
    deps = system.dependents
    g = system.death_fraction

    n = [int(v) for v in init.counts]
    s_tot, i_tot = sum(n[0::2]), sum(n[1::2])
    r_tot, d_tot, c_tot = init.r_total, init.d_total, init.c_total

    def prop(j):
        a = rates[j]
        for idx in reactants[j]:
            a *= n[idx]
        return a

    props = [prop(j) for j in range(n_rx)]
    t = init.t
    ts, js = [t], [-1]
    tot = [(s_tot, i_tot, r_tot, d_tot, c_tot)]
    uniforms: list[float] = []
    pos = 0
    extinct = False
    log = math.log
    while True:
        a = math.fsum(props)
        if a <= 0.0:
            extinct = True
            break
        if pos + 2 > len(uniforms):
            uniforms = rng.random(_BLOCK).tolist()
            pos = 0
        r1 = 1.0 - uniforms[pos]
        r2 = uniforms[pos + 1]
        pos += 2
        t += log(1.0 / r1) / a
        if t >= t_end:
            break
        target = r2 * a
        acc = 0.0
        j = -1
        for k in range(n_rx):
            pk = props[k]
            if pk > 0.0:
                j = k
                if acc + pk > target:
                    break
                acc += pk
        for idx, change in stoich[j]:
            n[idx] += change
            if idx & 1:
                i_tot += change
            else:
                s_tot += change
        kind = kinds[j]
        if kind == _INFECT:
            c_tot += 1
        elif kind == _REMOVE:
            # position inside the selected bracket is an independent uniform
            if g > 0.0 and (target - acc) / props[j] < g:
                d_tot += 1
            else:
                r_tot += 1
        for k in deps[j]:
            props[k] = prop(k)
        ts.append(t)
        js.append(j)
        tot.append((s_tot, i_tot, r_tot, d_tot, c_tot))
    final = OccupancyState(np.array(n), r_tot, d_tot, c_tot, min(t, t_end))
    return GillespieResult(np.array(ts), np.array(js), np.array(tot, dtype=float), final, extinct)


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for replicate ``index`` of master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def resample_locf(event_t: np.ndarray, values: np.ndarray, grid) -> np.ndarray:
    """Values on ``grid`` by carrying the last event forward."""
    idx = np.searchsorted(event_t, np.asarray(grid, dtype=float), side="right") - 1
    return values[np.clip(idx, 0, None)]


def _replicate(args):
    system, init, t_end, seed, index, grid = args
    res = gillespie_run(system, init, t_end, rng=replicate_rng(seed, index))
    return res.sample(grid)


def run_ensemble(system: ReactionSystem, init: OccupancyState, t_end: float, runs: int,
                 seed: int, grid, workers: int = 1) -> np.ndarray:
    """Sampled totals for ``runs`` replicates, shape ``(runs, len(grid), 5)``.

    Results are ordered by replicate index, so the output does not depend on
    ``workers`` or on completion order.
    """
    grid = np.asarray(grid, dtype=float)
    jobs = [(system, init, t_end, seed, i, grid) for i in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_replicate, jobs, chunksize=max(1, runs // (4 * workers))))
    else:
        out = [_replicate(job) for job in jobs]
    return np.array(out)


@dataclass
class EnsembleStats:
    t: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    se: np.ndarray
    runs: int


def ensemble_stats(samples, grid=None) -> EnsembleStats:
    """Per-time mean, sample variance and standard error across replicates.

    ``samples`` is either an array ``(runs, len(grid), ...)`` already on the
    grid, or a list of :class:`GillespieResult` which is resampled onto
    ``grid`` first.
    """
    if isinstance(samples, (list, tuple)) and samples and isinstance(samples[0], GillespieResult):
        samples = np.array([res.sample(grid) for res in samples])
    arr = np.asarray(samples, dtype=float)
    runs = arr.shape[0]
    if runs < 2:
        raise ValueError("need at least two runs")
    mean = arr.mean(axis=0)
    var = arr.var(axis=0, ddof=1)
    t = np.asarray(grid, dtype=float) if grid is not None else np.arange(arr.shape[1], dtype=float)
    return EnsembleStats(t, mean, var, np.sqrt(var / runs), runs)
