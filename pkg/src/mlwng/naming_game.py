"""Minimal naming game on a static network.

The hot loop is compiled with numba. Every interaction consumes exactly three
uniform variates from the run's generator (speaker, hearer, utterance), drawn
in fixed-size blocks, so a run's trajectory depends only on (graph, seed) and
not on how the caller slices it into calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .graph import Graph, is_connected
from .metrics import MetricsSeries, geometric_schedule

UNIFORMS_PER_STEP = 3
BLOCK_STEPS = 1 << 16
INITIAL_CAPACITY = 8

# status codes returned by the kernel
_REACHED_STOP = 0
_CONSENSUS = 1
_NEED_UNIFORMS = 2
_NEED_CAPACITY = 3

# layout of the int64 counters array shared with the kernel
STEP, NEXT_NAME, N_TOTAL, N_DIFF, SUCCESSES, INTERACTIONS, PEAK_TOTAL, BUF_POS = range(8)
LAST_SPEAKER, LAST_HEARER, LAST_UTTERED, LAST_SUCCESS, LAST_INVENTED = range(8, 13)
N_COUNTERS = 13


class DisconnectedGraphError(ValueError):
    """Raised when the game is started on a graph with unreachable agents."""


@numba.njit(cache=True, nogil=True)
def _advance(indptr, indices, sources, edge_mode, mem, mem_len, holders, ctr, buf, stop):
    n = mem_len.shape[0]
    cap = mem.shape[1]
    n_buf = buf.shape[0]
    n_dir = indices.shape[0]
    while ctr[STEP] < stop:
        pos = ctr[BUF_POS]
        if pos >= n_buf:
            return _NEED_UNIFORMS
        if edge_mode:
            e = int(buf[pos, 0] * n_dir)
            s = sources[e]
            h = indices[e]
        else:
            s = int(buf[pos, 0] * n)
            lo = indptr[s]
            h = indices[lo + int(buf[pos, 1] * (indptr[s + 1] - lo))]
        ls = mem_len[s]
        if ls == 0:
            word = ctr[NEXT_NAME]
            invented = True
        else:
            word = mem[s, int(buf[pos, 2] * ls)]
            invented = False
        lh = mem_len[h]
        known = False
        for i in range(lh):
            if mem[h, i] == word:
                known = True
                break
        if not known and lh == cap:
            return _NEED_CAPACITY

        ctr[BUF_POS] = pos + 1
        if invented:
            ctr[NEXT_NAME] += 1
            mem[s, 0] = word
            mem_len[s] = 1
            holders[word] = 1
            ctr[N_TOTAL] += 1
            ctr[N_DIFF] += 1
            ls = 1
        if known:
            for i in range(ls):
                w = mem[s, i]
                holders[w] -= 1
                if holders[w] == 0:
                    ctr[N_DIFF] -= 1
            for i in range(lh):
                w = mem[h, i]
                holders[w] -= 1
                if holders[w] == 0:
                    ctr[N_DIFF] -= 1
            ctr[N_TOTAL] -= ls + lh - 2
            mem[s, 0] = word
            mem_len[s] = 1
            mem[h, 0] = word
            mem_len[h] = 1
            if holders[word] == 0:
                ctr[N_DIFF] += 1
            holders[word] += 2
            ctr[SUCCESSES] += 1
        else:
            mem[h, lh] = word
            mem_len[h] = lh + 1
            holders[word] += 1
            ctr[N_TOTAL] += 1
            if ctr[N_TOTAL] > ctr[PEAK_TOTAL]:
                ctr[PEAK_TOTAL] = ctr[N_TOTAL]
        ctr[INTERACTIONS] += 1
        ctr[STEP] += 1
        ctr[LAST_SPEAKER] = s
        ctr[LAST_HEARER] = h
        ctr[LAST_UTTERED] = word
        ctr[LAST_SUCCESS] = 1 if known else 0
        ctr[LAST_INVENTED] = 1 if invented else 0
        if ctr[N_DIFF] == 1 and ctr[N_TOTAL] == n:
            return _CONSENSUS
    return _REACHED_STOP


@dataclass(frozen=True)
class InteractionOutcome:
    speaker: int
    hearer: int
    uttered: int
    success: bool
    invented: bool


@dataclass
class GameState:
    """Agent memories plus the counters of one game.

    ``memory(i)`` returns agent ``i``'s names in insertion order. ``holders[w]``
    is the number of agents currently remembering name ``w``.
    """

    mem: np.ndarray
    mem_len: np.ndarray
    holders: np.ndarray
    counters: np.ndarray
    rng: np.random.Generator
    buf: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    sources: np.ndarray
    edge_mode: bool = False

    @property
    def n(self) -> int:
        return self.mem_len.shape[0]

    @property
    def step(self) -> int:
        return int(self.counters[STEP])

    @property
    def next_name_id(self) -> int:
        return int(self.counters[NEXT_NAME])

    @property
    def n_total(self) -> int:
        return int(self.counters[N_TOTAL])

    @property
    def n_diff(self) -> int:
        return int(self.counters[N_DIFF])

    @property
    def peak_n_total(self) -> int:
        return int(self.counters[PEAK_TOTAL])

    def memory(self, i: int) -> list[int]:
        return self.mem[i, : self.mem_len[i]].tolist()

    def memories(self) -> list[list[int]]:
        return [self.memory(i) for i in range(self.n)]

    def take_bin(self) -> tuple[int, int]:
        """Successes and interactions since the previous call, then reset both."""
        out = int(self.counters[SUCCESSES]), int(self.counters[INTERACTIONS])
        self.counters[SUCCESSES] = 0
        self.counters[INTERACTIONS] = 0
        return out

    def advance(self, stop: int) -> bool:
        """Play until ``stop`` interactions in total or global consensus; True on consensus."""
        while True:
            status = _advance(self.indptr, self.indices, self.sources, self.edge_mode, self.mem,
                              self.mem_len, self.holders, self.counters, self.buf, stop)
            if status == _REACHED_STOP:
                return False
            if status == _CONSENSUS:
                return True
            if status == _NEED_UNIFORMS:
                self.buf = self.rng.random((BLOCK_STEPS, UNIFORMS_PER_STEP))
                self.counters[BUF_POS] = 0
            else:
                grown = np.zeros((self.n, 2 * self.mem.shape[1]), dtype=self.mem.dtype)
                grown[:, : self.mem.shape[1]] = self.mem
                self.mem = grown


def init_state(g: Graph, seed, edge_mode: bool = False) -> GameState:
    """Fresh game on ``g``: every agent starts with an empty memory."""
    if g.n < 2:
        raise ValueError("the game needs at least two agents")
    if not is_connected(g):
        raise DisconnectedGraphError("isolated agents are not allowed: graph is disconnected")
    indptr, indices = g.csr()
    sources = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(indptr))
    ctr = np.zeros(N_COUNTERS, dtype=np.int64)
    return GameState(
        mem=np.zeros((g.n, INITIAL_CAPACITY), dtype=np.int64),
        mem_len=np.zeros(g.n, dtype=np.int64),
        # fresh names appear only for empty memories, so at most n are ever invented
        holders=np.zeros(g.n + 1, dtype=np.int64),
        counters=ctr,
        rng=np.random.default_rng(seed),
        # empty buffer: the first interaction triggers a block draw
        buf=np.empty((0, UNIFORMS_PER_STEP)),
        indptr=indptr,
        indices=indices,
        sources=sources,
        edge_mode=edge_mode,
    )


def step(state: GameState) -> InteractionOutcome:
    """Play exactly one speaker/hearer interaction."""
    state.advance(state.step + 1)
    c = state.counters
    return InteractionOutcome(
        speaker=int(c[LAST_SPEAKER]),
        hearer=int(c[LAST_HEARER]),
        uttered=int(c[LAST_UTTERED]),
        success=bool(c[LAST_SUCCESS]),
        invented=bool(c[LAST_INVENTED]),
    )


def is_global_consensus(state: GameState) -> bool:
    if np.any(state.mem_len != 1):
        return False
    first = state.mem[:, 0]
    return bool(np.all(first == first[0]))


@dataclass
class GameResult:
    converged: bool
    convergence_time: int | None
    steps: int
    final_n_diff: int
    final_n_total: int
    peak_n_total: int
    series: MetricsSeries = field(repr=False)


def run(g: Graph, seed, max_steps: int, *, extra_samples=(), edge_mode: bool = False,
        state: GameState | None = None) -> GameResult:
    """Play until global consensus or ``max_steps`` interactions.

    The trajectory is sampled on the geometric schedule plus any ``extra_samples``
    and always at the final step.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if state is None:
        state = init_state(g, seed, edge_mode=edge_mode)
    series = MetricsSeries()
    converged = False
    for point in geometric_schedule(max_steps, extra=extra_samples):
        converged = state.advance(point)
        successes, interactions = state.take_bin()
        series.record(state.step, state.n_total, state.n_diff, successes, interactions)
        if converged:
            break
    series.final = series.samples[-1]
    return GameResult(
        converged=converged,
        convergence_time=state.step if converged else None,
        steps=state.step,
        final_n_diff=state.n_diff,
        final_n_total=state.n_total,
        peak_n_total=state.peak_n_total,
        series=series,
    )
