from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from cmdp_core.types import RejectedInputError, Trajectory

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BatchSample:
    trajectories: tuple[Trajectory, ...]
    short: bool = False  # el buffer tenía menos de B pasos

    @property
    def n_steps(self) -> int:
        return sum(len(t) for t in self.trajectories)


class ReplayBuffer:
    """
    Buffer FIFO de segmentos de episodio con capacidad L en pasos.
    Al desbordar se recorta por delante el segmento más antiguo, de modo que lo almacenado
    es siempre el sufijo del flujo de datos añadidos y cada segmento sigue siendo contiguo.
    Las escrituras deben serializarse fuera (fase de recogida y fase de actualización alternan).
    """

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise RejectedInputError(f"capacity must be > 0, got {capacity}")
        self.capacity = capacity
        self._segments: deque[Trajectory] = deque()
        self._n_steps = 0

    def __len__(self) -> int:
        return self._n_steps

    @property
    def n_segments(self) -> int:
        return len(self._segments)

    def segments(self) -> tuple[Trajectory, ...]:
        return tuple(self._segments)

    def append(self, trajectories: Iterable[Trajectory]) -> None:
        for traj in trajectories:
            if len(traj) == 0:
                continue
            self._segments.append(traj)
            self._n_steps += len(traj)
        self._evict()

    def _evict(self) -> None:
        while self._n_steps > self.capacity:
            oldest = self._segments[0]
            excess = self._n_steps - self.capacity
            if excess >= len(oldest):
                self._segments.popleft()
                self._n_steps -= len(oldest)
            else:
                self._segments[0] = oldest.tail(len(oldest) - excess)
                self._n_steps -= excess

    def sample(self, batch_steps: int, rng: np.random.Generator) -> BatchSample:
        """
        Segmentos completos, sin reemplazo y en orden aleatorio uniforme, hasta que la longitud
        acumulada alcanza o supera batch_steps.
        """
        if self._n_steps == 0:
            raise RejectedInputError("cannot sample from an empty replay buffer")
        if self._n_steps < batch_steps:
            log.warning("short batch: buffer holds %d steps, requested %d", self._n_steps, batch_steps)
            return BatchSample(trajectories=tuple(self._segments), short=True)

        order = rng.permutation(len(self._segments))
        picked: list[Trajectory] = []
        total = 0
        for idx in order:
            seg = self._segments[int(idx)]
            picked.append(seg)
            total += len(seg)
            if total >= batch_steps:
                break
        return BatchSample(trajectories=tuple(picked))


def buffer_append(buffer: ReplayBuffer, trajectories: Iterable[Trajectory]) -> ReplayBuffer:
    buffer.append(trajectories)
    return buffer


def sample_batch(buffer: ReplayBuffer, batch_steps: int, rng: np.random.Generator) -> BatchSample:
    return buffer.sample(batch_steps, rng)
