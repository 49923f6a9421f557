# -*- coding: utf-8 -*-
"""
===============================================================================

   CoalescentFlow:
   Toolkit to run convergence experiments on the typed Kingman coalescent.

   Copyright (c) 2026, CoalescentFlow contributors. All rights reserved.

   Redistribution and use of this code in source and binary forms, with
   or without modification, are permitted provided that the following
   conditions are met:
   * Redistributions of source code must retain the above copyright notice,
     this list of conditions and the following disclaimer.
   * Redistributions in binary form must reproduce the above copyright notice,
     this list of conditions and the following disclaimer in the documentation
     and/or other materials provided with the distribution.

   THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
   "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED
   TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR
   PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR
   CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL,
   EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO,
   PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS;
   OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY,
   WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR
   OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SAMPLE CODE, EVEN IF
   ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.

===============================================================================
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

import numpy as np

T = TypeVar('T')


class RngStreams:
    """
    Family of independent random streams derived from one global seed.

    The stream of path k in channel c is a Philox (counter-based, 64-bit) generator
    keyed by SeedSequence(seed, spawn_key=(c, k)), so every path owns the same numbers
    whatever the number of threads or the order in which paths are scheduled.
    """
    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError('Seed must be a nonnegative integer ({}).'.format(seed))
        self.seed = int(seed)

    def stream(self, index: int, channel: int = 0) -> np.random.Generator:
        """
        Returns the random stream of the specified path index. 'channel' separates
        families of streams used by different parts of the same experiment.
        """
        seed_sequence = np.random.SeedSequence(self.seed, spawn_key=(int(channel), int(index)))
        return np.random.Generator(np.random.Philox(seed_sequence))


def map_paths(count: int,
              function: Callable[[int, np.random.Generator], T],
              streams: RngStreams,
              threads: int = 1,
              channel: int = 0,
              progress: Optional[Callable[[], None]] = None) -> List[T]:
    """
    Evaluates function(index, rng) for every path index in [0, count) and returns the
    results in index order.
    """
    results: List[Optional[T]] = [None] * count

    def _task(index: int) -> None:
        results[index] = function(index, streams.stream(index, channel))
        if progress:
            progress()

    if threads <= 1 or count <= 1:
        for index in range(count):
            _task(index)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            for _ in executor.map(_task, range(count)):
                pass

    return results  # type: ignore


def draw_uniforms(streams: RngStreams, start: int, stop: int, steps: int, channel: int = 0) -> np.ndarray:
    """
    Returns the first 'steps' uniform numbers of the streams of paths [start, stop),
    one row per path. A chain consuming one uniform per step from its own stream reads
    exactly these numbers.
    """
    if stop <= start:
        return np.zeros((0, steps))

    return np.stack([streams.stream(index, channel).random(steps) for index in range(start, stop)])


def map_chunks(count: int,
               chunk_size: int,
               function: Callable[[int, int], T],
               threads: int = 1,
               progress: Optional[Callable[[int], None]] = None) -> List[T]:
    """
    Splits [0, count) into consecutive chunks of 'chunk_size' paths, evaluates
    function(start, stop) on each of them and returns the results in chunk order.
    """
    bounds = [(start, min(start + chunk_size, count)) for start in range(0, count, max(1, chunk_size))]
    results: List[Optional[T]] = [None] * len(bounds)

    def _task(index: int) -> None:
        start, stop = bounds[index]
        results[index] = function(start, stop)
        if progress:
            progress(stop - start)

    if threads <= 1 or len(bounds) <= 1:
        for index in range(len(bounds)):
            _task(index)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            for _ in executor.map(_task, range(len(bounds))):
                pass

    return results  # type: ignore
