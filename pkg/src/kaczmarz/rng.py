"""Deterministic seeded pseudorandomness.

The generator is splitmix64 (Steele, Lea & Flood's SplittableRandom finalizer):
the 64-bit state advances by the golden-gamma constant and each output is the
mixed state.  It is chosen over a stdlib or numpy generator because the whole
algorithm is a handful of exact 64-bit integer operations, so the compiled
kernel and the pure-Python fallback can consume the identical stream.

Uniform doubles take the top 53 bits of an output word, giving values in
[0, 1).  Normal variates use the Box-Muller cosine branch

    z = sqrt(-2 log(1 - u1)) * cos(2 pi u2)

consuming exactly two uniforms each (the sine twin is discarded so stream
accounting stays trivial).
"""

import math

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53

_TWO_PI = 2.0 * math.pi


def _mix(z):
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


class Rng:
    """splitmix64 stream; state is a single 64-bit integer.

    The same seed always reproduces the same stream; distinct seeds give
    streams that differ immediately with overwhelming probability.  A
    generator is mutable and owned by exactly one run at a time: move it
    between tasks, never share it.
    """

    __slots__ = ("state",)

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        """Advance one step and return the 64-bit output word."""
        self.state = (self.state + _GOLDEN) & MASK64
        return _mix(self.state)

    def next_uniform(self):
        """One double in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def next_normal(self):
        """One standard normal variate; consumes exactly two uniforms."""
        u1 = self.next_uniform()
        u2 = self.next_uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(_TWO_PI * u2)

    def uniforms(self, count):
        """Vectorized :meth:`next_uniform`; advances the state by `count`.

        The state sequence is an arithmetic progression, so the whole block
        can be produced with wrapping uint64 numpy arithmetic.  The returned
        values are bit-identical to `count` scalar calls.
        """
        if count < 0:
            raise ValueError("count must be non-negative")
        if count == 0:
            return np.empty(0, dtype=np.float64)
        steps = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(_GOLDEN)
        self.state = int(z[-1])
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def normals(self, count):
        """Vectorized :meth:`next_normal`; consumes 2*count uniforms."""
        u = self.uniforms(2 * count)
        radius = np.sqrt(-2.0 * np.log(1.0 - u[0::2]))
        return radius * np.cos(_TWO_PI * u[1::2])


def new_rng(seed):
    """Create a generator from a 64-bit integer seed."""
    return Rng(seed)


def derive_run_seed(base_seed, run_index):
    """Per-run seed for Monte-Carlo repetitions.

    Defined as one splitmix64 round applied to ``base_seed XOR run_index``,
    so runs are decorrelated yet each one is individually replayable from
    (base_seed, run_index).
    """
    return Rng((int(base_seed) ^ int(run_index)) & MASK64).next_u64()
