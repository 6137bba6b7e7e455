"""Pauli circuit-level noise model and the raw Bell-pair source.

Noise channels, applied with probability p per operation:
  - after each single-qubit gate and each idle slot: X, Y or Z, p/3 each;
  - after each CNOT: one of the 15 non-identity two-qubit Paulis, p/15 each;
  - immediately before each measurement readout: a p/3-balanced Pauli draw
    composed into the frame (so a Z just before a Z-basis readout is
    harmless). A flat outcome-flip variant is available for sensitivity
    checks via ``meas_mode="flip"``.

Raw Bell pairs carry an error on their second half only (the Pauli twirl
is pushed to one side): I with weight 0.85, Z 0.04, X 0.055, Y 0.055.

Randomness comes from counter-based splitmix64 substreams keyed by
(master seed, trial index), which makes parallel execution bit-identical
to serial. The Monte Carlo engine draws per-layer error *counts* from the
exact binomial distribution and then places that many errors on distinct
uniformly-chosen sites; this is distribution-identical to one Bernoulli
draw per site and far cheaper at small p.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .pauli import I, X, Y, Z

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / (1 << 53)


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class RngStream:
    """splitmix64 stream; identical (seed, stream_id) gives identical draws."""

    __slots__ = ("_state",)

    def __init__(self, seed: int, stream_id: int = 0):
        base = _mix64((seed & _MASK64) ^ 0x6A09E667F3BCC909)
        self._state = _mix64((base + _GAMMA * ((stream_id & _MASK64) + 1)) & _MASK64)

    def u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.u64() >> 11) * _INV_2_53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). Bias is O(n/2^53); negligible here."""
        return int(self.uniform() * n)


@dataclass(frozen=True)
class NoiseModel:
    """Local gate error probability and the measurement-error convention."""

    p: float
    meas_mode: str = "pauli"  # "pauli" (default) or "flip"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.meas_mode not in ("pauli", "flip"):
            raise ValueError(f"unknown meas_mode {self.meas_mode!r}")


@dataclass(frozen=True)
class RawBellDistribution:
    """Weights over the four Bell states as one-sided Pauli shifts of Phi+.

    Order: (I, Z, X, Y) for (Phi+, Phi-, Psi+, Psi-).
    """

    w_i: float
    w_z: float
    w_x: float
    w_y: float

    def __post_init__(self):
        total = self.w_i + self.w_z + self.w_x + self.w_y
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"Bell weights must sum to 1, got {total}")

    @property
    def fidelity(self) -> float:
        return self.w_i

    def sample(self, rng: RngStream) -> int:
        u = rng.uniform()
        if u < self.w_i:
            return I
        u -= self.w_i
        if u < self.w_z:
            return Z
        u -= self.w_z
        if u < self.w_x:
            return X
        return Y


#: Measured source distribution of the raw physical Bell pairs (F = 0.85).
STANDARD_SOURCE = RawBellDistribution(0.85, 0.04, 0.055, 0.055)

#: Noiseless source, for zero-noise law checks.
PERFECT_SOURCE = RawBellDistribution(1.0, 0.0, 0.0, 0.0)


def werner_source(f: float) -> RawBellDistribution:
    """Werner state of fidelity f: the three error weights equal (1-f)/3."""
    w = (1.0 - f) / 3.0
    return RawBellDistribution(f, w, w, w)


def sample_raw_bell(rng: RngStream, source: RawBellDistribution = STANDARD_SOURCE) -> int:
    """Error on the second half of a fresh Bell pair, relative to Phi+."""
    return source.sample(rng)


def sample_1q_noise(rng: RngStream, p: float) -> int:
    """I with probability 1-p; X, Y, Z with p/3 each."""
    u = rng.uniform()
    if u >= p:
        return I
    k = int(3.0 * u / p)
    if k > 2:
        k = 2
    return (X, Z, Y)[k]


# The 15 non-identity two-qubit Paulis, indexed 1..15 as 4*a + b.
def _two_qubit_pair(index: int) -> tuple[int, int]:
    return index >> 2, index & 3


def sample_2q_noise(rng: RngStream, p: float) -> tuple[int, int]:
    """(I, I) with probability 1-p; each non-identity pair with p/15."""
    u = rng.uniform()
    if u >= p:
        return I, I
    k = int(15.0 * u / p)
    if k > 14:
        k = 14
    return _two_qubit_pair(k + 1)


def measurement_flip(rng: RngStream, noise: NoiseModel, frame_pauli: int) -> tuple[int, int]:
    """Z-basis readout flip for a qubit whose frame entry is ``frame_pauli``.

    Returns (flip_bit, frame_pauli_after_noise). The flip is 1 iff the
    post-noise frame anticommutes with Z, i.e. carries an X or Y component.
    """
    if noise.meas_mode == "pauli":
        frame_pauli ^= sample_1q_noise(rng, noise.p)
        return frame_pauli & 1, frame_pauli
    flip = (frame_pauli & 1) ^ (1 if rng.uniform() < noise.p else 0)
    return flip, frame_pauli


class BinomialCounter:
    """Inverse-CDF sampler for Binomial(n, p) error counts.

    The cumulative table is truncated once the remaining tail is below
    1e-18; the truncation point absorbs the tail, keeping the sampler
    deterministic and the distribution exact to double precision.
    """

    __slots__ = ("n", "p", "_cdf")

    def __init__(self, n: int, p: float):
        self.n = n
        self.p = p
        cdf = []
        total = 0.0
        for k in range(n + 1):
            total += comb(n, k) * (p**k) * ((1.0 - p) ** (n - k))
            cdf.append(total)
            if 1.0 - total < 1e-18:
                break
        self._cdf = cdf

    def sample(self, rng: RngStream) -> int:
        u = rng.uniform()
        for k, c in enumerate(self._cdf):
            if u < c:
                return k
        return len(self._cdf) - 1


class LayerSampler:
    """Caches BinomialCounter tables for one noise probability."""

    __slots__ = ("p", "_tables")

    def __init__(self, p: float):
        self.p = p
        self._tables: dict[int, BinomialCounter] = {}

    def counter(self, n_sites: int) -> BinomialCounter:
        table = self._tables.get(n_sites)
        if table is None:
            table = BinomialCounter(n_sites, self.p)
            self._tables[n_sites] = table
        return table

    def sample_sites(self, rng: RngStream, n_sites: int) -> tuple[int, ...]:
        """Distinct error sites, distribution-identical to per-site Bernoulli(p)."""
        if n_sites == 0 or self.p == 0.0:
            return ()
        k = self.counter(n_sites).sample(rng)
        if k == 0:
            return ()
        if k == 1:
            return (rng.below(n_sites),)
        chosen: list[int] = []
        while len(chosen) < k:
            s = rng.below(n_sites)
            if s not in chosen:
                chosen.append(s)
        return tuple(chosen)
