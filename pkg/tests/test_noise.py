import math

import pytest

from hetbell.noise import (
    BinomialCounter,
    LayerSampler,
    NoiseModel,
    PERFECT_SOURCE,
    RngStream,
    STANDARD_SOURCE,
    measurement_flip,
    sample_1q_noise,
    sample_2q_noise,
    sample_raw_bell,
    werner_source,
)
from hetbell.pauli import I, X, Y, Z

N_DRAWS = 1_000_000


def four_sigma(p, n):
    return 4.0 * math.sqrt(p * (1.0 - p) / n)


def test_1q_noise_p0_and_p1():
    rng = RngStream(1, 0)
    assert all(sample_1q_noise(rng, 0.0) == I for _ in range(1000))
    rng = RngStream(1, 1)
    assert all(sample_1q_noise(rng, 1.0) != I for _ in range(1000))


def test_1q_noise_frequencies():
    rng = RngStream(123, 0)
    counts = [0, 0, 0, 0]
    for _ in range(N_DRAWS):
        counts[sample_1q_noise(rng, 0.3)] += 1
    assert abs(counts[I] / N_DRAWS - 0.7) < four_sigma(0.7, N_DRAWS)
    for p in (X, Y, Z):
        assert abs(counts[p] / N_DRAWS - 0.1) < four_sigma(0.1, N_DRAWS)


def test_2q_noise_frequencies():
    rng = RngStream(456, 0)
    counts = {}
    for _ in range(N_DRAWS):
        pair = sample_2q_noise(rng, 0.15)
        counts[pair] = counts.get(pair, 0) + 1
    assert abs(counts[(I, I)] / N_DRAWS - 0.85) < four_sigma(0.85, N_DRAWS)
    assert len(counts) == 16
    for pair, c in counts.items():
        if pair == (I, I):
            continue
        assert abs(c / N_DRAWS - 0.01) < four_sigma(0.01, N_DRAWS)


def test_2q_noise_error_branch_never_identity():
    rng = RngStream(789, 0)
    for _ in range(2000):
        assert sample_2q_noise(rng, 1.0) != (I, I)


def test_raw_bell_distribution():
    rng = RngStream(42, 0)
    counts = [0, 0, 0, 0]
    for _ in range(N_DRAWS):
        counts[sample_raw_bell(rng)] += 1
    for pauli, w in ((I, 0.85), (Z, 0.04), (X, 0.055), (Y, 0.055)):
        assert abs(counts[pauli] / N_DRAWS - w) < four_sigma(w, N_DRAWS)
    # implied component rates: X-ish 0.11, merged 0.15
    x_rate = (counts[X] + counts[Y]) / N_DRAWS
    merged = 1.0 - counts[I] / N_DRAWS
    assert abs(x_rate - 0.11) < four_sigma(0.11, N_DRAWS)
    assert abs(merged - 0.15) < four_sigma(0.15, N_DRAWS)


def test_perfect_and_werner_sources():
    rng = RngStream(3, 0)
    assert all(PERFECT_SOURCE.sample(rng) == I for _ in range(1000))
    w = werner_source(0.25)
    assert w.w_i == 0.25
    assert w.w_x == w.w_y == w.w_z == 0.25
    assert STANDARD_SOURCE.fidelity == 0.85


@pytest.mark.parametrize("frame,flip", [(I, 0), (X, 1), (Z, 0), (Y, 1)])
def test_measurement_flip_noiseless(frame, flip):
    rng = RngStream(9, 0)
    got, _ = measurement_flip(rng, NoiseModel(0.0), frame)
    assert got == flip


def test_measurement_flip_modes_differ_in_rate():
    n = 200_000
    for mode, expected in (("pauli", 2.0 / 3.0 * 0.3), ("flip", 0.3)):
        rng = RngStream(10, 0)
        noise = NoiseModel(0.3, mode)
        flips = sum(measurement_flip(rng, noise, I)[0] for _ in range(n))
        assert abs(flips / n - expected) < four_sigma(expected, n)


def test_stream_determinism_and_independence():
    a = RngStream(1234, 7)
    b = RngStream(1234, 7)
    assert [a.u64() for _ in range(100)] == [b.u64() for _ in range(100)]
    c = RngStream(1234, 8)
    assert [RngStream(1234, 7).u64() for _ in range(10)] != [c.u64() for _ in range(10)]


def test_uniform_range():
    rng = RngStream(5, 0)
    for _ in range(10000):
        u = rng.uniform()
        assert 0.0 <= u < 1.0


def test_binomial_counter_moments():
    n_sites, p = 40, 0.02
    counter = BinomialCounter(n_sites, p)
    rng = RngStream(77, 0)
    total = 0
    draws = 200_000
    for _ in range(draws):
        total += counter.sample(rng)
    mean = total / draws
    expected = n_sites * p
    sigma = math.sqrt(n_sites * p * (1 - p) / draws)
    assert abs(mean - expected) < 4 * sigma


def test_layer_sampler_matches_per_site_bernoulli():
    # Aggregated sampling must reproduce the per-site marginal p and give
    # distinct sites.
    n_sites, p = 10, 0.05
    sampler = LayerSampler(p)
    rng = RngStream(88, 0)
    hits = [0] * n_sites
    draws = 200_000
    for _ in range(draws):
        sites = sampler.sample_sites(rng, n_sites)
        assert len(set(sites)) == len(sites)
        for s in sites:
            hits[s] += 1
    for h in hits:
        assert abs(h / draws - p) < four_sigma(p, draws)


def test_layer_sampler_p_zero():
    sampler = LayerSampler(0.0)
    rng = RngStream(1, 0)
    assert sampler.sample_sites(rng, 50) == ()


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(-0.1)
    with pytest.raises(ValueError):
        NoiseModel(1.5)
    with pytest.raises(ValueError):
        NoiseModel(0.1, "bogus")
