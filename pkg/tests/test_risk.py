"""Risk field: sensing law, corruption law, and source motion."""

import math

import numpy as np
import pytest

from swarmstore import (ConfigurationError, RadiationSource, RiskField,
                        advance_sources, corruption_probability,
                        corruption_probability_many, sense_radiation,
                        true_radiation)
from swarmstore.topology import Arena


def make_field(sources, decay=1.0, noise=0.05, scale=0.01):
    return RiskField(sources=tuple(sources), decay=decay,
                     sensor_noise_std=noise, corruption_scale=scale)


class TestTrueRadiation:
    def test_empty_field_is_zero(self):
        assert true_radiation(make_field([]), (3.0, 4.0)) == 0.0

    def test_source_at_position_contributes_full_intensity(self):
        field = make_field([RadiationSource((2.0, 2.0), 0.7)], decay=5.0)
        assert true_radiation(field, (2.0, 2.0)) == pytest.approx(0.7)

    def test_two_unit_sources_at_distance_one(self):
        # each term is 1 / (1 + 1*1^2) = 0.5
        field = make_field([RadiationSource((0.0, 0.0), 1.0),
                            RadiationSource((2.0, 0.0), 1.0)], decay=1.0)
        assert true_radiation(field, (1.0, 0.0)) == pytest.approx(1.0)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(7)
        sources = [RadiationSource((float(x), float(y)), float(i))
                   for x, y, i in zip(rng.uniform(0, 20, 6), rng.uniform(0, 20, 6),
                                      rng.uniform(0, 1, 6))]
        field_a = make_field(sources)
        field_b = make_field(sources[::-1])
        for pos in rng.uniform(0, 20, (10, 2)):
            assert true_radiation(field_a, pos) == pytest.approx(
                true_radiation(field_b, pos), abs=1e-12)


class TestSensing:
    def test_zero_noise_returns_exact_level(self):
        field = make_field([RadiationSource((1.0, 1.0), 0.5)], noise=0.0)
        rng = np.random.default_rng(0)
        assert sense_radiation(field, (1.0, 1.0), rng) == pytest.approx(0.5)

    def test_no_sources_samples_pure_noise(self):
        field = make_field([], noise=0.05)
        rng = np.random.default_rng(1)
        samples = [sense_radiation(field, (0.0, 0.0), rng) for _ in range(2000)]
        assert min(samples) < 0 < max(samples)
        assert abs(np.std(samples) - 0.05) < 0.005

    def test_sample_mean_tracks_true_level(self):
        # Monte Carlo oracle: mean of 10000 noisy reads approaches truth
        field = make_field([RadiationSource((5.0, 5.0), 0.8)], noise=0.05)
        rng = np.random.default_rng(2)
        pos = (6.0, 5.0)
        mean = np.mean([sense_radiation(field, pos, rng) for _ in range(10000)])
        assert abs(mean - true_radiation(field, pos)) < 0.005


class TestCorruptionProbability:
    def test_no_sources_is_zero(self):
        assert corruption_probability(make_field([]), (0.0, 0.0)) == 0.0

    def test_certain_corruption_at_source(self):
        field = make_field([RadiationSource((1.0, 1.0), 1.0)], scale=1.0)
        assert corruption_probability(field, (1.0, 1.0)) == pytest.approx(1.0)

    def test_two_sources_product_of_complements(self):
        # per-source p = 0.1 each: combined 1 - 0.9^2 = 0.19
        field = make_field([RadiationSource((0.0, 0.0), 1.0),
                            RadiationSource((6.0, 0.0), 1.0)],
                           decay=1.0, scale=0.1)
        # position at the sources themselves gives p = scale * I = 0.1
        p = corruption_probability(make_field(
            [RadiationSource((0.0, 0.0), 1.0)], scale=0.1), (0.0, 0.0))
        assert p == pytest.approx(0.1)
        combined = 1.0 - (1.0 - 0.1) * (1.0 - 0.1)
        two = make_field([RadiationSource((3.0, 0.0), 1.0),
                          RadiationSource((3.0, 0.0), 1.0)], scale=0.1)
        assert corruption_probability(two, (3.0, 0.0)) == pytest.approx(combined)

    def test_matches_monte_carlo_frequency(self):
        field = make_field([RadiationSource((0.0, 0.0), 0.9),
                            RadiationSource((1.5, 0.0), 0.6)],
                           decay=0.8, scale=0.5)
        pos = (0.5, 0.2)
        p = corruption_probability(field, pos)
        spos = np.array([s.position for s in field.sources])
        intens = np.array([s.intensity for s in field.sources])
        d2 = ((np.asarray(pos) - spos) ** 2).sum(axis=1)
        per = np.clip(field.corruption_scale * intens / (1 + field.decay * d2), 0, 1)
        rng = np.random.default_rng(3)
        draws = rng.random((100000, len(per))) < per
        freq = np.mean(draws.any(axis=1))
        assert abs(p - freq) < 0.01

    def test_matches_high_precision_reference(self):
        # product of complements vs an mpmath evaluation at 50 digits
        import mpmath
        mpmath.mp.dps = 50
        rng = np.random.default_rng(4)
        for _ in range(20):
            k = rng.integers(1, 6)
            sources = [RadiationSource((float(x), float(y)), float(i))
                       for x, y, i in zip(rng.uniform(0, 20, k),
                                          rng.uniform(0, 20, k),
                                          rng.uniform(0, 1, k))]
            field = make_field(sources, decay=float(rng.uniform(0.1, 2.0)),
                               scale=float(rng.uniform(0.0, 1.0)))
            pos = rng.uniform(0, 20, 2)
            prod = mpmath.mpf(1)
            for s in sources:
                d2 = (pos[0] - s.position[0]) ** 2 + (pos[1] - s.position[1]) ** 2
                per = field.corruption_scale * s.intensity / (1 + field.decay * d2)
                prod *= (1 - mpmath.mpf(min(max(per, 0.0), 1.0)))
            expected = float(1 - prod)
            assert abs(corruption_probability(field, pos) - expected) <= 1e-12

    def test_monotone_in_intensity_scale_and_distance(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            pos = rng.uniform(0, 20, 2)
            src = RadiationSource(tuple(rng.uniform(0, 20, 2)),
                                  float(rng.uniform(0.1, 0.9)))
            base = make_field([src], scale=0.3)
            stronger = make_field(
                [RadiationSource(src.position, min(1.0, src.intensity + 0.1))],
                scale=0.3)
            scaled = make_field([src], scale=0.4)
            closer = make_field(
                [RadiationSource(tuple(np.asarray(src.position) * 0.5
                                       + np.asarray(pos) * 0.5), src.intensity)],
                scale=0.3)
            p = corruption_probability(base, pos)
            assert corruption_probability(stronger, pos) >= p
            assert corruption_probability(scaled, pos) >= p
            assert corruption_probability(closer, pos) >= p

    def test_union_bound(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            k = rng.integers(2, 6)
            sources = [RadiationSource((float(x), float(y)), float(i))
                       for x, y, i in zip(rng.uniform(0, 20, k),
                                          rng.uniform(0, 20, k),
                                          rng.uniform(0, 1, k))]
            field = make_field(sources, scale=float(rng.uniform(0.1, 1.0)))
            pos = rng.uniform(0, 20, 2)
            combined = corruption_probability(field, pos)
            singles = [corruption_probability(make_field([s], scale=field.corruption_scale), pos)
                       for s in sources]
            assert combined >= max(singles) - 1e-12
            assert combined <= sum(singles) + 1e-12


class TestAdvanceSources:
    arena = Arena(20.0, 20.0)

    def test_static_field_unchanged(self):
        field = make_field([RadiationSource((3.0, 3.0), 0.5)])
        rng = np.random.default_rng(0)
        assert advance_sources(field, rng, self.arena) is field

    def test_reflection_at_wall(self):
        # moving (1, 0) per step from x=19.5 bounces off the x=20 wall
        field = make_field([RadiationSource((19.5, 10.0), 0.5, velocity=(1.0, 0.0))])
        rng = np.random.default_rng(0)
        moved = advance_sources(field, rng, self.arena)
        src = moved.sources[0]
        assert src.position[0] == pytest.approx(19.5)
        assert src.velocity[0] == -1.0

    def test_positions_stay_inside_over_many_steps(self):
        rng = np.random.default_rng(8)
        field = make_field([
            RadiationSource((10.0, 10.0), 0.5, velocity=(0.9, 0.4)),
            RadiationSource((1.0, 2.0), 0.3, velocity=(-0.7, 1.1)),
        ])
        for _ in range(500):
            field = advance_sources(field, rng, self.arena, jitter_std=0.05)
            for s in field.sources:
                assert 0 <= s.position[0] <= 20 and 0 <= s.position[1] <= 20

    def test_intensities_never_change(self):
        rng = np.random.default_rng(9)
        field = make_field([RadiationSource((5.0, 5.0), 0.42, velocity=(0.3, 0.0))])
        for _ in range(50):
            field = advance_sources(field, rng, self.arena)
        assert field.sources[0].intensity == 0.42


class TestValidation:
    def test_intensity_out_of_range_rejected(self):
        with pytest.raises(ConfigurationError):
            RadiationSource((0.0, 0.0), 1.5)

    def test_bad_decay_rejected(self):
        with pytest.raises(ConfigurationError):
            RiskField(decay=0.0)

    def test_vectorised_matches_scalar(self):
        rng = np.random.default_rng(10)
        sources = [RadiationSource((float(x), float(y)), float(i))
                   for x, y, i in zip(rng.uniform(0, 20, 4), rng.uniform(0, 20, 4),
                                      rng.uniform(0, 1, 4))]
        field = make_field(sources, scale=0.4)
        positions = rng.uniform(0, 20, (25, 2))
        many = corruption_probability_many(field, positions)
        for pos, expected in zip(positions, many):
            assert corruption_probability(field, pos) == pytest.approx(expected)
