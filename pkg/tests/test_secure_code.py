import csv

import numpy as np
import pytest

from wiretap_auth.bits import BitVector, RngSeed, random_bits
from wiretap_auth.channel import BscParam, WiretapChannel, secrecy_capacity
from wiretap_auth.errors import DomainError, LengthMismatchError, MalformedInputError
from wiretap_auth.polar import PolarParams, QualityProfile, quality_profile
from wiretap_auth.secure_code import (IndexPartition, PartitionParams,
                                      SecurePolarCode, export_partition,
                                      good_set, poor_set, secrecy_rate,
                                      secure_decode, secure_decode_rows,
                                      secure_encode, secure_encode_rows)


def make_code(p, q, n, beta=0.1, gamma=0.1, sigma=None) -> SecurePolarCode:
    return SecurePolarCode(WiretapChannel(BscParam(p), BscParam(q)),
                           PolarParams.for_block_length(n),
                           PartitionParams(beta, gamma, sigma))


class TestGoodPoorSets:
    def test_all_zero_profile_is_all_good(self):
        prof = QualityProfile(8, np.zeros(8))
        assert good_set(prof, 0.1).tolist() == list(range(8))

    def test_all_one_profile_has_no_good(self):
        prof = QualityProfile(8, np.ones(8))
        assert good_set(prof, 0.1).size == 0

    def test_good_count_matches_scalar_recount(self):
        n, beta = 1024, 0.1
        prof = quality_profile(BscParam(0.1), PolarParams.for_block_length(n))
        thr = 2.0 ** (-(n ** beta)) / n
        expect = sum(1 for z in prof.z.tolist() if z < thr)
        assert good_set(prof, beta).size == expect

    def test_poor_threshold_semantics(self):
        prof = QualityProfile(4, np.array([0.0, 0.3, 0.8, 1.0]))
        # capacity surrogate 1 - z <= sigma
        assert poor_set(prof, 0.5).tolist() == [2, 3]
        assert poor_set(prof, 0.75).tolist() == [1, 2, 3]

    def test_capacity_one_never_poor(self):
        prof = QualityProfile(8, np.zeros(8))
        assert poor_set(prof, 0.5).size == 0

    def test_poor_count_matches_scalar_recount(self):
        n, gamma = 8192, 0.1
        prof = quality_profile(BscParam(0.3), PolarParams.for_block_length(n))
        sigma = 2.0 ** (-(n ** gamma))
        expect = sum(1 for z in prof.z.tolist() if 1.0 - z <= sigma)
        assert poor_set(prof, sigma).size == expect

    def test_sigma_domain(self):
        prof = QualityProfile(4, np.zeros(4))
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(DomainError):
                poor_set(prof, bad)

    def test_params_validation(self):
        with pytest.raises(DomainError):
            PartitionParams(0.5, 0.1)
        with pytest.raises(DomainError):
            PartitionParams(0.1, 0.0)
        with pytest.raises(DomainError):
            PartitionParams(0.1, 0.1, sigma_override=1.0)

    def test_sigma_formula(self):
        # 2^(-n^gamma), exponentially small capacity threshold
        params = PartitionParams(0.1, 0.1)
        assert params.sigma(8192) == pytest.approx(2.0 ** (-(8192 ** 0.1)))
        assert PartitionParams(0.1, 0.1, 0.25).sigma(8192) == 0.25


class TestPartition:
    def test_cover_property(self):
        for (p, q, n) in [(0.1, 0.3, 256), (0.1, 0.2, 512), (0.2, 0.4, 1024),
                          (0.3, 0.4, 512)]:
            part = make_code(p, q, n).partition
            merged = np.concatenate([part.info, part.frozen,
                                     part.random_unreliable,
                                     part.random_reliable])
            assert np.array_equal(np.sort(merged), np.arange(n))

    def test_symmetric_channels_give_empty_info(self):
        # every Bob-good index is also Eve-good, hence not poor for Eve
        part = make_code(0.1, 0.1, 1024).partition
        assert part.info.size == 0
        assert not part.has_info

    def test_empty_info_at_n512_q02(self):
        assert make_code(0.1, 0.2, 512).info_size == 0

    def test_scenario_b_supports_101_bit_tag(self):
        assert make_code(0.1, 0.3, 8192).info_size >= 101

    def test_info_grows_with_q(self):
        sizes = [make_code(0.1, q, 8192).info_size for q in (0.2, 0.3, 0.4)]
        assert sizes[0] <= sizes[1] <= sizes[2]

    def test_rederivation_idempotent(self):
        a = make_code(0.1, 0.3, 512).partition
        b = make_code(0.1, 0.3, 512).partition
        for x, y in zip((a.info, a.frozen, a.random_unreliable, a.random_reliable),
                        (b.info, b.frozen, b.random_unreliable, b.random_reliable)):
            assert np.array_equal(x, y)

    def test_invalid_partition_rejected(self):
        with pytest.raises(ValueError):
            IndexPartition(4, np.array([0, 1]), np.array([1, 2]),
                           np.array([], dtype=np.int64), np.array([3]))


class TestEncodeDecode:
    def test_empty_payload_still_encodes(self):
        code = make_code(0.1, 0.2, 512)  # |A| = 0
        assert code.info_size == 0
        x = secure_encode(BitVector.zeros(0), code, RngSeed(1))
        assert len(x) == 512

    def test_deterministic(self):
        code = make_code(0.1, 0.3, 256)
        payload = random_bits(code.info_size, RngSeed(2))
        assert secure_encode(payload, code, RngSeed(3)) == \
            secure_encode(payload, code, RngSeed(3))

    def test_payload_length_checked(self):
        code = make_code(0.1, 0.3, 256)
        with pytest.raises(LengthMismatchError):
            secure_encode(BitVector.zeros(code.info_size + 1), code, RngSeed(4))

    @pytest.mark.parametrize("n", [256, 1024, 8192])
    def test_noiseless_round_trip_100_payloads(self, n):
        code = make_code(0.0, 0.3, n)
        assert code.info_size > 0
        rng = np.random.default_rng(n)
        payload = rng.integers(0, 2, (100, code.info_size), dtype=np.uint8)
        x = secure_encode_rows(payload, code, rng)
        got = secure_decode_rows(x, code)
        assert np.array_equal(got, payload)

    def test_wrong_length_is_malformed(self):
        code = make_code(0.1, 0.3, 256)
        with pytest.raises(MalformedInputError):
            secure_decode(BitVector.zeros(255), code)

    def test_single_shot_matches_rows(self):
        code = make_code(0.1, 0.3, 256)
        payload = random_bits(code.info_size, RngSeed(5))
        x = secure_encode(payload, code, RngSeed(6))
        y = BitVector(x.bits ^ (np.random.default_rng(7).random(256) < 0.1
                                ).astype(np.uint8))
        single = secure_decode(y, code)
        rows = secure_decode_rows(y.bits[None, :], code)[0]
        assert np.array_equal(single.bits, rows)

    def test_scenario_b_bob_reliable(self):
        # 100 trials through the main channel: zero payload errors
        code = make_code(0.1, 0.3, 8192)
        rng = np.random.default_rng(8)
        payload = rng.integers(0, 2, (100, code.info_size), dtype=np.uint8)
        x = secure_encode_rows(payload, code, rng)
        y = x ^ (rng.random(x.shape) < 0.1).astype(np.uint8)
        got = secure_decode_rows(y, code)
        assert int((got != payload).any(axis=1).sum()) == 0

    def test_scenario_b_eve_confused(self):
        # per-bit error on the payload positions within the widened band
        code = make_code(0.1, 0.3, 8192)
        rng = np.random.default_rng(9)
        payload = rng.integers(0, 2, (100, code.info_size), dtype=np.uint8)
        x = secure_encode_rows(payload, code, rng)
        z = x ^ (rng.random(x.shape) < 0.3).astype(np.uint8)
        eve = secure_decode_rows(z, code, code.wc.eve)
        err = float((eve != payload).mean())
        assert 0.45 <= err <= 0.55


class TestSecrecyRate:
    def test_zero_when_empty(self):
        assert secrecy_rate(make_code(0.1, 0.2, 512)) == 0.0

    def test_rate_below_capacity_on_grid(self):
        for (p, q) in [(0.1, 0.2), (0.1, 0.3), (0.1, 0.4), (0.2, 0.3)]:
            cap = secrecy_capacity(WiretapChannel(BscParam(p), BscParam(q)))
            for n in (512, 2048, 8192):
                assert secrecy_rate(make_code(p, q, n)) <= cap

    def test_rate_nondecreasing_in_n(self):
        rates = [secrecy_rate(make_code(0.1, 0.3, 1 << r)) for r in range(9, 14)]
        assert all(b >= a for a, b in zip(rates, rates[1:]))


class TestRandomizationDiffusion:
    def test_codeword_positions_unbiased(self):
        # fixed payload, 1000 seeds: every position close to fair
        code = make_code(0.1, 0.3, 256)
        payload = random_bits(code.info_size, RngSeed(10))
        rng = np.random.default_rng(11)
        X = secure_encode_rows(np.broadcast_to(payload.bits, (1000, code.info_size)),
                               code, rng)
        bias = np.abs(X.mean(axis=0) - 0.5)
        assert float(bias.max()) <= 0.05


class TestExport:
    def test_partition_csv(self, tmp_path):
        code = make_code(0.1, 0.3, 256)
        path = tmp_path / "partition.csv"
        export_partition(code, path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 256
        assert set(rows[0].keys()) == {"index", "z_main", "z_eve", "set"}
        counts = {"A": 0, "B": 0, "X": 0, "Y": 0}
        for row in rows:
            counts[row["set"]] += 1
            assert 0.0 <= float(row["z_main"]) <= 1.0
            assert 0.0 <= float(row["z_eve"]) <= 1.0
        assert counts == code.partition.sizes()
