import csv
import math

import pytest

from wiretap_auth.adversary import (NOT_AN_ATTACK, AttackOutcome,
                                    AttackStrategy, all_strategies,
                                    estimate_success, export_outcomes_csv,
                                    impersonate, substitute_type1,
                                    substitute_type2, wilson_interval)
from wiretap_auth.bits import BitVector, RngSeed, random_bits
from wiretap_auth.channel import transmit
from wiretap_auth.errors import DomainError
from wiretap_auth.protocol import (RoundTranscript, authenticate_send,
                                   build_config, verify)


@pytest.fixture(scope="module")
def toy_cfg():
    # n=128, p=0.05, q=0.4: |A| = 35 at beta=gamma=0.1; u=16 tag
    return build_config(p=0.05, q=0.4, r=7, beta=0.1, gamma=0.1,
                        t=64, u=16, seed=RngSeed(200))


def honest_round(cfg, seed):
    m = random_bits(cfg.hp.t, seed.derive(0))
    m_sent, x = authenticate_send(m, cfg, seed.derive(1))
    y = transmit(x, cfg.wc.main, seed.derive(2))
    z = transmit(x, cfg.wc.eve, seed.derive(3))
    return RoundTranscript(m_sent, m_sent, x, y, z, "accept")


class TestStrategyValidation:
    def test_valid_combinations(self):
        assert len(all_strategies()) == 6

    def test_invalid_kind(self):
        with pytest.raises(DomainError):
            AttackStrategy("forgery", "random_tag")

    def test_invalid_variant_for_kind(self):
        with pytest.raises(DomainError):
            AttackStrategy("substitution_type1", "random_tag")
        with pytest.raises(DomainError):
            AttackStrategy("impersonation", "bitflip_message")


class TestWilson:
    def test_basic_properties(self):
        lo, hi = wilson_interval(3, 100)
        assert 0.0 <= lo <= 0.03 <= hi <= 1.0

    def test_zero_rounds(self):
        assert wilson_interval(0, 0) == (0.0, 1.0)

    def test_zero_successes_upper_bound(self):
        lo, hi = wilson_interval(0, 10 ** 5)
        assert lo == 0.0
        assert hi < 1e-4


class TestImpersonate:
    def test_random_tag_shapes(self, toy_cfg):
        strat = AttackStrategy("impersonation", "random_tag")
        m_o, y_o = impersonate(strat, [], toy_cfg, RngSeed(1))
        assert len(m_o) == 64 and len(y_o) == 128

    def test_empty_history_replay_falls_back(self, toy_cfg):
        strat = AttackStrategy("impersonation", "replay_codeword")
        m_o, y_o = impersonate(strat, [], toy_cfg, RngSeed(2))
        assert len(m_o) == 64 and len(y_o) == 128

    def test_replay_uses_observed_round(self, toy_cfg):
        strat = AttackStrategy("impersonation", "replay_codeword")
        prior = honest_round(toy_cfg, RngSeed(3))
        m_o, y_o = impersonate(strat, [prior], toy_cfg, RngSeed(4))
        assert m_o == prior.m_sent
        assert y_o == prior.z_eve

    def test_eve_reuse_precomputed_estimate_matches(self, toy_cfg):
        strat = AttackStrategy("impersonation", "eve_decode_reuse")
        prior = honest_round(toy_cfg, RngSeed(5))
        from wiretap_auth.secure_code import secure_decode
        est = BitVector(secure_decode(prior.z_eve, toy_cfg.code,
                                      toy_cfg.wc.eve).bits[:16].copy())
        a = impersonate(strat, [prior], toy_cfg, RngSeed(6))
        b = impersonate(strat, [prior], toy_cfg, RngSeed(6), eve_payload=est)
        assert a[0] == b[0] and a[1] == b[1]

    def test_wrong_kind_rejected(self, toy_cfg):
        with pytest.raises(DomainError):
            impersonate(AttackStrategy("substitution_type2", "random_tag"),
                        [], toy_cfg, RngSeed(7))


class TestSubstitutions:
    def test_type1_always_differs(self, toy_cfg):
        for trial in range(100):
            m_j = random_bits(64, RngSeed(8, trial))
            m_o = substitute_type1(m_j, [], toy_cfg, RngSeed(9, trial))
            assert m_o != m_j
            # exactly one flipped bit
            assert int((m_o.bits ^ m_j.bits).sum()) == 1

    def test_type1_leaves_channel_word_alone(self, toy_cfg):
        # the attack only produces a message and must not touch the
        # honest round's vectors through shared references
        prior = honest_round(toy_cfg, RngSeed(10))
        y_before = prior.y_bob.to_bytes()
        m_before = prior.m_sent.to_bytes()
        m_o = substitute_type1(prior.m_sent, [prior], toy_cfg, RngSeed(11))
        assert isinstance(m_o, BitVector)
        assert prior.y_bob.to_bytes() == y_before
        assert prior.m_sent.to_bytes() == m_before

    def test_type2_requires_history(self, toy_cfg):
        strat = AttackStrategy("substitution_type2", "eve_decode_reuse")
        with pytest.raises(DomainError):
            substitute_type2([], toy_cfg, RngSeed(12), strat)

    def test_type2_forges_both(self, toy_cfg):
        strat = AttackStrategy("substitution_type2", "eve_decode_reuse")
        prior = honest_round(toy_cfg, RngSeed(13))
        m_o, y_o = substitute_type2([prior], toy_cfg, RngSeed(14), strat)
        assert m_o != prior.m_sent
        assert len(y_o) == 128

    def test_wrong_length_forgery_rejected(self, toy_cfg):
        # a malformed channel word can only be rejected
        m_o = random_bits(64, RngSeed(15))
        assert not verify(m_o, BitVector.zeros(127), toy_cfg)


class TestEstimateSuccess:
    def test_not_an_attack_sentinel(self, toy_cfg):
        out = estimate_success(None, toy_cfg, 100, RngSeed(16))
        assert out is NOT_AN_ATTACK
        assert out.note == "not-an-attack"
        assert math.isnan(out.success_rate)

    def test_zero_rounds(self, toy_cfg):
        strat = AttackStrategy("substitution_type2", "eve_decode_reuse")
        out = estimate_success(strat, toy_cfg, 0, RngSeed(17))
        assert (out.rounds, out.successes, out.success_rate) == (0, 0, 0.0)

    def test_reproducible(self, toy_cfg):
        strat = AttackStrategy("impersonation", "random_tag")
        a = estimate_success(strat, toy_cfg, 2000, RngSeed(18))
        b = estimate_success(strat, toy_cfg, 2000, RngSeed(18))
        assert a == b

    def test_chunking_does_not_change_result(self, toy_cfg):
        strat = AttackStrategy("impersonation", "random_tag")
        a = estimate_success(strat, toy_cfg, 1500, RngSeed(19), chunk_size=512)
        b = estimate_success(strat, toy_cfg, 1500, RngSeed(19), chunk_size=512)
        assert a.successes == b.successes

    def test_random_tag_rate_near_uniform_guess(self, toy_cfg):
        # u=16: baseline 2^-16; with 10^4 rounds expect ~0 successes
        strat = AttackStrategy("impersonation", "random_tag")
        out = estimate_success(strat, toy_cfg, 10 ** 4, RngSeed(20))
        assert out.success_rate <= 2.0 ** -16 + 5e-4
        assert out.wilson_ci[0] <= 2.0 ** -16

    def test_toy_u4_ci_covers_exact_guess_probability(self):
        cfg = build_config(p=0.05, q=0.4, r=7, beta=0.1, gamma=0.1,
                           t=32, u=4, seed=RngSeed(21))
        strat = AttackStrategy("impersonation", "random_tag")
        out = estimate_success(strat, cfg, 10 ** 5, RngSeed(22))
        lo, hi = out.wilson_ci
        assert lo <= 1 / 16 <= hi

    def test_bitflip_rate_below_epsilon_bound(self, toy_cfg):
        # t=64, u=16: collision chance per round is at most eps = 2^-9
        strat = AttackStrategy("substitution_type1", "bitflip_message")
        out = estimate_success(strat, toy_cfg, 10 ** 4, RngSeed(27))
        assert out.epsilon_bound == pytest.approx(64 / 2.0 ** 15)
        slack = out.wilson_ci[1] - out.success_rate
        assert out.success_rate <= out.epsilon_bound + slack

    def test_bitflip_matches_exhaustive_key_oracle(self):
        # at u=4 every (poly, state) pair can be enumerated: a single-bit
        # message difference never collides, because the corresponding
        # matrix row is a never-zero register window; the Monte-Carlo
        # rate must agree with that exact probability
        from wiretap_auth.lfsr_hash import (GenPoly, HashParams, LfsrHashKey,
                                            hash_message,
                                            _primitive_polys_up_to_degree_12)
        hp = HashParams(32, 4)
        collisions = total = 0
        m0 = random_bits(32, RngSeed(28))
        for mask in _primitive_polys_up_to_degree_12(4):
            for init in range(1, 16):
                key = LfsrHashKey(GenPoly(mask),
                                  BitVector([(init >> k) & 1 for k in range(4)]),
                                  BitVector([0, 0, 0, 0]))
                for pos in range(32):
                    m1 = m0.copy()
                    m1[pos] ^= 1
                    collisions += int(hash_message(m0, key, hp)
                                      == hash_message(m1, key, hp))
                    total += 1
        exact_prob = collisions / total
        assert exact_prob == 0.0

        cfg = build_config(p=0.05, q=0.4, r=7, beta=0.1, gamma=0.1,
                           t=32, u=4, seed=RngSeed(29))
        strat = AttackStrategy("substitution_type1", "bitflip_message")
        out = estimate_success(strat, cfg, 2 * 10 ** 4, RngSeed(30))
        assert out.wilson_ci[0] <= exact_prob <= max(out.wilson_ci[1], 1e-12)

    def test_eve_reuse_indistinguishable_from_random_tag(self):
        # Eve's tag-bit error sits near 1/2, so reusing her estimate is
        # no better than guessing: two-proportion z-test, p > 0.01
        cfg = build_config(p=0.05, q=0.4, r=7, beta=0.1, gamma=0.1,
                           t=32, u=4, seed=RngSeed(23))
        rounds = 2 * 10 ** 4
        a = estimate_success(AttackStrategy("substitution_type2", "eve_decode_reuse"),
                             cfg, rounds, RngSeed(24))
        b = estimate_success(AttackStrategy("substitution_type2", "random_tag"),
                             cfg, rounds, RngSeed(25))
        p_pool = (a.successes + b.successes) / (2 * rounds)
        se = math.sqrt(2 * p_pool * (1 - p_pool) / rounds)
        zstat = abs(a.success_rate - b.success_rate) / se if se else 0.0
        # |z| < 2.576 corresponds to p-value > 0.01
        assert zstat < 2.576

    def test_outcome_validation(self):
        with pytest.raises(ValueError):
            AttackOutcome(10, 11, 1.1, (0.0, 1.0))

    def test_csv_export(self, toy_cfg, tmp_path):
        strat = AttackStrategy("substitution_type1", "bitflip_message")
        out = estimate_success(strat, toy_cfg, 500, RngSeed(26))
        path = tmp_path / "attacks.csv"
        export_outcomes_csv([("toy", out)], path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        assert rows[0]["strategy"] == "substitution_type1/bitflip_message"
        assert int(rows[0]["rounds"]) == 500
        assert set(rows[0].keys()) == {"scenario", "strategy", "rounds",
                                       "successes", "rate", "ci_lo", "ci_hi",
                                       "epsilon_bound"}
