import math

import pytest

from wiretap_auth.bits import BitVector, RngSeed, random_bits
from wiretap_auth.channel import (BscParam, WiretapChannel, binary_entropy,
                                  secrecy_capacity, transmit)
from wiretap_auth.errors import DomainError, NoPositiveSecrecyError


class TestBscParam:
    def test_range(self):
        BscParam(0.0)
        BscParam(0.5)
        with pytest.raises(DomainError):
            BscParam(0.51)
        with pytest.raises(DomainError):
            BscParam(-0.01)

    def test_wiretap_flag(self):
        assert WiretapChannel(BscParam(0.1), BscParam(0.3)).positive_secrecy
        assert not WiretapChannel(BscParam(0.3), BscParam(0.1)).positive_secrecy
        assert not WiretapChannel(BscParam(0.2), BscParam(0.2)).positive_secrecy


class TestTransmit:
    def test_noiseless_identity_exhaustive(self):
        ch = BscParam(0.0)
        for length in range(1, 9):
            for k in range(1 << length):
                v = BitVector([(k >> (length - 1 - j)) & 1 for j in range(length)])
                assert transmit(v, ch, RngSeed(0)) == v

    def test_deterministic(self):
        x = random_bits(512, RngSeed(1))
        a = transmit(x, BscParam(0.2), RngSeed(2, 5))
        b = transmit(x, BscParam(0.2), RngSeed(2, 5))
        assert a == b

    @pytest.mark.parametrize("crossover,lo,hi", [
        (0.5, 0.497, 0.503),   # 3-sigma band at p=0.5, n=1e6
        (0.1, 0.099, 0.101),   # 3-sigma band at p=0.1, n=1e6
    ])
    def test_flip_fraction(self, crossover, lo, hi):
        n = 10 ** 6
        x = BitVector.zeros(n)
        y = transmit(x, BscParam(crossover), RngSeed(3, int(crossover * 10)))
        frac = (x.bits ^ y.bits).sum() / n
        assert lo <= frac <= hi


class TestBinaryEntropy:
    def test_degenerate(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_maximum(self):
        assert binary_entropy(0.5) == 1.0

    def test_value(self):
        assert abs(binary_entropy(0.1) - 0.4690) < 1e-4

    def test_domain(self):
        with pytest.raises(DomainError):
            binary_entropy(1.0001)
        with pytest.raises(DomainError):
            binary_entropy(-0.0001)


class TestSecrecyCapacity:
    def test_equal_channels(self):
        wc = WiretapChannel(BscParam(0.2), BscParam(0.2))
        assert secrecy_capacity(wc) == 0.0

    def test_value(self):
        wc = WiretapChannel(BscParam(0.1), BscParam(0.3))
        assert abs(secrecy_capacity(wc) - 0.4123) < 1e-3

    def test_extreme(self):
        wc = WiretapChannel(BscParam(0.0), BscParam(0.5))
        assert secrecy_capacity(wc) == 1.0

    def test_requires_q_at_least_p(self):
        with pytest.raises(NoPositiveSecrecyError):
            secrecy_capacity(WiretapChannel(BscParam(0.3), BscParam(0.1)))

    def test_monotone_in_q(self):
        p = 0.1
        q = p
        prev = -math.inf
        while q <= 0.5 + 1e-12:
            cap = secrecy_capacity(WiretapChannel(BscParam(p), BscParam(min(q, 0.5))))
            assert cap >= prev - 1e-12
            prev = cap
            q += 0.05
