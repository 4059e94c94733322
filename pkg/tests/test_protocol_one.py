import inspect
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapsim.harness import estimate_agreement_p1
from swapsim.protocol_one import (
    HiddenVariables,
    alice_step,
    bob_step,
    referee_step,
    run_protocol1,
    sample_protocol1,
)
from swapsim.sampler import count, protocol1_batches
from swapsim.streams import LAMBDA_AR, LAMBDA_RB, StreamCursor
from swapsim.table import weight

PI = math.pi
Q = PI / 4
lambdas = st.floats(0.0, Q)
angles = st.floats(-20.0, 20.0, allow_nan=False)


class TestAlice:
    def test_pi_over_three(self):
        d = alice_step(PI / 3, 0.5)
        assert (d.a, d.jA, d.cA) == (1, 1, 1)
        assert d.phiA_prime == pytest.approx(PI / 12, abs=1e-15)
        assert d.phiA_prime == pytest.approx(0.2618, abs=1e-4)

    def test_zero_uses_plus_sign(self):
        d = alice_step(0.0, 0.1)
        assert (d.a, d.jA, d.phiA_prime, d.cA) == (1, 0, 0.0, 1)

    def test_five_quarter_pi(self):
        d = alice_step(5 * PI / 4, 0.01)
        assert (d.a, d.jA, d.phiA_prime, d.cA) == (-1, 1, 0.0, 1)

    @given(angles, lambdas)
    def test_invariants(self, phi, lam):
        d = alice_step(phi, lam)
        assert 0.0 <= d.phiA_prime < Q
        assert d.jA in (0, 1, 2, 3)
        s = math.sin(phi)
        if abs(s) > 1e-9:
            assert d.a == (1 if s > 0 else -1)
        assert d.cA == int(d.phiA_prime < lam)

    def test_depends_only_on_own_inputs(self):
        # callable before any message exists; no other party's data in the signature
        assert list(inspect.signature(alice_step).parameters) == ["phiA", "lambdaAR"]
        assert alice_step(2.0, 0.3) == alice_step(2.0, 0.3)

    def test_rejects_bad_lambda(self):
        with pytest.raises(ValueError):
            alice_step(0.0, 1.0)


class TestReferee:
    @pytest.mark.parametrize("lar, lrb, expected", [(0.1, 0.2, 1), (0.2, 0.1, 0), (0.1, 0.1, 0)])
    def test_strict_comparison(self, lar, lrb, expected):
        assert referee_step(lar, lrb) == expected


class TestBob:
    def test_zero_weight_row(self):
        d = bob_step(0.0, 0.3, 0, 1, 1, 0.99)
        assert (d.jB, d.cB, d.beta, d.b) == (0, 0, 1, -1)
        assert d.phiB_prime - 0.3 == pytest.approx(-0.3)
        assert weight(0, 1, 1, 0, -0.3) == 0.0

    @pytest.mark.parametrize("ca, cr", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_u_zero_accepts_positive_weight(self, ca, cr):
        d = bob_step(PI / 2, 0.0, 0, ca, cr, 0.0)
        assert d.jB == 2 and d.cB == 0
        if weight(2, ca, cr, 0, PI / 2) > 0:
            assert d.b == d.beta

    def test_tie_at_bracket(self):
        d = bob_step(PI / 8, PI / 8, 0, 0, 0, 0.5)
        assert d.phiB_prime == pytest.approx(PI / 8)
        assert (d.jB, d.cB) == (0, 0)

    @settings(max_examples=2000)
    @given(angles, lambdas, st.integers(0, 3), st.integers(0, 1), st.integers(0, 1), st.floats(0, 1, exclude_max=True))
    def test_never_leaves_weight_domain(self, phi, lam, ja, ca, cr, u):
        d = bob_step(phi, lam, ja, ca, cr, u)
        assert d.b in (d.beta, -d.beta)
        assert d.jB == min(int(4 * d.phiB_prime / PI), 3)

    def test_bulk_valid_inputs(self, rng):
        n = 200_000
        phi_a, phi_b = rng.uniform(-10, 10, size=(2, n))
        # raises WeightDomainError if any gamma left its column
        sample_protocol1(phi_a, phi_b, rng.uniform(0, Q, n), rng.uniform(0, Q, n), rng.random(n))


class TestRound:
    def test_four_bits(self, rng):
        for _ in range(200):
            hv = HiddenVariables.from_uniforms(rng.random(), rng.random())
            a, b, bits = run_protocol1(rng.uniform(0, 2 * PI), rng.uniform(0, 2 * PI), hv, rng.random())
            assert bits == 4 and a in (-1, 1) and b in (-1, 1)

    def test_scalar_matches_batch(self, rng):
        n = 2000
        pa, pb = rng.uniform(0, 2 * PI, size=(2, n))
        lar, lrb, u = rng.uniform(0, Q, n), rng.uniform(0, Q, n), rng.random(n)
        batch = sample_protocol1(pa, pb, lar, lrb, u)
        for k in range(n):
            a, b, _ = run_protocol1(pa[k], pb[k], HiddenVariables(lar[k], lrb[k]), u[k])
            assert (a, b) == (batch.a[k], batch.b[k])

    def test_hidden_variable_range(self):
        with pytest.raises(ValueError):
            HiddenVariables(-0.1, 0.2)


def _z(p1, n1, p2, n2):
    se = math.sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2)
    return 0.0 if se == 0 else (p1 - p2) / se


class TestStatistics:
    N = 1_000_000

    @pytest.mark.parametrize("phi", [0.0, 0.7, PI, 5 * PI / 4, 4.4, 6.1])
    def test_equal_angles_never_agree(self, phi):
        assert estimate_agreement_p1(phi, phi, 200_000, 3).estimate == 0.0

    def test_quarter_turn(self):
        res = estimate_agreement_p1(0.0, PI / 2, self.N, 11)
        assert abs(res.z(0.5)) <= 4.0

    def test_random_pairs_small(self, rng):
        for k, (pa, pb) in enumerate(rng.uniform(0, 2 * PI, size=(10, 2))):
            res = estimate_agreement_p1(pa, pb, 200_000, 100 + k)
            assert abs(res.z(math.sin((pa - pb) / 2) ** 2)) <= 4.5

    @pytest.mark.parametrize("base", [(0.3, 1.9), (2.2, 5.0)])
    def test_symmetry_relations(self, base):
        pa, pb = base
        n = self.N

        def p(a, b, seed):
            return estimate_agreement_p1(a, b, n, seed).estimate

        ref = p(pa, pb, 1)
        assert abs(_z(ref, n, 1 - p(pa, pb + PI, 2), n)) <= 4.5
        assert abs(_z(ref, n, 1 - p(pa + PI, pb, 3), n)) <= 4.5
        assert abs(_z(ref, n, p(pa + PI, pb + PI, 4), n)) <= 4.5
        for j in range(1, 8):
            assert abs(_z(ref, n, p(pa + j * Q, pb + j * Q, 10 + j), n)) <= 4.5


def test_bilocal_streams_uncorrelated():
    n = 1_000_000
    ar = StreamCursor(5, LAMBDA_AR).take(n)
    rb = StreamCursor(5, LAMBDA_RB).take(n)
    assert abs(np.corrcoef(ar, rb)[0, 1]) < 4 / math.sqrt(n)


def test_batches_cover_exactly_n():
    assert count(protocol1_batches(0.1, 0.2, 300_001, 1)).n == 300_001
