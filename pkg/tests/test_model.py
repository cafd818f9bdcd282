import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from liquidity_curves import (
    CurveParams,
    GrowthVector,
    PoolState,
    WeightPolicy,
    implied_weights,
    parse_pool,
    pool_init,
    serialize_pool,
)
from liquidity_curves.errors import (
    InvariantViolation,
    KOutOfRange,
    MalformedDocument,
    MultipleUnknowns,
    NonPositiveGrowth,
    NonPositiveInput,
    PolicyViolation,
)


class TestPoolInit:
    def test_symmetric_pool(self):
        pool = pool_init(["A", "B"], [100, 100], [1, 1], 0.5)
        assert pool.alpha0 == -200
        assert pool.supply == 200
        assert pool.step == 0

    def test_equal_values_accepted(self):
        pool = pool_init(["A", "B"], [100, 50], [1, 2], 0.5)
        assert pool.alpha0 == -200

    def test_policy_violation(self):
        with pytest.raises(PolicyViolation):
            pool_init(["A", "B"], [100, 50], [1, 1], 0.5)

    def test_constant_policy(self):
        pool = pool_init(["A", "B"], [60, 40], [1, 1], 0.5, WeightPolicy.constant([0.6, 0.4]))
        assert pool.supply == 100

    @pytest.mark.parametrize("amounts, prices", [([0, 100], [1, 1]), ([100, 100], [1, -1])])
    def test_non_positive(self, amounts, prices):
        with pytest.raises(NonPositiveInput):
            pool_init(["A", "B"], amounts, prices, 0.5)

    @pytest.mark.parametrize("k", [-0.1, 1.5])
    def test_k_range(self, k):
        with pytest.raises(KOutOfRange):
            pool_init(["A", "B"], [100, 100], [1, 1], k)

    def test_genesis_weights_reproduced(self):
        pool = pool_init(["A", "B", "C"], [60, 30, 10], [1, 1, 1], 0.3, WeightPolicy.constant([0.6, 0.3, 0.1]))
        w = implied_weights(pool, [1, 1, 1])
        assert w.omega == pytest.approx(pool.weights().omega, abs=1e-12)
        assert pool.prices() == pytest.approx([1, 1, 1], rel=1e-12)


class TestImpliedWeights:
    @pytest.mark.parametrize(
        "alpha, prices, expected",
        [([100, 100], [1, 1], [0.5, 0.5]), ([100, 50], [1, 2], [0.5, 0.5]), ([300, 100], [1, 1], [0.75, 0.25])],
    )
    def test_values(self, alpha, prices, expected):
        pool = PoolState(("A", "B"), tuple(alpha), -400.0)
        assert list(implied_weights(pool, prices).omega) == expected

    def test_rejects_non_positive_price(self, pool2):
        with pytest.raises(NonPositiveInput):
            implied_weights(pool2, [1, 0])


class TestInvariants:
    def test_alpha0_must_be_negative(self):
        with pytest.raises(InvariantViolation):
            PoolState(("A",), (1.0,), 1.0)

    def test_balances_positive(self):
        with pytest.raises(InvariantViolation):
            PoolState(("A", "B"), (1.0, 0.0), -1.0)

    def test_pool_symbol_reserved(self):
        with pytest.raises(InvariantViolation):
            PoolState(("POOL",), (1.0,), -1.0)

    def test_growth_vector(self):
        with pytest.raises(MultipleUnknowns):
            GrowthVector((None, None), 1.0)
        with pytest.raises(NonPositiveGrowth):
            GrowthVector((1.0, -0.5), 1.0)
        assert GrowthVector((1.0, None), 1.0).unknown_index == 1
        assert GrowthVector((1.0, 2.0), None).unknown_index == -1


class TestSerialization:
    def test_round_trip(self, pool2):
        assert parse_pool(serialize_pool(pool2)) == pool2

    @given(
        amounts=st.lists(st.floats(1e-6, 1e12), min_size=1, max_size=6),
        supply=st.floats(1e-6, 1e15),
        k=st.floats(0, 1),
        step=st.integers(0, 10**6),
    )
    def test_round_trip_bit_exact(self, amounts, supply, k, step):
        pool = PoolState(tuple(f"T{i}" for i in range(len(amounts))), tuple(amounts), -supply, CurveParams(k), step=step)
        back = parse_pool(serialize_pool(pool))
        assert back == pool
        assert back.alpha == pool.alpha and back.alpha0 == pool.alpha0 and back.k == pool.k

    def test_constant_policy_round_trip(self):
        pool = PoolState(("A", "B"), (1.0, 2.0), -3.0, weight_policy=WeightPolicy.constant([0.1, 0.9]))
        assert parse_pool(serialize_pool(pool)) == pool

    def test_document_shape(self, pool2):
        doc = json.loads(serialize_pool(pool2))
        assert doc["version"] == 1
        assert doc["pool_token_supply"] == "200"
        assert doc["tokens"] == [{"symbol": "A", "amount": "100"}, {"symbol": "B", "amount": "100"}]
        assert doc["weight_policy"] == {"kind": "equal"}

    def _doc(self, pool2, **changes):
        doc = json.loads(serialize_pool(pool2))
        doc.update(changes)
        return json.dumps(doc)

    def test_positive_alpha0_rejected(self, pool2):
        with pytest.raises(InvariantViolation):
            parse_pool(self._doc(pool2, pool_token_supply="-200"))

    def test_k_out_of_range_rejected(self, pool2):
        with pytest.raises(InvariantViolation):
            parse_pool(self._doc(pool2, k="1.5"))

    @pytest.mark.parametrize("text", ["not json", "[]", '{"version": 2}', '{"version": 1, "k": "0.5"}'])
    def test_malformed(self, text):
        with pytest.raises(MalformedDocument):
            parse_pool(text)

    def test_numbers_must_be_strings(self, pool2):
        with pytest.raises(MalformedDocument):
            parse_pool(self._doc(pool2, k=0.5))
