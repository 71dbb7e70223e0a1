import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from esqubo.encoding import Encoding, decode, encode_nearest, from_bitstring, to_bitstring
from esqubo.errors import LengthMismatchError, WeightRangeError


@pytest.mark.parametrize(
    "bits, w",
    [([0, 0, 0, 0], 0.0), ([1, 0, 0, 0], 0.5), ([1, 1, 1, 1], 0.9375), ([0, 0, 0, 1], 0.0625)],
)
def test_decode_single_asset(bits, w):
    assert decode(Encoding(1, 4), bits)[0] == w


def test_decode_two_assets():
    np.testing.assert_array_equal(decode(Encoding(2, 3), [0, 1, 0, 1, 0, 1]), [0.25, 0.625])


def test_decode_batch():
    enc = Encoding(2, 2)
    xs = np.array([[1, 0, 0, 1], [1, 1, 1, 1]])
    np.testing.assert_array_equal(decode(enc, xs), [[0.5, 0.25], [0.75, 0.75]])


def test_length_mismatch():
    with pytest.raises(LengthMismatchError):
        decode(Encoding(2, 3), [0, 1, 0])
    with pytest.raises(LengthMismatchError):
        encode_nearest(Encoding(2, 3), [0.5])


def test_encode_examples():
    np.testing.assert_array_equal(encode_nearest(Encoding(1, 4), [0.5]), [1, 0, 0, 0])
    one = Encoding(1, 1)
    assert encode_nearest(one, [0.24])[0] == 0
    assert encode_nearest(one, [0.25])[0] == 0  # tie goes down
    assert encode_nearest(one, [0.49])[0] == 1  # 0.5 is the nearer grid point
    assert encode_nearest(one, [0.99])[0] == 1  # clipped to the top of the grid


def test_encode_rejects_out_of_range():
    for w in ([1.0], [-0.01], [np.nan]):
        with pytest.raises(WeightRangeError):
            encode_nearest(Encoding(1, 3), w)


@pytest.mark.parametrize("b", range(1, 9))
def test_round_trip_exhaustive(b):
    enc = Encoding(1, b)
    for m in range(2**b):
        w = m / 2**b
        x = encode_nearest(enc, [w])
        assert decode(enc, x)[0] == w
        # binary integer reading of the block
        assert int("".join(map(str, x)), 2) == m


@pytest.mark.parametrize("b", range(1, 7))
def test_decode_injective_and_bounded(b):
    enc = Encoding(1, b)
    ws = [decode(enc, list(bits))[0] for bits in itertools.product((0, 1), repeat=b)]
    assert len(set(ws)) == 2**b
    assert min(ws) == 0 and max(ws) == 1 - 2.0**-b
    assert ws == sorted(ws)  # lexicographic order = numeric order


@given(st.integers(1, 4), st.integers(1, 6), st.data())
def test_weights_never_negative(n, b, data):
    enc = Encoding(n, b)
    x = data.draw(st.lists(st.integers(0, 1), min_size=enc.total_bits, max_size=enc.total_bits))
    w = decode(enc, x)
    assert np.all(w >= 0)
    assert 0 <= w.sum() <= n * (1 - 2.0**-b)


def test_bitstring_round_trip():
    x = np.array([0, 1, 1, 0, 1], dtype=np.int8)
    assert to_bitstring(x) == "01101"
    np.testing.assert_array_equal(from_bitstring("01101"), x)
