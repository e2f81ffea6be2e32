import io

import numpy as np
import pytest

from dynmix import degrees


def test_make_regular_basic():
    seq = degrees.make_regular(4, 3)
    assert seq.ell == 12 and seq.m == 6 and seq.n == 4
    seq = degrees.make_regular(5, 2)
    assert seq.ell == 10 and seq.m == 5


def test_make_regular_rejects_odd_total():
    with pytest.raises(ValueError, match="odd"):
        degrees.make_regular(3, 3)


def test_make_regular_rejects_low_degree():
    with pytest.raises(ValueError):
        degrees.make_regular(4, 1)


def test_load_degrees_variants():
    seq = degrees.load_degrees("3 3 3 3")
    assert seq.n == 4 and seq.ell == 12
    seq = degrees.load_degrees(io.StringIO("2\n3 3\n4\n"))
    assert seq.ell == 12
    assert list(seq.degrees) == [2, 3, 3, 4]


def test_load_degrees_rejects_degree_one():
    with pytest.raises(ValueError, match="degree"):
        degrees.load_degrees("1 3")


def test_load_degrees_rejects_garbage():
    with pytest.raises(ValueError, match="non-integer"):
        degrees.load_degrees("3 x 3")
    with pytest.raises(ValueError, match="odd"):
        degrees.load_degrees("2 3")
    with pytest.raises(ValueError):
        degrees.load_degrees("")


def test_load_degrees_from_file(tmp_path):
    path = tmp_path / "deg.txt"
    path.write_text("2 2 3 3\n")
    seq = degrees.load_degrees(str(path))
    assert list(seq.degrees) == [2, 2, 3, 3]


def test_regularity_values():
    assert degrees.regularity(degrees.make_regular(8, 3)).nu == pytest.approx(2.0)
    assert degrees.regularity(degrees.make_regular(4, 2)).nu == pytest.approx(1.0)
    rep = degrees.regularity(degrees.from_degrees([2, 3, 3, 4]))
    assert rep.nu == pytest.approx(26 / 12)
    assert rep.max_degree == 4 and rep.min_degree == 2
    assert rep.ell_even and rep.min_degree_ok


@pytest.mark.parametrize("n,d", [(4, 3), (10, 4), (9, 2), (6, 5)])
def test_regular_nu_is_d_minus_one(n, d):
    if (n * d) % 2:
        n += 1
    assert degrees.regularity(degrees.make_regular(n, d)).nu == pytest.approx(d - 1)


def test_half_edge_indexing_consistency():
    seq = degrees.from_degrees([2, 3, 3, 4])
    covered = []
    for v in range(seq.n):
        start, end = seq.sibling_range(v)
        covered.extend(range(start, end))
        for x in range(start, end):
            assert seq.half_edge_owner(x) == v
    assert covered == list(range(seq.ell))
    for x in range(seq.ell):
        assert seq.out_degree(x) == seq.degrees[seq.half_edge_owner(x)] - 1
    with pytest.raises(IndexError):
        seq.half_edge_owner(seq.ell)


def test_digest_stable_and_distinct():
    a = degrees.make_regular(4, 3)
    b = degrees.make_regular(4, 3)
    c = degrees.from_degrees([3, 3, 3, 3, 2, 2])
    assert a.digest() == b.digest()
    assert a.digest() != c.digest()


def test_positive_nu_for_accepted_sequences():
    for seq in [degrees.make_regular(6, 2), degrees.from_degrees([2, 5, 3, 4])]:
        assert seq.ell % 2 == 0
        assert degrees.regularity(seq).nu > 0
        assert int(np.min(seq.degrees)) >= 2
