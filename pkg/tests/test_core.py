import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from awediv.core import (Chunk, ContingencyTable, Instance, LabelIndex, OracleMatrix,
                         all_pair_counts, contingency_from_oracle)

Y, N = True, False


def oracle_from_columns(*cols):
    return OracleMatrix(np.array(cols, dtype=bool).T)


@pytest.mark.parametrize("ci, cj, expected", [
    ([Y, Y, N, N], [Y, N, Y, N], (0.25, 0.25, 0.25, 0.25)),
    ([Y, Y, Y, Y], [Y, Y, Y, Y], (1, 0, 0, 0)),
    ([Y, Y, Y, N], [Y, Y, N, Y], (0.5, 0.25, 0.25, 0)),
])
def test_contingency_examples(ci, cj, expected):
    t = contingency_from_oracle(oracle_from_columns(ci, cj), 0, 1)
    assert t.proportions() == pytest.approx(expected, abs=0)


def test_b_is_i_wrong_j_right():
    t = contingency_from_oracle(oracle_from_columns([N, Y], [Y, Y]), 0, 1)
    assert (t.n_a, t.n_b, t.n_c, t.n_d) == (1, 1, 0, 0)


def test_contingency_errors():
    o = oracle_from_columns([Y, N], [N, N])
    with pytest.raises(ValueError):
        contingency_from_oracle(o, 1, 1)
    with pytest.raises(IndexError):
        contingency_from_oracle(o, 0, 2)
    with pytest.raises(IndexError):
        contingency_from_oracle(o, -1, 0)


oracles = arrays(bool, st.tuples(st.integers(1, 25), st.integers(2, 6)))


@given(oracles, st.data())
def test_swap_exchanges_b_and_c(entries, data):
    o = OracleMatrix(entries)
    L = o.n_classifiers
    i = data.draw(st.integers(0, L - 1))
    j = data.draw(st.integers(0, L - 1).filter(lambda k: k != i))
    t, u = contingency_from_oracle(o, i, j), contingency_from_oracle(o, j, i)
    assert (t.a, t.b, t.c, t.d) == (u.a, u.c, u.b, u.d)
    assert t.transposed() == u


@given(oracles)
def test_counts_are_integers_summing_to_n(entries):
    o = OracleMatrix(entries)
    for i in range(o.n_classifiers):
        for j in range(i + 1, o.n_classifiers):
            t = contingency_from_oracle(o, i, j)
            counts = [x * o.n_samples for x in t.proportions()]
            assert all(abs(c - round(c)) < 1e-9 and c >= 0 for c in counts)
            assert sum(round(c) for c in counts) == o.n_samples
            assert abs(sum(t.proportions()) - 1) <= 1e-12


@given(oracles)
def test_all_pair_counts_matches_pairwise_tables(entries):
    o = OracleMatrix(entries)
    cells = all_pair_counts(o.entries)
    k = 0
    for i in range(o.n_classifiers):
        for j in range(i + 1, o.n_classifiers):
            t = contingency_from_oracle(o, i, j)
            assert tuple(cells[k]) == (t.n_a, t.n_b, t.n_c, t.n_d)
            k += 1


def test_oracle_validation():
    with pytest.raises(ValueError):
        OracleMatrix(np.ones((3, 1), dtype=bool))
    with pytest.raises(ValueError):
        OracleMatrix(np.ones((0, 3), dtype=bool))
    with pytest.raises(ValueError):
        OracleMatrix(np.array([[0, 2], [1, 1]]))


def test_signed_coding_round_trip():
    signed = np.array([[1, -1], [-1, -1], [1, 1]])
    o = OracleMatrix.from_signed(signed)
    assert o.entries.tolist() == [[Y, N], [N, N], [Y, Y]]
    assert (o.signed() == signed).all()
    with pytest.raises(ValueError):
        OracleMatrix.from_signed([[0, 1]])


def test_oracle_is_immutable():
    o = OracleMatrix(np.array([[1, 0]], dtype=bool))
    with pytest.raises(ValueError):
        o.entries[0, 0] = False


def test_from_predictions():
    o = OracleMatrix.from_predictions([[0, 1], [1, 1]], [0, 1])
    assert o.entries.tolist() == [[Y, N], [Y, Y]]


def test_contingency_rejects_bad_tables():
    with pytest.raises(ValueError):
        ContingencyTable(-1, 1, 0, 0)
    with pytest.raises(ValueError):
        ContingencyTable(0, 0, 0, 0)
    with pytest.raises(ValueError):
        ContingencyTable(1, 1, 1, 1, total=5)


def test_label_index_dense_in_first_appearance_order():
    idx = LabelIndex()
    assert [idx.add(x) for x in "bab c".split()] == [0, 1]
    assert idx.add("c") == 1 and idx.add("bab") == 0
    closed = LabelIndex(["x", "y"], closed=True)
    assert closed.add("y") == 1
    with pytest.raises(KeyError):
        closed.add("z")


def test_chunk_from_instances():
    labels = LabelIndex()
    insts = [Instance((1.0, 2.0), "A"), Instance((3.0, 4.0), "B", 5.0)]
    c = Chunk.from_instances(insts, 3, labels)
    assert c.features.tolist() == [[1, 2], [3, 4]]
    assert c.labels.tolist() == [0, 1] and c.n_classes == 2 and c.index == 3
    assert c.amounts is None  # only attached when every instance has one
    assert c.class_priors().tolist() == [0.5, 0.5]
    with pytest.raises(ValueError):
        Chunk.from_instances([Instance((1.0,))], 0, labels)


def test_negative_amount_rejected():
    with pytest.raises(ValueError):
        Instance((1.0,), "A", -1.0)
