import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import brute
from awediv.core import ContingencyTable, OracleMatrix, contingency_from_oracle
from awediv.diversity import (ensemble_accuracy, nonpairwise_measures, pairwise_averages,
                              pairwise_measures, static_measures, summary_from_counts)

Y, N = True, False
oracles = arrays(bool, st.tuples(st.integers(1, 20), st.integers(2, 6)))


def table(a, b, c, d):
    return ContingencyTable(a, b, c, d)


class TestPairwise:
    def test_balanced_table(self):
        m = pairwise_measures(table(1, 1, 1, 1))
        assert (m.rho, m.q, m.dis, m.df) == (0, 0, 0.5, 0.25)
        assert not m.degenerate

    def test_unanimous_correct_is_degenerate(self):
        m = pairwise_measures(table(4, 0, 0, 0))
        assert (m.rho, m.q, m.dis, m.df) == (0, 0, 0, 0)
        assert m.degenerate == {"rho", "q"}

    def test_negative_dependence(self):
        # ad - bc = -1/16, rho denominator = 3/16
        m = pairwise_measures(table(2, 1, 1, 0))
        assert m.q == -1
        assert m.rho == pytest.approx(-1 / 3, abs=1e-15)
        assert (m.dis, m.df) == (0.5, 0)

    def test_only_q_degenerate(self):
        # b = d = 0: ad + bc = 0 but rho's denominator is zero too
        m = pairwise_measures(table(3, 0, 1, 0))
        assert "q" in m.degenerate

    @settings(max_examples=1000)
    @given(st.lists(st.floats(1e-3, 1.0), min_size=4, max_size=4))
    def test_rho_bounded_by_q_with_same_sign(self, cells):
        m = pairwise_measures(table(*cells))
        assert not m.degenerate
        assert abs(m.rho) <= abs(m.q) + 1e-12
        assert np.sign(m.rho) == np.sign(m.q) or abs(m.q) < 1e-12

    @given(st.lists(st.integers(0, 50), min_size=4, max_size=4).filter(lambda v: sum(v) > 0))
    def test_dis_and_df_read_the_table(self, cells):
        t = table(*cells)
        m = pairwise_measures(t)
        assert m.dis == t.b + t.c
        assert m.df == t.d


class TestAverages:
    def test_two_classifiers_equal_single_pair(self):
        o = OracleMatrix(np.array([[Y, Y], [Y, N], [N, Y], [N, N]]))
        avg = pairwise_averages(o)
        single = pairwise_measures(contingency_from_oracle(o, 0, 1))
        assert avg.as_dict() == single.as_dict()

    def test_identical_all_correct_columns(self):
        avg = pairwise_averages(OracleMatrix(np.ones((5, 4), dtype=bool)))
        assert avg.dis == 0 and avg.df == 0

    def test_random_6x4_equals_explicit_pair_mean(self, rng):
        o = OracleMatrix(rng.random((6, 4)) < 0.6)
        pairs = [pairwise_measures(contingency_from_oracle(o, i, j))
                 for i, j in itertools.combinations(range(4), 2)]
        assert len(pairs) == 6
        avg = pairwise_averages(o)
        for name in ("rho", "q", "dis", "df"):
            assert getattr(avg, name) == pytest.approx(
                sum(getattr(p, name) for p in pairs) / 6, abs=1e-15)


class TestAccuracy:
    def test_two_by_two(self):
        s = ensemble_accuracy(OracleMatrix(np.array([[Y, Y], [Y, N]])))
        assert s.l_mass.tolist() == [0, 1]
        assert s.big_p == 0.75 and s.big_p_weighted == 0.75
        assert s.p_per_classifier.tolist() == [1.0, 0.5]

    def test_all_correct_and_all_wrong(self):
        s = ensemble_accuracy(OracleMatrix(np.ones((3, 3), dtype=bool)))
        assert s.big_p == 1 and not s.l_mass.any()
        s = ensemble_accuracy(OracleMatrix(np.zeros((3, 3), dtype=bool)))
        assert s.big_p == 0 and (s.l_mass == 3).all()

    def test_weighted_mass(self):
        o = OracleMatrix(np.array([[Y, N, N], [N, Y, Y]]))
        w = [0.5, 0.25, 0.25]
        s = ensemble_accuracy(o, w)
        assert s.l_mass == pytest.approx([1.5, 1.5])
        assert s.big_p == pytest.approx(s.big_p_weighted, abs=1e-12)
        assert not s.uniform

    @pytest.mark.parametrize("weights", [[0.5, 0.5, 0.5], [1.2, -0.2], [0.3, 0.3]])
    def test_bad_weights(self, weights):
        o = OracleMatrix(np.ones((2, 2), dtype=bool))
        with pytest.raises(ValueError):
            ensemble_accuracy(o, weights)

    @given(oracles, st.data())
    def test_mass_and_column_forms_agree(self, entries, data):
        o = OracleMatrix(entries)
        raw = data.draw(st.lists(st.floats(0.01, 1), min_size=o.n_classifiers,
                                 max_size=o.n_classifiers))
        w = np.array(raw) / sum(raw)
        for weights in (None, w):
            s = ensemble_accuracy(o, weights)
            assert abs(s.big_p - s.big_p_weighted) <= 1e-12

    @given(oracles)
    def test_uniform_mass_counts_failures(self, entries):
        s = ensemble_accuracy(OracleMatrix(entries))
        assert (s.l_mass == (~entries).sum(axis=1)).all()
        assert s.failure_histogram.sum() == pytest.approx(1, abs=1e-12)


class TestNonPairwise:
    def test_entropy_three_classifiers(self):
        o = OracleMatrix(np.array([[Y, Y, Y], [Y, N, N]]))
        assert nonpairwise_measures(o).entropy_e == 0.5

    def test_unanimity_conventions(self):
        m = nonpairwise_measures(OracleMatrix(np.ones((4, 3), dtype=bool)))
        assert (m.entropy_e, m.kw, m.entropy_cc, m.kappa, m.gd) == (0, 0, 0, 1, 1)
        assert m.degenerate == {"kappa", "gd"}

    def test_full_disagreement(self):
        o = OracleMatrix(np.array([[Y, N], [N, Y]]))
        s = ensemble_accuracy(o)
        m = nonpairwise_measures(o, s)
        assert s.l_mass.tolist() == [1, 1] and s.big_p == 0.5
        assert m.kw == 0.25
        assert m.kappa == -1

    def test_generalized_diversity_from_histogram(self):
        # L = 2, T = (0, 0.5, 0.5): num = 0.5, den = 0.75
        s = summary_from_counts([1, 1], [0, 1, 1], 2)
        from awediv.diversity import nonpairwise_from_summary
        assert nonpairwise_from_summary(s).gd == pytest.approx(1 / 3, abs=1e-15)

    def test_gd_extremes(self):
        # failures never coincide -> 1; failures always simultaneous -> 0
        single = OracleMatrix(np.array([[N, Y, Y], [Y, N, Y], [Y, Y, Y]]))
        assert nonpairwise_measures(single).gd == 1
        together = OracleMatrix(np.array([[N, N, N], [Y, Y, Y]]))
        assert nonpairwise_measures(together).gd == 0

    def test_summary_must_match_oracle(self):
        o = OracleMatrix(np.ones((3, 2), dtype=bool))
        other = ensemble_accuracy(OracleMatrix(np.ones((4, 2), dtype=bool)))
        with pytest.raises(ValueError):
            nonpairwise_measures(o, other)

    @given(oracles)
    def test_ranges_and_unanimity(self, entries):
        o = OracleMatrix(entries)
        m = nonpairwise_measures(o)
        fails = o.failure_counts()
        unanimous = bool(np.isin(fails, (0, o.n_classifiers)).all())
        assert 0 <= m.kw <= 0.25 + 1e-15
        assert (m.kw == 0) == unanimous
        assert (m.entropy_e == 0) == unanimous
        assert 0 <= m.entropy_e <= 1 + 1e-12
        assert 0 <= m.entropy_cc <= 1
        assert m.kappa <= 1 + 1e-12
        assert 0 <= m.gd <= 1 + 1e-12

    @given(oracles)
    def test_kw_is_scaled_disagreement(self, entries):
        o = OracleMatrix(entries)
        L = o.n_classifiers
        kw = nonpairwise_measures(o).kw
        assert kw == pytest.approx((L - 1) / (2 * L) * pairwise_averages(o).dis, abs=1e-12)

    def test_kappa_falls_as_disagreement_grows(self):
        # N = 4, L = 4, P = 0.5 throughout; disagreement mass grows left to right
        blocks = [
            [[Y] * 4, [Y] * 4, [N] * 4, [N] * 4],
            [[Y] * 4, [Y, Y, Y, N], [N, N, N, Y], [N] * 4],
            [[Y, Y, Y, N], [Y, Y, Y, N], [N, N, N, Y], [N, N, N, Y]],
            [[Y, Y, N, N]] * 4,
        ]
        kappas = []
        for rows in blocks:
            o = OracleMatrix(np.array(rows))
            assert ensemble_accuracy(o).big_p == 0.5
            kappas.append(nonpairwise_measures(o).kappa)
        assert kappas == sorted(kappas, reverse=True)
        assert len(set(kappas)) == 4


@settings(max_examples=300, deadline=None)
@given(oracles)
def test_matches_brute_force(entries):
    o = OracleMatrix(entries)
    got = static_measures(o)
    ref = brute.all_measures(entries.astype(int).tolist())
    values = {"p": got.accuracy.big_p, **got.pairwise.as_dict(), **got.nonpairwise.as_dict()}
    for name, expected in ref.items():
        assert math.isclose(values[name], expected, rel_tol=0, abs_tol=1e-12), name
