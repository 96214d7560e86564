from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellstruct.coefficients import BellCoefficients, SLKParams, build_cglmp, build_chsh, build_slk
from bellstruct.errors import InputError, InvalidInequalityError
from bellstruct.localrealism import (
    DeterministicStrategy,
    all_strategy_values,
    enumerate_strategies,
    lr_bound,
    optimal_slk_bound_closed_form,
    strategy_value,
)

from conftest import random_table

ETAS = [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)]


def residue_oracle(eps):
    """Maximize sum eps_ab(alpha_ab) over residue quadruples with alpha11 + alpha22 = alpha12 + alpha21 mod d."""
    d = eps.shape[-1]
    best = -math.inf
    for a11, a12, a21, a22 in itertools.product(range(d), repeat=4):
        if (a11 + a22 - a12 - a21) % d:
            continue
        best = max(best, eps[0, 0, a11] + eps[0, 1, a12] + eps[1, 0, a21] + eps[1, 1, a22])
    return best


class TestEnumeration:
    @pytest.mark.parametrize("d, n", [(2, 16), (3, 81), (4, 256)])
    def test_count_and_distinct(self, d, n):
        strategies = enumerate_strategies(d)
        assert len(strategies) == n
        assert len(set(strategies)) == n

    def test_d3_constraint(self):
        for s in enumerate_strategies(3):
            r = s.residues(3)
            assert (r[0] + r[3] - r[1] - r[2]) % 3 == 0

    def test_all_zero_strategy(self):
        assert DeterministicStrategy(0, 0, 0, 0).residues(3) == (0, 0, 0, 0)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_constraint_closure(self, d):
        counts: dict[tuple[int, ...], int] = {}
        for s in enumerate_strategies(d):
            r = s.residues(d)
            counts[r] = counts.get(r, 0) + 1
        constrained = {
            q for q in itertools.product(range(d), repeat=4) if (q[0] + q[3] - q[1] - q[2]) % d == 0
        }
        assert set(counts) == constrained
        assert len(constrained) == d**3
        assert set(counts.values()) == {d}

    def test_rejects_large_d(self):
        with pytest.raises(InputError):
            enumerate_strategies(17)
        with pytest.raises(InputError):
            lr_bound(BellCoefficients.zeros(17))


class TestStrategyValue:
    def test_cglmp_zero_strategy(self):
        assert strategy_value((0, 0, 0, 0), build_cglmp(3)) == pytest.approx(2)

    def test_chsh_zero_strategy(self):
        assert strategy_value(DeterministicStrategy(0, 0, 0, 0), build_chsh()) == pytest.approx(2)

    def test_vectorized_values_agree(self, rng):
        c = BellCoefficients.from_probability(random_table(rng, 4, real_probability=True))
        values = all_strategy_values(c)
        for s, v in zip(enumerate_strategies(4), values):
            assert strategy_value(s, c) == pytest.approx(v, abs=1e-12)

    def test_slk_delta_zero_cannot_reach_all_peaks(self):
        c = build_slk(3, SLKParams(0.0, 0.5, 0.5))
        values = [strategy_value(s, c) for s in enumerate_strategies(3)]
        assert max(values) == pytest.approx(2.0, abs=1e-12)
        assert max(values) < 4 * (3 - 1) / 2 - 1
        assert max(values) == pytest.approx(residue_oracle(c.epsilon.real), abs=1e-12)

    def test_complex_coefficients_rejected(self):
        f = np.zeros((2, 2, 3), dtype=complex)
        f[0, 0, 1] = 1.0
        c = BellCoefficients.from_correlation(f)
        with pytest.raises(InvalidInequalityError):
            strategy_value((1, 0, 0, 0), c)
        with pytest.raises(InvalidInequalityError):
            lr_bound(c)

    def test_out_of_range_strategy(self):
        with pytest.raises(InputError):
            strategy_value((0, 0, 3, 0), build_cglmp(3))


class TestBound:
    @pytest.mark.parametrize("d", range(2, 9))
    def test_cglmp(self, d):
        assert lr_bound(build_cglmp(d)).bound == pytest.approx(2, abs=1e-12)

    @pytest.mark.parametrize("d", range(2, 7))
    @pytest.mark.parametrize("eta", ETAS)
    def test_slk_delta_zero_is_d_minus_1(self, d, eta):
        assert lr_bound(build_slk(d, SLKParams(0.0, *eta))).bound == pytest.approx(d - 1, abs=1e-12)

    def test_optimal_slk_d3(self):
        expected = 0.25 * (3 / math.tan(math.pi / 12) - 1 / math.tan(math.pi / 4)) - 1
        assert expected == pytest.approx(1.549038, abs=1e-6)
        assert lr_bound(build_slk(3, SLKParams(0.25))).bound == pytest.approx(expected, abs=1e-12)

    def test_closed_form_d2_is_inverse_sqrt2(self):
        assert optimal_slk_bound_closed_form(2) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert optimal_slk_bound_closed_form(3) == pytest.approx(1.549038, abs=1e-6)

    @pytest.mark.parametrize("d", range(2, 9))
    def test_closed_form_matches_enumeration(self, d):
        for eta in ETAS:
            bound = lr_bound(build_slk(d, SLKParams(0.25, *eta))).bound
            assert bound == pytest.approx(optimal_slk_bound_closed_form(d), abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(d=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
    def test_matches_residue_oracle(self, d, seed):
        c = BellCoefficients.from_probability(random_table(np.random.default_rng(seed), d, real_probability=True))
        assert lr_bound(c).bound == pytest.approx(residue_oracle(c.epsilon.real), abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 4])
    @pytest.mark.parametrize("delta", [0.0, 0.1, 0.2, 0.3, 0.4])
    def test_periodicity(self, d, delta):
        for eta in ETAS:
            a = lr_bound(build_slk(d, SLKParams(delta, *eta))).bound
            b = lr_bound(build_slk(d, SLKParams(delta + 0.5, *eta))).bound
            assert a == pytest.approx(b, abs=1e-9)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
    def test_symmetry_about_quarter(self, d, eps):
        lo = lr_bound(build_slk(d, SLKParams(0.25 - eps))).bound
        hi = lr_bound(build_slk(d, SLKParams(0.25 + eps))).bound
        assert lo == pytest.approx(hi, abs=1e-9)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_minimal_at_quarter(self, d):
        floor = lr_bound(build_slk(d, SLKParams(0.25))).bound
        for delta in np.arange(0, 0.5, 0.01):
            assert lr_bound(build_slk(d, SLKParams(float(delta)))).bound >= floor - 1e-9

    @pytest.mark.parametrize(
        "c", [build_cglmp(3), build_slk(3), build_chsh(), build_slk(4, SLKParams(0.1, 0.5, 0.5))]
    )
    def test_mixtures_never_exceed_bound(self, c, rng):
        values = all_strategy_values(c)
        bound = lr_bound(c).bound
        weights = rng.dirichlet(np.full(values.size, 0.3), size=1000)
        assert (weights @ values).max() <= bound + 1e-12

    def test_degenerate_zero_functional(self):
        result = lr_bound(BellCoefficients.zeros(3))
        assert result.bound == 0
        assert result.maximizer_count == 81

    def test_maximizers_sorted_and_within_tolerance(self):
        c = build_slk(4, SLKParams(0.25))
        result = lr_bound(c)
        assert result.maximizers == sorted(result.maximizers)
        for s in result.maximizers:
            assert strategy_value(s, c) >= result.bound * (1 - 1e-9) - 1e-12
        assert result.bound == pytest.approx(max(all_strategy_values(c)), abs=0)

    @settings(max_examples=30, deadline=None)
    @given(d=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
    def test_bound_is_never_negative(self, d, seed):
        # zero-sum blocks make the uniform mixture of strategies evaluate to 0
        c = BellCoefficients.from_probability(random_table(np.random.default_rng(seed), d, real_probability=True))
        assert lr_bound(c).bound >= -1e-12

    def test_json(self):
        doc = lr_bound(build_cglmp(3)).to_json()
        assert list(doc) == ["bound", "maximizer_count", "maximizers"]
        assert doc["maximizer_count"] == len(doc["maximizers"]) == 30
        big = lr_bound(BellCoefficients.zeros(9)).to_json()
        assert big["maximizer_count"] == 9**4 and "maximizers" not in big
