import pytest

from noisyspins.combinatorics import catalan, riordan, spin1_multiplicities


def catalan_by_recurrence(n):
    """Independent oracle: C_{k+1} = sum_i C_i C_{k-i}."""
    cs = [1]
    for k in range(n):
        cs.append(sum(cs[i] * cs[k - i] for i in range(k + 1)))
    return cs[n]


def spin_half_singlet_count(n_pairs):
    """Independent oracle: S_tot = 0 states of 2*n_pairs spin-1/2s."""
    table = {0.5: 1}
    for _ in range(2 * n_pairs - 1):
        new = {}
        for S, m in table.items():
            for T in (S - 0.5, S + 0.5):
                if T < 0:
                    continue
                new[T] = new.get(T, 0) + m
        table = new
    return table.get(0.0, 0)


def test_catalan_small_values():
    assert catalan(0) == 1
    assert catalan(3) == 5
    assert catalan(10) == 16796 == catalan_by_recurrence(10)


def test_catalan_matches_recurrence():
    for n in range(15):
        assert catalan(n) == catalan_by_recurrence(n)


def test_catalan_counts_spin_half_singlets():
    for n_pairs in range(1, 11):
        assert catalan(n_pairs) == spin_half_singlet_count(n_pairs)


def test_catalan_rejects_negative():
    with pytest.raises(ValueError):
        catalan(-1)


def test_riordan_known_values():
    assert riordan(2) == 1
    assert riordan(3) == 1
    assert riordan(6) == 15


def test_riordan_equals_singlet_multiplicity():
    for n in range(1, 13):
        assert riordan(n) == spin1_multiplicities(n).by_spin.get(0, 0)


def test_multiplicities_two_and_three_sites():
    assert spin1_multiplicities(2).by_spin == {0: 1, 1: 1, 2: 1}
    t3 = spin1_multiplicities(3)
    assert t3.by_spin == {0: 1, 1: 3, 2: 2, 3: 1}
    assert t3.dimension() == 27


def test_dimension_sum_is_power_of_three():
    for n in range(1, 13):
        assert spin1_multiplicities(n).dimension() == 3 ** n


def test_no_spin_above_n():
    for n in (2, 5, 9):
        assert max(spin1_multiplicities(n).by_spin) == n
