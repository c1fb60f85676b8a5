import math
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bvlab.arith import (
    FactoredInteger,
    LimitError,
    ModuliSet,
    build_tables,
    enumerate_moduli_set,
    load_tables,
    save_tables,
    tau_b,
)


def _naive_mobius(n):
    if n == 1:
        return 1
    m, out = n, 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            out = -out
        d += 1
    if m > 1:
        out = -out
    return out


def _naive_phi(n):
    return sum(1 for a in range(1, n + 1) if gcd(a, n) == 1)


def test_limit_validation():
    with pytest.raises(LimitError):
        build_tables(1)
    with pytest.raises(LimitError):
        build_tables(10**9)


def test_sieve_against_naive(tables):
    for n in range(1, 500):
        assert int(tables.mobius[n]) == _naive_mobius(n)
        assert int(tables.phi[n]) == _naive_phi(n)


def test_von_mangoldt_support(tables):
    assert tables.von_mangoldt(8) == pytest.approx(math.log(2))
    assert tables.von_mangoldt(9) == pytest.approx(math.log(3))
    assert tables.von_mangoldt(12) == 0.0
    assert tables.von_mangoldt(1) == 0.0
    # exact: the table stores the base prime, not a float
    assert tables.lambda_support[243] == 3


def test_prime_powers_sorted_and_complete(tables):
    pp = tables.prime_powers
    assert np.all(np.diff(pp) > 0)
    assert len(pp) == len(tables.lambda_support)
    # Chebyshev psi(100) from the tables matches a hand sum
    k = int(np.searchsorted(pp, 100, side="right"))
    psi_100 = math.fsum(tables.prime_power_logs[:k])
    direct = math.fsum(
        math.log(p) for n, p in tables.lambda_support.items() if n <= 100
    )
    assert psi_100 == pytest.approx(direct, abs=1e-12)


def test_factorize_roundtrip(tables):
    for n in (1, 2, 97, 360, 9973, 9999):
        f = tables.factorize(n)
        prod = 1
        for p, e in f.factors:
            assert tables.is_prime(p)
            prod *= p**e
        assert prod == n


def test_factored_integer_consistency_guard():
    with pytest.raises(ValueError):
        FactoredInteger(n=12, factors=[(2, 1), (3, 1)])


@given(st.integers(min_value=1, max_value=9999),
       st.integers(min_value=1, max_value=9999))
@settings(max_examples=200, deadline=None)
def test_phi_multiplicative(n, m):
    tables = _shared()
    if n * m <= tables.limit and gcd(n, m) == 1:
        assert int(tables.phi[n * m]) == int(tables.phi[n]) * int(tables.phi[m])


@given(st.integers(min_value=1, max_value=9999))
@settings(max_examples=200, deadline=None)
def test_mobius_square_vanishes(n):
    tables = _shared()
    if n * n <= tables.limit and n > 1:
        assert int(tables.mobius[n * n]) == 0


_CACHED = None


def _shared():
    global _CACHED
    if _CACHED is None:
        _CACHED = build_tables(10**4)
    return _CACHED


def test_tau_b_values(tables):
    assert tau_b(1, 3) == 1
    assert tau_b(12, 2, tables) == 6  # divisor count of 12
    # tau_b is multiplicative and tau_b(p, b) = b
    assert tau_b(7, 4, tables) == 4
    assert tau_b(7 * 11, 4, tables) == 16


@given(st.integers(min_value=1, max_value=2000),
       st.integers(min_value=1, max_value=4))
@settings(max_examples=100, deadline=None)
def test_tau_2_matches_divisor_count(n, b):
    if b == 2:
        divisors = sum(1 for d in range(1, n + 1) if n % d == 0)
        assert tau_b(n, 2) == divisors


def test_moduli_set_window_and_coprimality():
    s = enumerate_moduli_set(22, "prime-powers")
    assert s.members == [23, 25, 27, 29, 31, 32, 37, 41, 43]
    with pytest.raises(ValueError, match="outside"):
        ModuliSet(Q=10, members=[9], kind="custom")
    with pytest.raises(ValueError, match="share the factor"):
        ModuliSet(Q=10, members=[10, 15], kind="custom")
    with pytest.raises(ValueError, match="unknown moduli kind"):
        enumerate_moduli_set(10, "everything")


def test_primes_kind():
    s = enumerate_moduli_set(10, "primes")
    assert s.members == [11, 13, 17, 19]


def test_cache_roundtrip(tmp_path, tables):
    path = str(tmp_path / "tables.bin")
    save_tables(tables, path)
    loaded = load_tables(path)
    assert loaded.limit == tables.limit
    assert np.array_equal(loaded.mobius, tables.mobius)
    assert np.array_equal(loaded.phi, tables.phi)
    assert np.array_equal(loaded.smallest_prime_factor,
                          tables.smallest_prime_factor)
    assert loaded.lambda_support == tables.lambda_support


def test_cache_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"not a cache")
    with pytest.raises(ValueError):
        load_tables(str(path))
