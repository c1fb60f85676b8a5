import math
import random
from math import gcd

import pytest

from bvlab.arith import enumerate_moduli_set
from bvlab.characters import character_group
from bvlab.progressions import (
    character_extremum,
    e_dagger,
    e_dagger_bruteforce,
    e_star,
    e_star_bruteforce,
    exception_scan,
    progression_identity_residual,
    psi,
    psi_ap,
    psi_chi,
    psi_coprime,
    reduction_gap,
    write_error_csv,
    write_scan_summary,
)


def test_psi_small_values(tables):
    # psi(10) = 3 log 2 + 2 log 3 + log 5 + log 7
    expected = 3 * math.log(2) + 2 * math.log(3) + math.log(5) + math.log(7)
    assert psi(10, tables) == pytest.approx(expected, abs=1e-12)
    assert psi(1, tables) == 0.0


def test_psi_ap_worked_value(tables):
    # n <= 20 with n = 1 (mod 4): contributions from 5, 9, 13, 17
    expected = math.log(5) + math.log(3) + math.log(13) + math.log(17)
    assert psi_ap(20, 4, 1, tables) == pytest.approx(expected, abs=1e-12)


def test_psi_splits_over_residues(tables):
    for q in (3, 4, 5, 12):
        total = math.fsum(psi_ap(500, q, a, tables) for a in range(q))
        assert total == pytest.approx(psi(500, tables), abs=1e-9)


def test_psi_coprime_removes_bad_primes(tables):
    # mod 6: removes powers of 2 and 3
    removed = psi(100, tables) - psi_coprime(100, 6, tables)
    expected = math.fsum(
        math.log(p) for n, p in tables.lambda_support.items()
        if n <= 100 and p in (2, 3)
    )
    assert removed == pytest.approx(expected, abs=1e-12)


def test_psi_chi_principal_equals_coprime_sum(tables):
    for q in (3, 8, 10):
        chi0 = character_group(q)[0]
        v = psi_chi(1000, chi0, tables)
        assert v.imag == pytest.approx(0.0, abs=1e-12)
        assert v.real == pytest.approx(psi_coprime(1000, q, tables), abs=1e-9)


def test_identity_residual_tiny(tables):
    rng = random.Random(1)
    for _ in range(25):
        q = rng.randrange(2, 50)
        a = rng.randrange(1, q)
        if gcd(a, q) != 1:
            continue
        y = rng.uniform(10, 5000)
        resid = progression_identity_residual(y, q, a, tables)
        assert resid <= 1e-8 * (1.0 + psi(y, tables))


def test_identity_requires_coprimality(tables):
    with pytest.raises(ValueError):
        progression_identity_residual(100.0, 6, 3, tables)


def test_e_star_against_bruteforce(tables):
    for q in (3, 4, 7, 9, 12):
        for x in (500, 2000):
            fast = e_star(float(x), q, tables).E_value
            slow = e_star_bruteforce(x, q, tables)
            # the jump scan also sees the sup at real y between integers,
            # which dominates the integer-y scan by less than 1/phi(q)
            assert slow <= fast + 1e-9
            assert fast <= slow + 1.0
            # at integer-valued y both scans see the same sums
            assert fast >= slow - 1e-9


def test_e_dagger_against_bruteforce(tables):
    for q in (3, 5, 8):
        fast = e_dagger(2000.0, q, tables).E_value
        slow = e_dagger_bruteforce(2000, q, tables)
        assert fast == pytest.approx(slow, abs=1e-9)


def test_e_star_modulus_one_tracks_psi_drift(tables):
    rec = e_star(1000.0, 1, tables)
    assert rec.E_value > 0
    assert rec.y_star <= 1000.0


def test_character_extremum_is_attained(tables):
    chi = character_group(5)[1]
    ext = character_extremum(2000.0, chi, tables)
    v = psi_chi(ext.y_chi, chi, tables)
    assert abs(ext.a_chi) == pytest.approx(1.0, abs=1e-12)
    assert (ext.a_chi * v).real == pytest.approx(abs(v), abs=1e-9)


def test_reduction_gap_small_for_primitive(tables):
    chi = character_group(5)[1]
    g1, g2 = reduction_gap(2000.0, 5, chi, tables)
    assert g2 == 0.0  # already primitive: inducing character is itself
    assert g1 >= 0.0


def test_exception_scan_and_outputs(tmp_path, tables):
    S = enumerate_moduli_set(10, "prime-powers")
    records, summary = exception_scan(9000.0, 10, 1.0, S, tables)
    assert len(records) == len(S.members)
    assert summary["count_exceptional"] == sum(r.exceptional for r in records)
    csv_path = tmp_path / "err.csv"
    json_path = tmp_path / "summary.json"
    write_error_csv(records, str(csv_path))
    write_scan_summary(summary, str(json_path))
    header = csv_path.read_text().splitlines()[0]
    assert header == "q,phi_q,E_star,y_star,threshold,exceptional"
    assert "count_exceptional" in json_path.read_text()


def test_scan_warns_when_q_too_large(tables):
    S = enumerate_moduli_set(100, "primes")
    with pytest.warns(UserWarning):
        exception_scan(1000.0, 100, 1.0, S, tables)


def test_range_guard(tables):
    with pytest.raises(ValueError):
        psi(float(tables.limit + 10), tables)
