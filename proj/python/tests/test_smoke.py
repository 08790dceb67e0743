import cmath
import math
import os
import pathlib

import pytest

import ffmoments as ffm

ROOT = pathlib.Path(__file__).resolve().parents[2]


def test_polynomials():
    assert ffm.normalize(3, "T^2 + 2*T + T + 1") == "T^2 + 1"
    assert ffm.is_irreducible(3, "T^2 + 1")
    assert not ffm.is_irreducible(2, "T^2 + 1")
    assert ffm.irreducibles(2, 2) == ["T^2 + T + 1"]
    assert ffm.factor(3, "T^3 + T") == [("T", 1), ("T^2 + 1", 1)]
    for n in range(1, 9):
        assert ffm.prime_count(2, n) == ffm.prime_count_sieve(2, n) == len(ffm.irreducibles(2, n))


def test_errors():
    with pytest.raises(ffm.ParseError):
        ffm.normalize(3, "T^2 + 3")
    with pytest.raises(ValueError):
        ffm.Family(3, "T + 1")


def test_t_squared_family():
    fam = ffm.Family(3, "T^2")
    assert len(fam) == 4 and fam.phi == 6
    got = sorted((round(c[1].real, 9), round(c[1].imag, 9)) for c in fam.lpolys())
    s3 = round(math.sqrt(3), 9)
    assert got == [(-1.0, 0.0), (-1.0, 0.0), (0.0, -s3), (0.0, s3)]
    assert abs(fam.shifted_moment([1, 1], [0, 0]) - (4 + 2 * (1 - 1 / math.sqrt(3)) ** 2)) < 1e-8
    assert abs(fam.charsum_moment(1.0, 1)["moment"] - 8) < 1e-8
    k = next(i for i, c in enumerate(fam.lpolys()) if abs(c[1] - 1j * math.sqrt(3)) < 1e-9)
    assert abs(fam.circle_integral(k) - 8) < 1e-6
    quad, direct = fam.perron(k, 1, 0.5, 64)
    assert abs(quad - direct) < 1e-8 and abs(direct - (1 + 1j * math.sqrt(3))) < 1e-12
    for i in range(len(fam)):
        for a in fam.inverse_roots(i):
            assert min(abs(abs(a) - 1), abs(abs(a) - math.sqrt(3))) < 1e-9
    r = fam.moment_report([1, 1], [0, 0])
    assert r["ratio_zeta"] == pytest.approx(r["lhs"] / r["rhs_zeta"])


def test_prime_sums():
    # q = 2, h = 1: the single prime T, T + 1 pair gives 2 * (1/2) cos(alpha log 2)
    assert ffm.mertens_cos_sum(2, 1, 0.0) == pytest.approx(1.0)
    assert ffm.F_sum(3, 0.0) == pytest.approx(1 + 1 / 2 + 1 / 3)
    tail = ffm.prime_power_tail(2, 2)
    assert tail["truncation_degree"] == 16
    assert tail["remainder_bound"] < 1e-3 * (tail["head"] + tail["tail"])
    assert math.isfinite(ffm.zeta_log_estimate(3, 4, 0.3))
    assert math.isfinite(ffm.log_min_estimate(3, 4, 0.3))


def test_run_suite(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        '{"schema": 1, "q": 3, "moduli": ["T^2", "T^3 + 2*T + 1"], '
        '"fixtures": "%s"}' % (tmp_path / "fx.json")
    )
    out = tmp_path / "out"
    r = ffm.run_suite("enumerate", str(cfg), out=str(out), jobs=2)
    assert r["failures"] == 0
    assert "moduli.csv" in r["tables"]
    assert (out / "checks.csv").exists()
    assert all(row["pass"] for row in r["checks"])
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": 1, "q": 3, "colour": 1}')
    with pytest.raises(ffm.ConfigError):
        ffm.run_suite("enumerate", str(bad))
