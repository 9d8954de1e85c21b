import json

import numpy as np
import pytest

from flatcurv.datasets import GeneratorSpec, generate
from flatcurv.errors import InvalidInputError
from flatcurv.verify import VerifyConfig, verify_suite

SMALL = VerifyConfig(seed=1, mc_samples=20_000, n_centers=4, n_scales=2, levels=3)


def test_unknown_suite():
    mu = generate(GeneratorSpec("segment", d=1, n=2, count=16, seed=0))
    with pytest.raises(InvalidInputError):
        verify_suite("bogus", mu)


def test_prop11_flat_plane_all_skipped():
    mu = generate(GeneratorSpec("plane", d=2, n=3, count=64, seed=2))
    rep = verify_suite("prop11", mu, SMALL)
    assert rep.rows
    for row in rep.rows:
        assert row["reason"] == "0/0 skipped"
        assert row["ratio"] is None
    assert rep.empirical["rows_used"] == 0


def test_prop11_noisy_plane_ratios_finite():
    mu = generate(GeneratorSpec("plane", d=1, n=2, count=100, noise_sigma=0.05, seed=3))
    rep = verify_suite("prop11", mu, SMALL)
    used = [r for r in rep.rows if r["reason"] == ""]
    assert used
    for row in used:
        assert np.isfinite(row["ratio"])
        assert row["curvature_sq"] >= 0
        assert row["beta2_sq_mass"] > 0
    assert rep.empirical["max_ratio"] >= rep.empirical["min_ratio"] > 0


def test_thm14_cantor_positive_both_sides():
    mu = generate(GeneratorSpec("cantor_product", d=1, n=2, level=3))
    cfg = VerifyConfig(seed=4, mc_samples=20_000, n_centers=1, n_scales=1, levels=4, lam=0.25)
    rep = verify_suite("thm14", mu, cfg)
    row = rep.rows[0]
    assert row["jones_B"] > 0
    assert row["curvature_sq_3B"] > 0
    assert row["reason"] == ""
    assert row["blowup_clamped"] is True


def test_thm13_rows_have_operands():
    mu = generate(GeneratorSpec("lipschitz_graph", d=1, n=2, count=72, seed=5))
    rep = verify_suite("thm13", mu, SMALL)
    for row in rep.rows:
        assert "curvature_sq" in row and "jones_6B" in row
        if row["reason"] == "":
            assert row["ratio"] == pytest.approx(row["curvature_sq"] / row["jones_6B"])


def test_thm62_two_sided():
    mu = generate(GeneratorSpec("lipschitz_graph", d=1, n=2, count=64, noise_sigma=0.02, seed=6))
    cfg = VerifyConfig(seed=7, mc_samples=20_000, n_centers=2, n_scales=2, levels=3, p=2.0)
    rep = verify_suite("thm62", mu, cfg)
    used = [r for r in rep.rows if r["reason"] == ""]
    assert used
    for row in used:
        assert row["ratio_lower"] >= 0 and row["ratio_upper"] >= 0


def test_leger_suite_lower_bound_direction():
    mu = generate(GeneratorSpec("lipschitz_graph", d=2, n=3, count=81, noise_sigma=0.03, seed=8))
    cfg = VerifyConfig(seed=9, mc_samples=30_000, n_centers=2, n_scales=1, levels=2)
    rep = verify_suite("leger", mu, cfg)
    for row in rep.rows:
        # p for the tilde functional is d+1
        assert row["p"] == 3.0
        if row["reason"] == "":
            assert row["leger_integral"] > 0


def test_report_byte_stable():
    mu = generate(GeneratorSpec("plane", d=1, n=2, count=60, noise_sigma=0.05, seed=10))
    a = verify_suite("thm12", mu, SMALL)
    b = verify_suite("thm12", mu, SMALL)
    ja = json.loads(a.to_json())
    jb = json.loads(b.to_json())
    ja["runtime_seconds"] = jb["runtime_seconds"] = 0
    assert json.dumps(ja, sort_keys=True) == json.dumps(jb, sort_keys=True)


def test_report_csv_and_no_nan():
    mu = generate(GeneratorSpec("plane", d=1, n=2, count=60, noise_sigma=0.05, seed=11))
    rep = verify_suite("prop11", mu, SMALL)
    text = rep.to_csv()
    assert "nan" not in text.lower()
    assert text.splitlines()[0].startswith("center")
    js = rep.to_json()
    assert "NaN" not in js
    assert json.loads(js)["schema_version"] == 1
