import json
import math

import numpy as np
import pytest

from diamondgap.capacity import waterfill
from diamondgap.channel import (DiamondChannel, derive_params, load_channel,
                                random_diamond, save_channel)
from diamondgap.errors import DomainError, ParseError, SchemaError


def _scalar(h01, h02, h13, h23):
    return DiamondChannel(np.array([[float(h01)]]), np.array([[float(h02)]]),
                          np.array([[float(h13)]]), np.array([[float(h23)]]))


def test_identity_channel_params():
    p = derive_params(_scalar(1, 1, 1, 1))
    assert p.c01 == 0.5 and p.c02 == 0.5 and p.c13 == 0.5 and p.c23 == 0.5
    assert abs(p.c012 - 0.792481250360578) <= 1e-12   # 1/2 log2(3)
    assert abs(p.c123 - 1.160964047443681) <= 1e-12   # 1/2 log2(5)
    assert p.delta == 0.0


def test_identity_c123_grid_oracle():
    # joint second hop [1 1] with total power 2: grid over PSD trace-2 Q
    best = 0.0
    for a in np.arange(0.0, 2.0 + 1e-9, 0.01):
        b = 2.0 - a
        cmax = math.sqrt(a * b)
        for c in np.arange(-cmax, cmax + 1e-12, 0.01):
            best = max(best, 0.5 * math.log2(1.0 + a + b + 2.0 * c))
    p = derive_params(_scalar(1, 1, 1, 1))
    assert best <= p.c123 + 1e-9
    assert abs(best - p.c123) <= 5e-3  # grid pitch limits agreement


def test_strong_first_hop_delta_positive():
    p = derive_params(_scalar(2, 2, 1, 1))
    c = 0.5 * math.log2(5.0)
    assert abs(p.c01 - c) <= 1e-12
    assert abs(p.delta - (c * c - 0.25)) <= 1e-12
    assert p.delta > 0


def test_zero_second_hop():
    dc = DiamondChannel(np.array([[1.0]]), np.array([[2.0]]),
                        np.zeros((1, 1)), np.zeros((1, 1)))
    p = derive_params(dc)
    assert p.c13 == 0.0 and p.c23 == 0.0 and p.c123 == 0.0
    assert abs(p.delta - p.c01 * p.c02) <= 1e-15
    assert p.delta >= 0.0


def test_random_diamond_deterministic():
    a = random_diamond(1, 0, 1.0)
    b = random_diamond(1, 0, 1.0)
    assert np.array_equal(a.h01, b.h01) and np.array_equal(a.h23, b.h23)


def test_random_diamond_seed_sensitivity():
    a = random_diamond(2, 1, 1.0)
    b = random_diamond(2, 2, 1.0)
    assert not np.array_equal(a.h01, b.h01)


def test_random_diamond_variance():
    # 278 channels x 4 matrices x 9 entries ~ 1e4 draws at scale 10
    vals = []
    for seed in range(278):
        dc = random_diamond(3, seed, 10.0)
        vals.extend([dc.h01.ravel(), dc.h02.ravel(),
                     dc.h13.ravel(), dc.h23.ravel()])
    v = float(np.var(np.concatenate(vals)))
    assert 80.0 <= v <= 120.0


def test_channel_validation():
    with pytest.raises(DomainError):
        DiamondChannel(np.ones((2, 2)), np.ones((2, 2)),
                       np.ones((2, 2)), np.ones((1, 1)))
    with pytest.raises(DomainError):
        DiamondChannel(np.array([[np.nan]]), np.ones((1, 1)),
                       np.ones((1, 1)), np.ones((1, 1)))


def test_save_load_roundtrip(tmp_path):
    dc = random_diamond(3, 42, 1.0)
    path = tmp_path / "ch.json"
    save_channel(dc, path)
    back = load_channel(path)
    for f in ("h01", "h02", "h13", "h23"):
        assert np.array_equal(getattr(dc, f), getattr(back, f))


def test_load_rejects_bad_shape(tmp_path):
    doc = {"n": 3, "H01": [[1.0, 2.0]] * 3, "H02": [[0.0] * 3] * 3,
           "H13": [[0.0] * 3] * 3, "H23": [[0.0] * 3] * 3}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError):
        load_channel(path)


def test_load_rejects_missing_field(tmp_path):
    doc = {"n": 1, "H01": [[1.0]], "H02": [[1.0]], "H13": [[1.0]]}
    path = tmp_path / "missing.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError) as exc:
        load_channel(path)
    assert "H23" in str(exc.value)


def test_load_rejects_malformed_and_nonfinite(tmp_path):
    path = tmp_path / "syntax.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_channel(path)
    path2 = tmp_path / "inf.json"
    path2.write_text('{"n": 1, "H01": [["Infinity"]], "H02": [[1.0]],'
                     ' "H13": [[1.0]], "H23": [[1.0]]}')
    with pytest.raises(ParseError):
        load_channel(path2)


def test_capacity_monotone_under_scaling():
    for seed in range(200):
        n = 1 + seed % 3
        dc = random_diamond(n, seed, 1.0)
        up = DiamondChannel(1.7 * dc.h01, 1.7 * dc.h02,
                            1.7 * dc.h13, 1.7 * dc.h23)
        p, q = derive_params(dc), derive_params(up)
        for f in ("c01", "c02", "c13", "c23", "c012", "c123"):
            assert getattr(q, f) >= getattr(p, f) - 1e-9


def test_cut_dominance():
    for seed in range(200):
        n = 1 + seed % 3
        p = derive_params(random_diamond(n, seed, 1.0))
        assert p.c012 >= max(p.c01, p.c02) - 1e-8
        assert p.c123 >= max(p.c13, p.c23) - 1e-8


def test_delta_sign_recomputed_from_scratch():
    for seed in range(40):
        dc = random_diamond(2, seed, 1.0)
        p = derive_params(dc)
        fresh = (waterfill(dc.h01, 1.0).capacity_bits
                 * waterfill(dc.h02, 1.0).capacity_bits
                 - waterfill(dc.h13, 1.0).capacity_bits
                 * waterfill(dc.h23, 1.0).capacity_bits)
        assert abs(p.delta - fresh) <= 1e-9
        assert (p.delta > 0) == (fresh > 0)


def test_swapped_mirrors_params():
    dc = random_diamond(2, 17, 1.0)
    p, q = derive_params(dc), derive_params(dc.swapped())
    assert abs(p.c01 - q.c02) <= 1e-12 and abs(p.c13 - q.c23) <= 1e-12
    assert abs(p.c123 - q.c123) <= 1e-9
    assert abs(p.delta - q.delta) <= 1e-12
