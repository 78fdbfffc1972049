"""Smoke test for the `eulerci` extension module.

Build first, e.g. `maturin develop -m crates/py/Cargo.toml`, then run
`python python/smoke_test.py`.
"""

import json
import math
import tempfile

import eulerci


def check_lens():
    lens = eulerci.Lens([1.0, 0.0], 1.0, math.sqrt(2.0))
    x = [0.3, -0.2]
    assert abs(lens.gauge(x) - lens.gauge_oracle(x)) <= 1e-10 * max(1.0, lens.gauge(x))
    r_min, r_max = lens.radii()
    assert 0.0 < r_min <= r_max
    assert lens.a_k() <= r_max + 1e-9
    assert lens.uniform_convexity_constant() > 0.0
    assert lens.support([0.0, 1.0]) > 0.0
    again = eulerci.Lens.from_json(lens.to_json())
    assert again.hausdorff(lens, 256) <= 1e-12
    ball = eulerci.Lens.ball(2, 1.0)
    assert abs(ball.gauge([0.5, 0.0]) - 0.5) <= 1e-12
    try:
        lens.gauge([1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("dimension mismatch must raise")


def check_wave_cone():
    v, m, q = eulerci.lambda_from_pair([1.0, 0.0], [0.3, 0.8], 0.7)
    det, scale = eulerci.wave_cone_det(v, m, q)
    assert abs(det) <= 1e-9 * scale
    frame = eulerci.Frame([1.0, 0.0], [0.3, 0.8], 0.7)
    assert frame.delta != 0.0 and math.isfinite(frame.delta) and len(frame.xi) == 2
    assert max(frame.identity_residuals()) <= 1e-10
    try:
        eulerci.Frame([1.0, 0.0], [2.0, 0.0], 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("aligned pair must raise")


def check_engine():
    lens = eulerci.Lens([1.0, 0.0], 1.0, math.sqrt(2.0))
    s0 = eulerci.Subsolution.constant(32, 12, lens, 1.0)
    assert s0.in_x0()
    j0 = s0.j()
    s1, logs = s0.iterate(json.dumps({"rounds": 2}))
    assert s1.j() <= j0
    assert isinstance(json.loads(logs), list)
    with tempfile.TemporaryDirectory() as d:
        s1.save(d)
        s2 = eulerci.Subsolution.load(d)
        assert s2.j() == s1.j()
        assert s2.wave_count() == s1.wave_count()


def check_path():
    report = json.loads(
        eulerci.build_path(
            32,
            12,
            json.dumps({"kind": "zero"}),
            json.dumps({"kind": "zero"}),
            1,
            json.dumps({"eps_mollify": 0.07}),
        )
    )
    assert report["constant"] == 0.0


if __name__ == "__main__":
    check_lens()
    check_wave_cone()
    check_engine()
    check_path()
    print("eulerci smoke test: ok")
