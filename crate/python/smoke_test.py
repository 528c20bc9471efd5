"""Smoke test for the dbarcone extension module.

Build first:  maturin develop -m crates/python/Cargo.toml --release
"""

import json

import dbarcone


def main():
    assert set(dbarcone.fixture_names()) >= {"line2", "quadric-cone", "cusp", "cone6"}

    line = dbarcone.Variety.fixture("line2")
    form = dbarcone.Form.bump_dbar([([1, 0], 1.0)], 0.5, 1.5)
    z = [0.3 + 0.1j, 0j]
    g = dbarcone.solve(line, form, z)
    assert abs(g["value"] - z[0]) < 1e-8, g

    quadric = dbarcone.Variety.fixture("quadric-cone")
    w = [1 + 0j, 1 + 0j, 1 + 0j]
    assert quadric.contains(w)
    bump = dbarcone.Form.bump_dbar([([1, 0, 0], 1.0)], 0.5, 2.0)
    half = [0.5 * c for c in w]
    exact = bump.potential(half)
    direct = dbarcone.solve(quadric, bump, half)["value"]
    scaled = dbarcone.solve_scaled(quadric, bump, w, 0.5)["value"]
    l2 = dbarcone.solve(quadric, bump, half, method="l2")["value"]
    assert abs(direct - scaled) < 1e-6 * (1 + abs(direct))
    assert abs(direct - exact) < 1e-6 and abs(l2 - exact) < 1e-6, (direct, l2, exact)

    cusp = dbarcone.Variety([3, 2], [[([2, 0], 1.0), ([0, 3], -1.0)]], pure_dim=1)
    assert cusp.theta_cone().weights == [1, 1]

    config = """
seed = 1
[variety]
fixture = "quadric-cone"
[job]
kind = "scaling"
radii = [0.5, 1.0, 2.0]
samples = 2000
"""
    assert dbarcone.check_config(config) == "scaling"
    report = json.loads(dbarcone.run_config(config))
    assert report["status"] == "ok"
    assert abs(report["result"]["exponent"] - 6.0) < 0.3
    assert dbarcone.run_config(config) == dbarcone.run_config(config)

    try:
        dbarcone.check_config(config.replace("samples", "sample"))
    except ValueError:
        pass
    else:
        raise AssertionError("unknown key accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
