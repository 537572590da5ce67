"""Smoke test for the eddeg extension module.

Build with `cargo build --release -p eddeg-py` and put the shared library on
the path as `eddeg.so` (or install with maturin), then run this script.
"""

import json

import eddeg


def main():
    circle = eddeg.Problem(["x", "y"], ["x^2 + y^2 - 1"], u=[3, 4])
    assert circle.n == 2 and circle.m == 1
    assert circle.bound() == 4
    assert circle.bound(algorithm="cells") == 4
    c = circle.count(seed=0)
    assert c["regular"] == 2, c
    pts = sorted((round(s[0].real, 8), round(s[1].real, 8)) for s in c["solutions"])
    assert pts == [(-0.6, -0.8), (0.6, 0.8)], pts
    report = json.loads(circle.verify(seed=0))
    assert report["verdict"] == "COUNT_BELOW_BOUND"

    conic = eddeg.Problem(
        ["x", "y"], ["x^2 + x*y + y^2 + x + y + 1"], seed=1, random_coefficients=True
    )
    assert conic.bound() == 4
    assert conic.count(seed=1)["regular"] == 4

    assert eddeg.mixed_volume([[[0, 0], [1, 0]], [[0, 0], [0, 1]]]) == 1
    assert eddeg.normalize_polynomial("y + x*x", ["x", "y"]) == eddeg.normalize_polynomial(
        "x^2 + y", ["x", "y"]
    )
    print("ok")


if __name__ == "__main__":
    main()
