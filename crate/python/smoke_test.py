"""Smoke test for the plumbtop extension module.

Build and install first, e.g.
    maturin build --release -m crates/py/Cargo.toml --auditwheel skip -o dist
    pip install dist/plumbtop-*.whl
"""

import cmath
import sys
from fractions import Fraction
from pathlib import Path

import plumbtop

GRAPHS = Path(__file__).resolve().parent.parent / "graphs"


def main() -> int:
    g = plumbtop.Graph.from_file(str(GRAPHS / "e1.json"))
    assert len(g) == 1 and g.weights == [-3] and g.omega == [Fraction(2, 3)]

    ctx = plumbtop.Context(g, 5)
    z = ctx.cgp()
    assert abs(z - complex(0.368176154422551157, -0.245842970733534652)) < 1e-14, z
    re, _ = ctx.cgp_decimal()
    assert re.startswith("3.681761544225511571332780516"), re

    assert ctx.zhat([0], "3") == [(Fraction(0), Fraction(-2))]
    assert ctx.zhat([2], "3") == ctx.zhat([4], "3") == [(Fraction(1, 3), Fraction(1))]
    assert len(ctx.constants()) == 3

    value, tail = ctx.radial(0.05j, 1e-15)
    assert tail <= 1e-15 and abs(value - z) < 0.05
    _, _, diff, bound = ctx.central_identity(0.1j, 1e-15)
    assert diff <= bound

    coeffs = ctx.expand(2)
    assert abs(coeffs[0] - z) < 1e-14

    tau = 0.05j
    assert abs(ctx.resum(tau) - ctx.contour(tau)) < 1e-8 * abs(value)

    y = plumbtop.Context(plumbtop.Graph.from_file(str(GRAPHS / "y.json")), 3)
    try:
        y.resum(tau)
    except plumbtop.NumericalError:
        pass
    else:
        raise AssertionError("Laplace ray through the Borel singularities must fail")

    try:
        plumbtop.Context(g, 4)
    except plumbtop.ValidationError:
        pass
    else:
        raise AssertionError("r = 4 must be rejected")

    summary = plumbtop.reciprocity_selftest(seed=3, count=10)
    assert summary["passed"] == summary["count"] == 10

    print("plumbtop smoke test ok:", cmath.polar(z))
    return 0


if __name__ == "__main__":
    sys.exit(main())
