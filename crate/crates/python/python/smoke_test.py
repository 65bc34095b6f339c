"""Smoke test for the pymagband extension module.

Build and install first, e.g.

    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/pymagband-*.whl
"""

import math
import tempfile

import pymagband as mb


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    field = mb.FieldConfig(1.0)
    assert field.landau_level(2) == 5.0

    free = mb.solve_fiber(mb.Potential.zero(), field, 0.5, 4)
    for n, e in enumerate(free.eigenvalues):
        close(e, 2 * n + 1, 1e-6)
    assert [free.sign_changes(n) for n in range(4)] == [0, 1, 2, 3]
    h = free.spacing
    close(sum(v * v for v in free.eigenvectors[0]) * h, 1.0, 1e-12)

    linear = mb.solve_fiber(mb.Potential.linear(1.0), field, 1.0, 2)
    close(linear.eigenvalues[0], mb.exact_eigenvalue("linear", field, 0, 1.0, 1.0), 1e-5)
    close(mb.exact_eigenvalue("linear", field, 0, 1.0, 1.0), -0.25, 1e-15)

    try:
        mb.solve_fiber(mb.Potential.parabola(1.2), field, 0.0, 1)
    except ValueError as e:
        assert "unbounded" in str(e)
    else:
        raise AssertionError("strong inverted parabola must fail")

    try:
        mb.Potential.lorentzian(1.0, -0.5)
    except ValueError as e:
        assert "Lorentzian requires a > 0" in str(e)
    else:
        raise AssertionError("negative width must fail")

    lor = mb.Potential.lorentzian(1.0, 1.0)
    assert lor.sign_class() == "nonnegative"
    assert lor.hypotheses() == {"v1": True, "v2": True, "v3": True, "v4": True, "v5": True}
    close(lor.sup_norm(), 1.0 / math.pi, 1e-15)
    fh = mb.fh_derivative_p(lor, field, 1.0, 0)
    fd = mb.fd_derivative_p(lor, field, 1.0, 0)
    close(fh, fd, 1e-4 * (1 + abs(fd)))
    assert mb.fh_derivative_lambda(lor, field, 0.5, 0, 1.0) > 0
    close(mb.first_order_estimate(lor, field, 0.3, 1, 0.0), 3.0, 0.0)

    bands = mb.sweep(lor, field, -4.0, 4.0, 17, 3, 1e-5)
    assert len(bands.p_grid) == 17 and len(bands.energies) == 3
    assert all(open_ for (_, _, _, open_) in bands.gaps)
    assert bands.widths[0] > 0
    assert bands.to_csv().startswith("p,eps_0,eps_1,eps_2\n")

    step = mb.Potential.tabulated([-1.0, 1.0], [0.0, 0.5], clamp=True)
    left, right = mb.asymptote_check(step, field, 0, 40.0)
    assert left < 1e-2 and right < 1e-2

    close(mb.lowest_eigenvalues([2.0, 2.0], [1.0], 2)[0], 1.0, 1e-10)
    close(mb.hermite_function(0, field, 0.0), math.pi ** -0.25, 1e-15)

    config = """
[field]
B = 1
[potential]
kind = "sine"
lambda = 1
a = 1
[sweep]
p_steps = 9
bands = 2
checks = ["landau", "symmetry"]
"""
    with tempfile.TemporaryDirectory() as out:
        ok, checks = mb.run_config(config, out)
        assert ok, checks
        assert [c[:2] for c in checks] == [("landau", "pass"), ("symmetry", "pass")]

    print("pymagband smoke test passed")


if __name__ == "__main__":
    main()
