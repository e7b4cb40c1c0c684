"""Expression engine: parsing, evaluation, calculus, quadrature."""

import math

import numpy as np
import pytest

from isocmc import holo
from isocmc.holo import (
    Constant,
    Contour,
    Exp,
    IntPow,
    Mul,
    Neg,
    NonFiniteError,
    ParseError,
    QuadratureError,
    SingularityError,
    Sub,
    Variable,
    antiderivative,
    contour_integral,
    derivative,
    evaluate,
    parse,
    to_text,
)

from util_expr import random_expr, random_integrable

Z = Variable("z")


# ---------------------------------------------------------------------------
# parsing


def test_parse_power_minus_one():
    assert parse("z^2 - 1") == Sub(IntPow(Z, 2), Constant(1))


def test_parse_folds_constant_subtrees():
    assert parse("exp(z)*(2+3*i)") == Mul(Exp(Z), Constant(2 + 3j))
    assert parse("(1+2*i)*z") == Mul(Constant(1 + 2j), Z)


def test_parse_precedence():
    assert parse("1+2*z") == holo.add(Constant(1), Mul(Constant(2), Z))
    # exponent binds tighter than unary minus
    assert parse("-z^2") == Neg(IntPow(Z, 2))
    assert parse("z^-2") == IntPow(Z, -2)


def test_parse_real_mode():
    e = parse("x^2 + y^2")
    assert holo.variables(e) == {"x", "y"}


@pytest.mark.parametrize(
    "src,offset",
    [
        ("2*^3", 2),
        ("(z", 2),
        ("z^1.5", 2),
        ("z + x", 0),
        ("foo(z)", 0),
        ("z +", 3),
        ("z^(2", 4),
        ("", 0),
    ],
)
def test_parse_errors_carry_offsets(src, offset):
    with pytest.raises(ParseError) as err:
        parse(src)
    assert err.value.offset == offset


def test_parse_non_integer_exponent_message():
    with pytest.raises(ParseError, match="non-integer exponent"):
        parse("z^(1.5)")


def test_parse_rejects_mixed_modes():
    with pytest.raises(ParseError, match="either z or x/y"):
        parse("z * x")


# ---------------------------------------------------------------------------
# evaluation


def test_evaluate_identity():
    assert evaluate(parse("z"), {"z": 3 + 4j}) == 3 + 4j


def test_evaluate_euler_identity():
    val = evaluate(parse("exp(z)"), {"z": 1j * math.pi})
    assert abs(val - (-1.0)) < 1e-15


def test_evaluate_square():
    assert evaluate(parse("z^2"), {"z": 1 + 1j}) == 2j


def test_evaluate_array_matches_scalar():
    rng = np.random.default_rng(7)
    pts = (rng.normal(size=20) + 1j * rng.normal(size=20)).astype(np.complex128)
    for seed in range(10):
        e = random_expr(np.random.default_rng(seed), 4, "z")
        try:
            arr = evaluate(e, {"z": pts})
        except holo.ExpressionError:
            continue
        assert arr.shape == pts.shape and arr.dtype == np.complex128
        for k in (0, 7, 19):
            assert abs(arr[k] - evaluate(e, {"z": complex(pts[k])})) <= 1e-9 * (
                1 + abs(arr[k])
            )


def test_evaluate_real_mode_arrays():
    e = parse("x^2 + y^2")
    x = np.array([[0.0, 1.0], [2.0, 3.0]])
    y = np.array([[1.0, 0.0], [1.0, 2.0]])
    out = evaluate(e, {"x": x, "y": y})
    np.testing.assert_allclose(out.real, x * x + y * y)


def test_evaluate_constant_broadcasts_to_array_shape():
    out = evaluate(parse("2"), {"z": np.zeros((3, 4))})
    assert out.shape == (3, 4)
    assert np.all(out == 2.0 + 0j)


def test_evaluate_missing_variable():
    with pytest.raises(ValueError, match="no value supplied"):
        evaluate(parse("z"), {})


def test_evaluate_shape_mismatch():
    with pytest.raises(ValueError, match="one shape"):
        evaluate(parse("x+y"), {"x": np.zeros(3), "y": np.zeros(4)})


def test_division_by_zero_is_an_error():
    with pytest.raises(SingularityError):
        evaluate(parse("1/z"), {"z": 0.0})
    with pytest.raises(SingularityError):
        evaluate(parse("1/z"), {"z": np.array([1.0, 0.0, 2.0])})
    with pytest.raises(SingularityError):
        evaluate(parse("z^-1"), {"z": 0.0})


def test_overflow_is_an_error_not_inf():
    with pytest.raises(NonFiniteError):
        evaluate(parse("exp(z)"), {"z": 1000.0})


# ---------------------------------------------------------------------------
# derivative


def test_derivative_power_rule():
    assert derivative(parse("z^3")) == parse("3*z^2")


def test_derivative_linearity():
    assert derivative(parse("z^2 - 1")) == parse("2*z")


def test_derivative_chain_rule_exp():
    d = derivative(parse("exp(2*z)"))
    assert d == Mul(Exp(parse("2*z")), Constant(2))
    # same function as 2*exp(2*z)
    for z in (0.3 + 0.1j, -1.2j, 0.5):
        assert abs(evaluate(d, {"z": z}) - 2 * np.exp(2 * z)) < 1e-12


@pytest.mark.parametrize(
    "src",
    [
        "exp(z)",
        "sin(z)",
        "cos(2*z)",
        "sinh(z)",
        "cosh(z)^2",
        "z^3 - 2*z + 1",
        "exp(z)*sin(z)",
        "1/(z+3)",
        "z^-2",
    ],
)
def test_derivative_matches_finite_difference(src):
    e = parse(src)
    d = derivative(e)
    rng = np.random.default_rng(11)
    h = 1e-5
    for _ in range(5):
        z = complex(rng.normal(), rng.normal()) * 0.7
        fd = (evaluate(e, {"z": z + h}) - evaluate(e, {"z": z - h})) / (2 * h)
        exact = evaluate(d, {"z": z})
        assert abs(fd - exact) < 1e-6 * (1 + abs(exact))


def test_derivative_rejects_real_mode():
    with pytest.raises(ValueError, match="z only"):
        derivative(parse("x^2"))


# ---------------------------------------------------------------------------
# antiderivative


def test_antiderivative_power_rule():
    primitive = antiderivative(parse("z^2"))
    assert primitive is not None
    assert evaluate(primitive, {"z": 0.0}) == 0
    assert abs(evaluate(primitive, {"z": 2.0}) - 8.0 / 3.0) < 1e-14


def test_antiderivative_exp_normalized_at_zero():
    primitive = antiderivative(parse("exp(z)"))
    assert primitive is not None
    assert evaluate(primitive, {"z": 0.0}) == 0
    assert abs(evaluate(primitive, {"z": 1.0}) - (math.e - 1)) < 1e-14


def test_antiderivative_handles_linear_arguments():
    primitive = antiderivative(parse("cos(3*z - 1)"))
    assert primitive is not None
    assert abs(evaluate(primitive, {"z": 0.0})) == 0
    d = derivative(primitive)
    for z in (0.0, 0.4 - 0.2j, 1.1j):
        assert abs(evaluate(d, {"z": z}) - np.cos(3 * z - 1)) < 1e-12


def test_antiderivative_handles_general_polynomial_trees():
    # z*z and (z+1)^3 are polynomials even though no node is a monomial
    for src, check in [("z*z", lambda z: z**3 / 3), ("(z+1)^3", None)]:
        primitive = antiderivative(parse(src))
        assert primitive is not None
        if check is not None:
            assert abs(evaluate(primitive, {"z": 1.5}) - check(1.5)) < 1e-13


@pytest.mark.parametrize("src", ["exp(z^2)", "1/z", "sin(z)*z", "exp(exp(z))", "z^-1"])
def test_antiderivative_outside_class_returns_none(src):
    assert antiderivative(parse(src)) is None


def test_antiderivative_roundtrip_on_random_class_members():
    rng = np.random.default_rng(20260819)
    pts = (rng.normal(size=100) + 1j * rng.normal(size=100)) * 0.8
    for seed in range(20):
        e = random_integrable(np.random.default_rng(seed))
        primitive = antiderivative(e)
        assert primitive is not None
        assert evaluate(primitive, {"z": 0.0}) == 0
        back = evaluate(derivative(primitive), {"z": pts})
        want = evaluate(e, {"z": pts})
        np.testing.assert_allclose(back, want, rtol=1e-9, atol=1e-9)


# ---------------------------------------------------------------------------
# contours and quadrature


def test_contour_validation():
    with pytest.raises(ValueError):
        Contour((0.0,))
    with pytest.raises(ValueError, match="distinct"):
        Contour((0.0, 0.0, 1.0))
    with pytest.raises(ValueError, match="finite"):
        Contour((0.0, complex("inf")))
    assert Contour((1j, 0.0)).base_point == 1j


def test_contour_integral_exp_to_ipi():
    val = contour_integral(parse("exp(z)"), Contour((0.0, 1j * math.pi)))
    assert abs(val - (-2.0)) < 1e-10


def test_contour_integral_linear():
    val = contour_integral(parse("z"), Contour((0.0, 1 + 1j)))
    assert abs(val - 1j) < 1e-12


def test_contour_integral_square():
    val = contour_integral(parse("z^2"), Contour((0.0, 2.0)))
    assert abs(val - 8.0 / 3.0) < 1e-12


def test_contour_integral_closed_loop():
    # winding integral of 1/z around the unit square
    loop = Contour((1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j, 1 + 1j))
    val = contour_integral(parse("1/z"), loop)
    assert abs(val - 2j * math.pi) < 1e-10


def test_contour_integral_against_simpson_oracle():
    # no symbolic antiderivative exists for exp(z^2); check quadrature
    # against a dense composite Simpson rule on [0, 1]
    val = contour_integral(parse("exp(z^2)"), Contour((0.0, 1.0)))
    assert abs(val - 1.4626517459071815) < 1e-10
    n = 1_000_000
    t = np.linspace(0.0, 1.0, n + 1)
    f = np.exp(t * t)
    w = np.ones(n + 1)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    simpson = (1.0 / n) / 3.0 * float(np.dot(w, f))
    assert abs(val - simpson) < 1e-9


def test_contour_integral_path_independence():
    e = parse("exp(z^2)")
    tol = 1e-10
    direct = contour_integral(e, Contour((0.0, 1 + 1j)), tol=tol)
    dogleg = contour_integral(e, Contour((0.0, 1.0, 1 + 1j)), tol=tol)
    assert abs(direct - dogleg) <= 2 * tol


def test_contour_integral_panel_budget():
    with pytest.raises(QuadratureError):
        contour_integral(parse("sin(20*z)"), Contour((0.0, 10.0)), max_panels=2)


def test_contour_integral_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        contour_integral(parse("z"), Contour((0.0, 1.0)), tol=0.0)


def test_contour_integral_diverges_at_singular_endpoint():
    # 1/z is not integrable up to 0: bisection walks into the pole until a
    # quadrature node lands inside the division guard, which must fail loudly
    with pytest.raises(SingularityError):
        contour_integral(parse("1/z"), Contour((1.0, 0.0)), max_panels=200)


def test_contour_integral_rejects_real_mode():
    with pytest.raises(ValueError, match="z only"):
        contour_integral(parse("x"), Contour((0.0, 1.0)))


# ---------------------------------------------------------------------------
# printing


def test_to_text_floats_roundtrip_exactly():
    assert to_text(parse("0.1")) == "0.1"
    assert parse(to_text(Constant(1 / 3))) == Constant(1 / 3)
    assert to_text(Constant(2 + 3j)) == "(2.0+3.0*i)"
    assert to_text(Constant(-4j)) == "(-4.0*i)"


@pytest.mark.parametrize("mode", ["z", "xy"])
def test_parse_print_roundtrip(mode):
    rng = np.random.default_rng(20260819 if mode == "z" else 90816202)
    for _ in range(300):
        e = random_expr(rng, 5, mode)
        assert parse(to_text(e)) == e
