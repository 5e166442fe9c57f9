"""Tests for the operator_core module."""
import json
import math

import pytest

from ou_kernels.exceptions import OperatorError
from ou_kernels.operator_core import (
    CRITICAL,
    HYPERBOLIC,
    OSCILLATORY,
    OUOperator,
    ProductOperator,
    classify,
    discriminant,
    load_operator_file,
    parse_operator,
)


def test_l_plus_is_hyperbolic(l_plus):
    regime = classify(l_plus)
    assert regime.kind == HYPERBOLIC
    assert regime.discriminant == 5.0
    assert regime.lambda0 == pytest.approx(math.sqrt(5.0), rel=1e-12)


def test_l_minus_is_oscillatory(l_minus):
    regime = classify(l_minus)
    assert regime.kind == OSCILLATORY
    assert regime.discriminant == -3.0
    assert regime.lambda0 == pytest.approx(math.sqrt(3.0), rel=1e-12)


@pytest.mark.parametrize("b", [-3.0, 0.0, 1.0, 7.5])
def test_critical_for_any_b(b):
    regime = classify(OUOperator(1.0, 2.0, b, -1.0))
    assert regime.kind == CRITICAL
    assert regime.lambda0 == 0.0
    assert "lambda0" not in regime.to_dict()


def test_discriminant_formula():
    op = OUOperator(0.5, -3.0, 2.0, 0.25)
    assert discriminant(op) == pytest.approx(9.0 + 0.5)


def test_near_critical_band():
    op = OUOperator(1.0, 2.0, 0.0, -1.0 + 2.5e-13)
    assert classify(op).kind == CRITICAL
    assert classify(op, eps_rel=0.0).kind == HYPERBOLIC


def test_negative_eps_rejected(l_plus):
    with pytest.raises(ValueError):
        classify(l_plus, eps_rel=-1.0)


def test_theta_must_be_positive():
    with pytest.raises(OperatorError, match="theta must be positive") as info:
        OUOperator(0.0, 1.0, 0.0, 1.0)
    assert info.value.field == "theta"


def test_rho_must_be_nonzero():
    with pytest.raises(OperatorError) as info:
        OUOperator(1.0, 1.0, 0.0, 0.0)
    assert info.value.field == "rho"


@pytest.mark.parametrize("value", [float("nan"), float("inf")])
def test_non_finite_rejected(value):
    with pytest.raises(OperatorError):
        OUOperator(1.0, value, 0.0, 1.0)


def test_operator_error_is_value_error():
    with pytest.raises(ValueError):
        OUOperator(-1.0, 0.0, 0.0, 1.0)


def test_parse_single_operator():
    op = parse_operator('{"theta": 1, "a": 1, "b": 0, "rho": 1}')
    assert op == OUOperator(1.0, 1.0, 0.0, 1.0)


def test_parse_product_operator():
    text = json.dumps({"factors": [
        {"theta": 1, "a": 1, "b": 0, "rho": 1},
        {"theta": 1, "a": 1, "b": 0, "rho": -1},
    ]})
    pop = parse_operator(text)
    assert isinstance(pop, ProductOperator)
    assert pop.dimension == 2
    assert pop.factors[1].rho == -1.0


def test_parse_malformed_json():
    with pytest.raises(OperatorError, match="malformed"):
        parse_operator("{theta: 1")


def test_parse_missing_field():
    with pytest.raises(OperatorError) as info:
        parse_operator('{"theta": 1, "a": 1, "b": 0}')
    assert info.value.field == "rho"


def test_parse_rejects_booleans():
    with pytest.raises(OperatorError):
        parse_operator('{"theta": true, "a": 1, "b": 0, "rho": 1}')


def test_parse_rejects_integers_beyond_float_range():
    huge = "1" + "0" * 400
    with pytest.raises(OperatorError, match="finite") as info:
        parse_operator(f'{{"theta": {huge}, "a": 1, "b": 0, "rho": 1}}')
    assert info.value.field == "theta"


def test_parse_names_offending_factor():
    text = json.dumps({"factors": [
        {"theta": 1, "a": 1, "b": 0, "rho": 1},
        {"theta": -2, "a": 1, "b": 0, "rho": 1},
    ]})
    with pytest.raises(OperatorError) as info:
        parse_operator(text)
    assert info.value.field == "factors[1].theta"


def test_parse_empty_factors():
    with pytest.raises(OperatorError):
        parse_operator('{"factors": []}')


def test_load_operator_file(tmp_path):
    path = tmp_path / "op.json"
    path.write_text('{"theta": 2, "a": 0, "b": 1, "rho": -0.5}', encoding="utf-8")
    assert load_operator_file(str(path)) == OUOperator(2.0, 0.0, 1.0, -0.5)


def test_load_missing_operator_file(tmp_path):
    with pytest.raises(OperatorError, match="cannot read"):
        load_operator_file(str(tmp_path / "missing.json"))


def test_regime_to_dict(l_plus):
    d = classify(l_plus).to_dict()
    assert d["regime"] == "hyperbolic"
    assert d["discriminant"] == 5.0
    assert d["lambda0"] == pytest.approx(2.2360679775)


def test_with_b(l_plus):
    assert l_plus.with_b(3.0) == OUOperator(1.0, 1.0, 3.0, 1.0)
