import json
import math
from pathlib import Path

import numpy as np
import pytest

from relmargin import (
    BoundParams,
    InputError,
    LabeledSample,
    TableHypothesis,
    bound_cov_alpha2,
    ramp,
)
from relmargin.estimates import ComplexityEstimate
from relmargin.reportio import canonical_json, export_margins_csv, format_float, report_csv

SCHEMA_DIR = Path(__file__).parent.parent / "src/relmargin/schemas"


def test_float_formatting_is_12_significant_digits():
    assert format_float(1 / 3) == "0.333333333333"
    assert format_float(0.05) == "0.05"
    assert format_float(1e-17) == "1e-17"


def test_canonical_json_is_byte_stable_and_sorted():
    obj = {"b": 0.1 + 0.2, "a": [1, 2.0, {"z": True, "y": None}]}
    one = canonical_json(obj)
    two = canonical_json(obj)
    assert one == two
    assert one.index('"a"') < one.index('"b"')
    # 0.30000000000000004 rounds to 0.3 at 12 significant digits
    assert '"b": 0.3' in one


def test_canonical_non_finite_handling():
    assert '"Infinity"' in canonical_json({"x": math.inf})
    assert '"-Infinity"' in canonical_json({"x": -math.inf})
    with pytest.raises(InputError):
        canonical_json({"x": math.nan})


def test_bound_report_csv_header_and_round_trip_schema():
    jsonschema = pytest.importorskip("jsonschema")
    rep = bound_cov_alpha2(0.1, 3.0, BoundParams(m=500, delta=0.05))
    data = json.loads(canonical_json(rep.to_json()))
    schema = json.loads((SCHEMA_DIR / "bound-report.v1.json").read_text())
    jsonschema.validate(data, schema)
    csv_text = report_csv(data)
    lines = csv_text.splitlines()
    assert lines[0] == (
        "family,m,delta,alpha,rho,empirical_term,complexity_term,bound_value,"
        "solver,complexity_method,vacuous,clamped"
    )
    assert lines[1].startswith("cov-alpha2,500,0.05,")


def test_complexity_estimate_schema_and_csv():
    jsonschema = pytest.importorskip("jsonschema")
    est = ComplexityEstimate(value=1.5, method="monte-carlo", trials=(32, 64), seed=7, stderr=0.01)
    data = json.loads(canonical_json(est.to_json()))
    schema = json.loads((SCHEMA_DIR / "complexity-estimate.v1.json").read_text())
    jsonschema.validate(data, schema)
    lines = report_csv(data).splitlines()
    assert lines[0] == "value,method,trials,seed,stderr"
    assert lines[1] == "1.5,monte-carlo,32;64,7,0.01"


def test_margins_csv_header_and_values():
    h = TableHypothesis({0: 0.6, 1: 0.3})
    s = LabeledSample(points=np.array([[0.0], [1.0]]), labels=np.array([1.0, 1.0]))
    text = export_margins_csv(h, s, ramp(0.5))
    lines = text.splitlines()
    assert lines[0] == "index,margin,loss"
    assert lines[1] == "0,0.6,0"
    assert lines[2] == "1,0.3,0.4"


def test_generic_csv_fallback_flattens():
    text = report_csv({"schema": "relmargin/verify-report/v1", "passed": True, "a": {"b": 2}})
    lines = text.splitlines()
    assert lines[0] == "key,value"
    assert "a.b,2" in lines
    assert "passed,1" in lines
