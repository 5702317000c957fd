# tests/test_helpers.py
import json

import pytest

from ghlab.exceptions import InputError
from ghlab.models import BoundPayload
from ghlab.utils.helpers import format_float, to_csv, to_json


@pytest.mark.parametrize(
    "value, text",
    [(0.5, "0.5"), (0.0, "0.0"), (2.0, "2.0"), (1 / 3, "0.33333333333333331"), (1e20, "1e+20")],
)
def test_format_float(value, text):
    assert format_float(value) == text
    assert float(text) == value


def test_format_float_rejects_non_finite():
    with pytest.raises(InputError):
        format_float(float("inf"))


def test_to_json_keeps_field_order_and_aliases():
    payload = BoundPayload(lam=10.0, d=1.0, m=3, c=1.0, c_tag="exact", bound=10 / 6, valid=True)
    text = to_json(payload)
    assert list(json.loads(text)) == ["lambda", "d", "m", "c", "c_tag", "bound", "valid"]
    assert text.endswith("}\n")


def test_to_json_inlines_numeric_rows():
    text = to_json({"points": [[0.0, 1.0], [2.0, 3.0]]})
    assert "[0.0, 1.0]" in text
    assert json.loads(text) == {"points": [[0.0, 1.0], [2.0, 3.0]]}


def test_to_csv_booleans_and_missing_values():
    assert to_csv(["a", "b", "c"], [[True, None, 0.25]]) == "a,b,c\ntrue,,0.25\n"
