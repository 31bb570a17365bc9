import json
import math

import jsonschema
import numpy as np
import pytest

from dilconst.certificate import BoundKind
from dilconst.records import RECORD_SCHEMA, ResultRecord, csv_rows, to_jsonable, validate


def make(**kw):
    base = dict(command="ctheta", params={"m": 1, "n": 2}, value=1.25, error_bound=1e-7,
                bound_kind=BoundKind.TWO_SIDED, seed=None, runtime_ms=3)
    base.update(kw)
    return ResultRecord(**base)


def test_round_trip():
    rec = make(details={"arr": np.arange(3), "z": 1 + 2j, "inf": math.inf}, passed=True)
    line = rec.to_json()
    back = ResultRecord.from_json(line)
    assert back.to_dict() == json.loads(line)
    assert back.bound_kind == "two_sided" and back.details["z"] == [1.0, 2.0]
    assert back.details["inf"] == "inf"


def test_schema_rejections():
    good = make().to_dict()
    validate(good)
    for key, bad in (("bound_kind", "guess"), ("error_bound", -1.0), ("runtime_ms", -2),
                     ("schema_version", "0.9"), ("value", "1.0")):
        with pytest.raises(jsonschema.ValidationError):
            validate({**good, key: bad})
    with pytest.raises(jsonschema.ValidationError):
        validate({**good, "extra": 1})
    missing = dict(good)
    del missing["seed"]
    with pytest.raises(jsonschema.ValidationError):
        validate(missing)
    assert RECORD_SCHEMA["additionalProperties"] is False


def test_to_jsonable():
    assert to_jsonable({"a": (np.float64(1.5), np.int64(2))}) == {"a": [1.5, 2]}
    assert to_jsonable(BoundKind.EXACT) == "exact"
    assert to_jsonable(float("nan")) == "nan"


def test_csv_summary():
    text = csv_rows([make(), make(value=2.0, passed=False)])
    lines = text.strip().splitlines()
    assert lines[0].startswith("command,value,error_bound")
    assert len(lines) == 3 and "False" in lines[2]
