# ghlab/utils/helpers.py
import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, List, Optional

from pydantic import BaseModel, ValidationError

from ..exceptions import InputError, ParseError

FLOAT_DIGITS = 17


def format_float(x: float) -> str:
    """17 significant digits, always with a decimal point or exponent"""
    if not math.isfinite(x):
        raise InputError(f"Refusing to serialize non-finite value {x!r}")
    text = format(x, f".{FLOAT_DIGITS}g")
    if not any(ch in text for ch in ".e"):
        text += ".0"
    return text


def _encode(value: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_encode(v, indent, level) for v in value) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def to_json(payload: Any, indent: int = 2) -> str:
    """Deterministic JSON: insertion-ordered keys, fixed float precision"""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(by_alias=True, exclude_none=True)
    elif isinstance(payload, list):
        payload = [p.model_dump(by_alias=True, exclude_none=True) if isinstance(p, BaseModel) else p for p in payload]
    return _encode(payload, indent, 0) + "\n"


def _csv_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ""
    return str(value)


def to_csv(header: Optional[List[str]], rows: Iterable[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        print(text, end="")
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def load_json_file(path: str, schema: type) -> BaseModel:
    """Read and validate a JSON input file; failures become ParseError with the location"""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read file ({e.strerror})", location=path)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, location=f"{path}:{e.lineno}:{e.colno}")
    try:
        return schema.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(p) for p in err["loc"])
        raise ParseError(err["msg"], location=f"{path}:{where}" if where else path)
