"""Report emitters for the command line"""
import csv
import io
import json
import math
import numbers
from enum import Enum
from typing import Dict, Iterable, List

FLOAT_FORMAT = '.17g'


def _scalar(value) -> str:
    if value is None:
        return 'null'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, Enum):
        return json.dumps(value.value)
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        value = float(value)
        if not math.isfinite(value):
            return 'null'
        return format(value, FLOAT_FORMAT)
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot emit {type(value).__name__} as JSON")


def emit_json(obj) -> str:
    """
    Deterministic JSON text

    Keys keep insertion order, floats carry 17 significant digits and
    non-finite floats become null, so the output re-parses to the same
    numbers and re-emits to the same bytes.
    """
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {emit_json(v)}" for k, v in obj.items())
        return '{' + ', '.join(items) + '}'
    if isinstance(obj, (list, tuple)):
        return '[' + ', '.join(emit_json(v) for v in obj) + ']'
    return _scalar(obj)


def _text(value) -> str:
    if isinstance(value, Enum):
        value = value.value
    if isinstance(value, str):
        return value
    return _scalar(value)


def _flatten(obj, prefix: str = ''):
    if isinstance(obj, dict):
        for key, value in obj.items():
            yield from _flatten(value, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(obj, (list, tuple)):
        for i, value in enumerate(obj):
            yield from _flatten(value, f"{prefix}[{i}]")
    else:
        yield prefix, _text(obj)


def emit_plain(obj) -> str:
    """``key=value`` lines, nested keys joined with dots"""
    return '\n'.join(f"{key}={text}" for key, text in _flatten(obj))


def emit_csv(rows: Iterable[Dict], header: List[str]) -> str:
    """CSV text with a header row; absent cells are empty"""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=header, lineterminator='\n', extrasaction='ignore')
    writer.writeheader()
    for row in rows:
        writer.writerow({
            key: '' if row.get(key) is None else _text(row[key])
            for key in header
        })
    return buffer.getvalue()
