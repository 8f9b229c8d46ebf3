"""Canonical, byte-stable JSON: sorted keys, 17-significant-digit floats, LF."""
import json
import math

import numpy as np


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _encode(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end_pad = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = sorted((str(k), v) for k, v in obj.items())
        for idx, (key, val) in enumerate(items):
            out.append(pad + json.dumps(key, ensure_ascii=False) + ": ")
            _encode(val, indent, level + 1, out)
            out.append(",\n" if idx < len(items) - 1 else "\n")
        out.append(end_pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        if not seq:
            out.append("[]")
            return
        # flat numeric lists stay on one line to keep reports compact
        if all(isinstance(v, (int, float, bool, np.integer, np.floating)) or v is None for v in seq):
            parts = []
            for v in seq:
                sub = []
                _encode(v, indent, level + 1, sub)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for idx, val in enumerate(seq):
            out.append(pad)
            _encode(val, indent, level + 1, out)
            out.append(",\n" if idx < len(seq) - 1 else "\n")
        out.append(end_pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj, indent=1):
    out = []
    _encode(obj, indent, 0, out)
    out.append("\n")
    return "".join(out)


def _decode_special(obj):
    if isinstance(obj, dict):
        return {k: _decode_special(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode_special(v) for v in obj]
    if obj == "nan":
        return math.nan
    if obj == "inf":
        return math.inf
    if obj == "-inf":
        return -math.inf
    return obj


def load_canonical(text):
    return _decode_special(json.loads(text))
