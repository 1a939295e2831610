"""Canonical text forms: floats at 17 significant digits and deterministic JSON.

Every float written to result files or HTTP payloads goes through fmt_float so the
CLI, the service, and the UI agree byte-for-byte. 17 significant decimal digits
round-trip any IEEE binary64 value exactly.
"""

from __future__ import annotations

import hashlib
import math


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def parse_float(s: str) -> float:
    return float(s)


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, no whitespace, %.17g floats."""
    out: list[str] = []
    _emit(obj, out)
    return "".join(out)


def _emit(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(_quote(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isfinite(obj):
            out.append(fmt_float(obj))
        else:
            # JSON has no inf/nan literals; quote them so payloads stay parseable
            out.append(_quote(fmt_float(obj)))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError("canonical_json keys must be strings, got %r" % (key,))
            if i:
                out.append(",")
            out.append(_quote(key))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        # numpy scalars and similar duck-typed numbers
        if hasattr(obj, "item"):
            _emit(obj.item(), out)
        else:
            raise TypeError("canonical_json cannot serialize %r" % (type(obj),))


_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def _quote(s: str) -> str:
    parts = ['"']
    for ch in s:
        if ch in _ESCAPES:
            parts.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            parts.append("\\u%04x" % ord(ch))
        else:
            parts.append(ch)
    parts.append('"')
    return "".join(parts)


def stable_digest(obj, length: int = 16) -> str:
    """Short hex digest of an object's canonical JSON form."""
    text = canonical_json(obj)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:length]
