"""JSON process files.

Layout::

    {
      "labels": ["a", "b"],
      "weights": ["1", "1/2"],
      "max_order": 2,
      "p0": "1/4",
      "densities": {"a": "1/2", "a,b": "1/4"},
      "mode": "rational",
      "tail_mass_allowed": false
    }

Rational values are written as ``"p/q"`` strings (``str(Fraction)``), floats
as JSON numbers in shortest round-trip form.  Density keys are the labels of
the multiset, sorted and comma-joined.  Output uses sorted keys so equal
processes serialize to identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .combinatorics import Multiset
from .process import JanossyProcess, StateSpace
from .series import FLOAT, MODES, RATIONAL, Scalar


class ProcessFormatError(ValueError):
    """The document is not a valid process file."""


def parse_scalar(raw: Any, mode: str) -> Scalar:
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
        raise ProcessFormatError(f"expected a number or rational string, got {raw!r}")
    try:
        if mode == RATIONAL:
            # JSON floats are read as the decimal they were written as
            return Fraction(repr(raw)) if isinstance(raw, float) else Fraction(raw)
        return float(Fraction(raw)) if isinstance(raw, str) else float(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ProcessFormatError(f"bad scalar {raw!r}: {exc}") from None


def format_scalar(value: Scalar, mode: str):
    if mode == RATIONAL:
        return str(Fraction(value))
    return float(value)


def density_key(space: StateSpace, ms: Multiset) -> str:
    return ",".join(sorted(space.labels[s] for s in ms.points()))


def process_from_dict(doc: dict) -> JanossyProcess:
    if not isinstance(doc, dict):
        raise ProcessFormatError("process document must be a JSON object")
    mode = doc.get("mode", RATIONAL)
    if mode not in MODES:
        raise ProcessFormatError(f"unknown mode {mode!r}")
    try:
        labels = doc["labels"]
        max_order = doc["max_order"]
        p0 = doc["p0"]
    except KeyError as exc:
        raise ProcessFormatError(f"missing field {exc}") from None
    if not isinstance(max_order, int) or isinstance(max_order, bool):
        raise ProcessFormatError("max_order must be an integer")
    weights = doc.get("weights")
    try:
        space = StateSpace(
            tuple(labels),
            tuple(parse_scalar(w, RATIONAL if mode == RATIONAL else FLOAT) for w in weights)
            if weights
            else (),
        )
    except (TypeError, ValueError) as exc:
        raise ProcessFormatError(str(exc)) from None
    densities = {}
    for key, raw in doc.get("densities", {}).items():
        names = [s.strip() for s in key.split(",")] if key else []
        try:
            ms = Multiset.from_points(space.index(name) for name in names)
        except KeyError as exc:
            raise ProcessFormatError(f"density key {key!r}: {exc}") from None
        if ms in densities:
            raise ProcessFormatError(f"duplicate density key {key!r}")
        densities[ms] = parse_scalar(raw, mode)
    try:
        return JanossyProcess(
            space,
            max_order,
            parse_scalar(p0, mode),
            densities,
            mode,
            bool(doc.get("tail_mass_allowed", False)),
        )
    except ValueError as exc:
        raise ProcessFormatError(str(exc)) from None


def process_to_dict(P: JanossyProcess) -> dict:
    return {
        "labels": list(P.space.labels),
        "weights": [format_scalar(w, P.mode) for w in P.space.weights],
        "max_order": P.max_order,
        "p0": format_scalar(P.p0, P.mode),
        "densities": {
            density_key(P.space, ms): format_scalar(v, P.mode) for ms, v in P.densities.items()
        },
        "mode": P.mode,
        "tail_mass_allowed": P.tail_mass_allowed,
    }


def dumps_process(P: JanossyProcess) -> str:
    return json.dumps(process_to_dict(P), indent=2, sort_keys=True) + "\n"


def loads_process(text: str) -> JanossyProcess:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProcessFormatError(f"invalid JSON: {exc}") from None
    return process_from_dict(doc)


def load_process(path: str | Path) -> JanossyProcess:
    return loads_process(Path(path).read_text())


def save_process(P: JanossyProcess, path: str | Path) -> None:
    Path(path).write_text(dumps_process(P))
