"""JSON wire formats for schedule documents.

Two document types, distinguished by their ``format`` field:

* ``chromlc-schedule`` -- piecewise-polynomial Hamiltonian schedules.
  Pauli keys are two-letter strings over {I,X,Y,Z}; omitted keys are zero;
  coefficient lists are ascending-degree.  An ``II`` component is legal
  (it only shifts the global phase) but parsing one emits a warning.
* ``chromlc-gates`` -- gate schedules; unitaries are 4x4 arrays of
  ``[re, im]`` pairs and every gate carries its angle.

Serialization is canonical (fixed key order, shortest round-trip float
rendering), so serialize(parse(text)) reproduces canonical documents and
parse(serialize(obj)) reproduces objects exactly.
"""

from __future__ import annotations

import json
import warnings

from . import linalg
from .compiler import Gate, GateSchedule, Step
from .errors import BadParams, NotUnitary, ParseError, SchemaVersionMismatch
from .hamiltonian import PAULI_LABELS, HamiltonianSchedule, PairTerm, Segment

SCHEDULE_FORMAT = "chromlc-schedule"
GATES_FORMAT = "chromlc-gates"
FORMAT_VERSION = 1
ANGLE_CHECK_TOL = 1e-9

__all__ = [
    "GATES_FORMAT",
    "SCHEDULE_FORMAT",
    "dumps_gates",
    "dumps_schedule",
    "load_document",
    "load_gates",
    "load_schedule",
    "loads_gates",
    "loads_schedule",
    "save_gates",
    "save_schedule",
]


def _decode(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top-level document must be a JSON object")
    return doc


def _check_header(doc: dict, expected_format: str):
    fmt = doc.get("format")
    if fmt != expected_format:
        raise SchemaVersionMismatch(f"format: expected {expected_format!r}, got {fmt!r}")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise SchemaVersionMismatch(f"version: expected {FORMAT_VERSION}, got {version!r}")


def _int_field(obj, key, where):
    value = obj.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"{where}.{key}: expected an integer, got {value!r}")
    return value


def _num_field(obj, key, where):
    value = obj.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParseError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)


def _list_field(obj, key, where):
    value = obj.get(key)
    if not isinstance(value, list):
        raise ParseError(f"{where}.{key}: expected a list")
    return value


# -- Hamiltonian schedules ---------------------------------------------------


def dumps_schedule(s: HamiltonianSchedule) -> str:
    segments = []
    for seg in s.segments:
        terms = []
        for term in seg.terms:
            coeffs = {}
            for label, poly in zip(PAULI_LABELS, term.coeffs):
                if poly:
                    coeffs[label] = [float(c) for c in poly]
            terms.append({"pair": [term.pair[0], term.pair[1]], "coeffs": coeffs})
        segments.append({"t_start": seg.t_start, "t_end": seg.t_end, "terms": terms})
    doc = {
        "format": SCHEDULE_FORMAT,
        "version": FORMAT_VERSION,
        "n_qubits": s.n_qubits,
        "segments": segments,
    }
    return json.dumps(doc, indent=2) + "\n"


def loads_schedule(text: str) -> HamiltonianSchedule:
    doc = _decode(text)
    _check_header(doc, SCHEDULE_FORMAT)
    n_qubits = _int_field(doc, "n_qubits", "document")
    raw_segments = _list_field(doc, "segments", "document")
    if not raw_segments:
        raise ParseError("schedule must cover [0,T]: segments list is empty")
    segments = []
    for i, raw_seg in enumerate(raw_segments):
        where = f"segments[{i}]"
        if not isinstance(raw_seg, dict):
            raise ParseError(f"{where}: expected an object")
        t_start = _num_field(raw_seg, "t_start", where)
        t_end = _num_field(raw_seg, "t_end", where)
        terms = []
        for j, raw_term in enumerate(_list_field(raw_seg, "terms", where)):
            twhere = f"{where}.terms[{j}]"
            if not isinstance(raw_term, dict):
                raise ParseError(f"{twhere}: expected an object")
            pair = raw_term.get("pair")
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)
            ):
                raise ParseError(f"{twhere}.pair: expected [k, l] with integer entries")
            k, l = pair
            if not 0 <= k < l:
                raise ParseError(f"{twhere}.pair: indices must satisfy 0 <= k < l, got [{k}, {l}]")
            raw_coeffs = raw_term.get("coeffs")
            if not isinstance(raw_coeffs, dict):
                raise ParseError(f"{twhere}.coeffs: expected an object of Pauli keys")
            polys = [()] * 16
            for label, coeff_list in raw_coeffs.items():
                if label not in PAULI_LABELS:
                    raise ParseError(
                        f"{twhere}.coeffs: unknown Pauli key {label!r}; "
                        "keys are two letters over I, X, Y, Z"
                    )
                if not isinstance(coeff_list, list) or not all(
                    isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeff_list
                ):
                    raise ParseError(f"{twhere}.coeffs.{label}: expected a list of numbers")
                if label == "II" and any(c != 0 for c in coeff_list):
                    warnings.warn(
                        f"{twhere}: II component only shifts the global phase; "
                        "it still counts toward the interaction norm",
                        stacklevel=2,
                    )
                polys[PAULI_LABELS.index(label)] = tuple(float(c) for c in coeff_list)
            try:
                terms.append(PairTerm((k, l), tuple(polys)))
            except BadParams as exc:
                raise ParseError(f"{twhere}: {exc}") from None
        try:
            segments.append(Segment(t_start, t_end, tuple(terms)))
        except BadParams as exc:
            raise ParseError(f"{where}: {exc}") from None
    try:
        return HamiltonianSchedule(n_qubits, tuple(segments))
    except BadParams as exc:
        raise ParseError(str(exc)) from None


# -- gate schedules ----------------------------------------------------------


def dumps_gates(g: GateSchedule) -> str:
    steps = []
    for step in g.steps:
        gates = []
        for gate in step.gates:
            unitary = [
                [[float(z.real), float(z.imag)] for z in row] for row in gate.unitary
            ]
            gates.append(
                {"pair": [gate.pair[0], gate.pair[1]], "unitary": unitary, "angle": gate.angle}
            )
        steps.append({"gates": gates})
    doc = {
        "format": GATES_FORMAT,
        "version": FORMAT_VERSION,
        "n_qubits": g.n_qubits,
        "steps": steps,
    }
    return json.dumps(doc, indent=2) + "\n"


def loads_gates(text: str) -> GateSchedule:
    doc = _decode(text)
    _check_header(doc, GATES_FORMAT)
    n_qubits = _int_field(doc, "n_qubits", "document")
    steps = []
    for i, raw_step in enumerate(_list_field(doc, "steps", "document")):
        where = f"steps[{i}]"
        if not isinstance(raw_step, dict):
            raise ParseError(f"{where}: expected an object")
        gates = []
        for j, raw_gate in enumerate(_list_field(raw_step, "gates", where)):
            gwhere = f"{where}.gates[{j}]"
            if not isinstance(raw_gate, dict):
                raise ParseError(f"{gwhere}: expected an object")
            pair = raw_gate.get("pair")
            if not isinstance(pair, list) or len(pair) != 2:
                raise ParseError(f"{gwhere}.pair: expected [k, l]")
            raw_u = raw_gate.get("unitary")
            if (
                not isinstance(raw_u, list)
                or len(raw_u) != 4
                or any(not isinstance(row, list) or len(row) != 4 for row in raw_u)
            ):
                raise ParseError(f"{gwhere}.unitary: expected a 4x4 array of [re, im] pairs")
            try:
                u = [[complex(entry[0], entry[1]) for entry in row] for row in raw_u]
            except (TypeError, IndexError):
                raise ParseError(f"{gwhere}.unitary: entries must be [re, im] pairs") from None
            angle = _num_field(raw_gate, "angle", gwhere)
            try:
                gate = Gate(tuple(pair), u, angle)
            except (BadParams, NotUnitary) as exc:
                raise ParseError(f"{gwhere}: {exc}") from None
            if abs(gate.angle - linalg.unitary_angle(gate.unitary)) > ANGLE_CHECK_TOL:
                raise ParseError(
                    f"{gwhere}.angle: {gate.angle} does not match the unitary's angle"
                )
            gates.append(gate)
        try:
            steps.append(Step(tuple(gates)))
        except BadParams as exc:
            raise ParseError(f"{where}: {exc}") from None
    try:
        return GateSchedule(n_qubits, tuple(steps))
    except BadParams as exc:
        raise ParseError(str(exc)) from None


# -- file helpers ------------------------------------------------------------


def save_schedule(s: HamiltonianSchedule, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_schedule(s))


def load_schedule(path) -> HamiltonianSchedule:
    with open(path, encoding="utf-8") as fh:
        return loads_schedule(fh.read())


def save_gates(g: GateSchedule, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_gates(g))


def load_gates(path) -> GateSchedule:
    with open(path, encoding="utf-8") as fh:
        return loads_gates(fh.read())


def load_document(path):
    """Load either document type, dispatching on the ``format`` field."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    doc = _decode(text)
    fmt = doc.get("format")
    if fmt == SCHEDULE_FORMAT:
        return loads_schedule(text)
    if fmt == GATES_FORMAT:
        return loads_gates(text)
    raise SchemaVersionMismatch(f"format: unknown document format {fmt!r}")
