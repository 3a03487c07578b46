"""JSON system files, relation files and initial-state files.

A system file looks like::

    {
      "dim": 2,
      "hamiltonian": {"diagonal": [1.0, -1.0]},
      "lindblad_ops": [[[[0, 0], [1, 0]], [[0, 0], [0, 0]]]],
      "labels": ["e", "g"]
    }

Complex entries are ``[re, im]`` pairs; ``"hamiltonian"`` may instead hold
``{"matrix": [[[re, im], ...], ...]}`` and an optional ``"basis"`` gives the
unitary whose columns define the projectors.  Unknown keys are rejected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .exceptions import InvalidSystem
from .laplacian import ProjectorFamily
from .model import LindbladSystem, validate_system

_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_CMATRIX = {"type": "array", "items": {"type": "array", "items": _PAIR}}

SYSTEM_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dim", "hamiltonian", "lindblad_ops"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "hamiltonian": {
            "type": "object",
            "additionalProperties": False,
            "oneOf": [{"required": ["diagonal"]}, {"required": ["matrix"]}],
            "properties": {
                "diagonal": {"type": "array", "items": {"type": "number"}},
                "matrix": _CMATRIX,
            },
        },
        "lindblad_ops": {"type": "array", "items": _CMATRIX},
        "basis": _CMATRIX,
        "labels": {"type": "array", "items": {"type": "string"}},
    },
}


class InputError(InvalidSystem):
    """A file could not be read, parsed or validated."""


@dataclass(frozen=True)
class SystemFile:
    system: LindbladSystem
    projectors: ProjectorFamily | None = None


def _cmatrix(rows, n: int, what: str) -> np.ndarray:
    m = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128) if rows else np.zeros((0, 0))
    if m.shape != (n, n):
        raise InputError(f"{what}: dimension mismatch, expected {n}x{n}, got {m.shape}")
    return m


def _pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_system(doc: dict, source: str = "<system>") -> SystemFile:
    try:
        jsonschema.validate(doc, SYSTEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"{source}: at {loc}: {exc.message}") from None
    n = doc["dim"]
    ham = doc["hamiltonian"]
    if "diagonal" in ham:
        if len(ham["diagonal"]) != n:
            raise InputError(f"{source}: hamiltonian: dimension mismatch, expected {n} diagonal entries")
        h = np.diag(np.array(ham["diagonal"], dtype=np.complex128))
    else:
        h = _cmatrix(ham["matrix"], n, "hamiltonian")
    ops = tuple(_cmatrix(op, n, f"lindblad_ops[{i}]") for i, op in enumerate(doc["lindblad_ops"]))
    sys = LindbladSystem(h, ops, doc.get("labels"))
    report = validate_system(sys)
    if report:
        raise InputError(f"{source}: " + "; ".join(report))
    proj = None
    if "basis" in doc:
        try:
            proj = ProjectorFamily(_cmatrix(doc["basis"], n, "basis"))
        except InvalidSystem as exc:
            raise InputError(f"{source}: {exc}") from None
    return SystemFile(sys, proj)


def load_system(path) -> SystemFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{p}: {exc.strerror or exc}") from None
    return parse_system(_load_json(text, str(p)), str(p))


def system_to_dict(sys: LindbladSystem, proj: ProjectorFamily | None = None) -> dict:
    """Serialise exactly: floats are written with full round-trip precision."""
    h = sys.hamiltonian
    doc: dict = {"dim": sys.dim}
    if np.array_equal(h, np.diag(np.diag(h))) and not np.any(np.diag(h).imag):
        doc["hamiltonian"] = {"diagonal": [float(x) for x in np.diag(h).real]}
    else:
        doc["hamiltonian"] = {"matrix": _pairs(h)}
    doc["lindblad_ops"] = [_pairs(op) for op in sys.lindblad_ops]
    if proj is not None and not proj.is_identity():
        doc["basis"] = _pairs(proj.basis)
    if sys.labels is not None:
        doc["labels"] = list(sys.labels)
    return doc


def save_system(path, sys: LindbladSystem, proj: ProjectorFamily | None = None) -> None:
    Path(path).write_text(json.dumps(system_to_dict(sys, proj), indent=1) + "\n", encoding="utf-8")


def load_relation(path) -> list[list[int]]:
    """Classes as lists of 1-based levels; accepts a bare list or ``{"classes": [...]}``."""
    p = Path(path)
    doc = _load_json(p.read_text(encoding="utf-8"), str(p))
    classes = doc.get("classes") if isinstance(doc, dict) else doc
    if not isinstance(classes, list) or not all(isinstance(c, list) and all(isinstance(v, int) for v in c) for c in classes):
        raise InputError(f"{p}: expected a list of classes of 1-based integer levels")
    return classes


def load_initial(path, n: int) -> np.ndarray:
    """Initial state as a density matrix.

    The file holds either ``{"lambda": [n reals]}`` (diagonal state), a bare
    list of ``n`` reals, or ``{"rho": n x n [re, im] pairs}``.
    """
    p = Path(path)
    doc = _load_json(p.read_text(encoding="utf-8"), str(p))
    if isinstance(doc, dict) and "rho" in doc:
        return _cmatrix(doc["rho"], n, "rho")
    lam = doc.get("lambda") if isinstance(doc, dict) else doc
    try:
        v = np.array(lam, dtype=np.float64)
    except (TypeError, ValueError):
        raise InputError(f"{p}: expected 'lambda' or 'rho'") from None
    if v.shape != (n,):
        raise InputError(f"{p}: lambda must have {n} entries")
    return np.diag(v).astype(np.complex128)
