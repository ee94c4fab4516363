import dataclasses
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from .errors import FWSensError, ProblemFormatError
from .geometry import Polytope
from .objective import QuadraticObjective

logger = logging.getLogger(__name__)

PROBLEM_KEYS = {"name", "A", "b", "objective", "x0"}
REQUIRED_KEYS = ("A", "b", "objective")
OBJECTIVE_KEYS = {"Q", "c", "r"}


@dataclass(frozen=True, eq=False)
class Problem:
    """Problem file contents: min f over {z : Az <= b}, with an optional start x0."""

    polytope: Polytope
    objective: QuadraticObjective
    x0: Optional[np.ndarray] = None
    name: Optional[str] = None


def _reject_constant(token: str):
    # json acepta NaN/Infinity por defecto; el esquema no
    raise ValueError(f"valor no finito {token}")


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFormatError(field, f"se esperaba un número, recibido {value!r}")
    if not math.isfinite(value):
        raise ProblemFormatError(field, "valor no finito")
    return float(value)


def _vector(value: Any, field: str, length: Optional[int] = None) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ProblemFormatError(field, "se esperaba una lista no vacía de números")
    vector = np.array([_number(item, f"{field}[{i}]") for i, item in enumerate(value)])
    if length is not None and vector.shape[0] != length:
        raise ProblemFormatError(field, f"se esperaban {length} entradas, recibidas {vector.shape[0]}")
    return vector


def _matrix(value: Any, field: str, columns: Optional[int] = None) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ProblemFormatError(field, "se esperaba una lista no vacía de filas")
    rows = [_vector(row, f"{field}[{i}]", columns) for i, row in enumerate(value)]
    width = rows[0].shape[0]
    for i, row in enumerate(rows):
        if row.shape[0] != width:
            raise ProblemFormatError(f"{field}[{i}]", f"se esperaban {width} columnas, recibidas {row.shape[0]}")
    return np.vstack(rows)


def parse_problem(data: Any) -> Problem:
    """Validates a decoded problem document against the strict schema.

    Raises:
        ProblemFormatError: the message starts with the offending field name.
    """
    if not isinstance(data, dict):
        raise ProblemFormatError("<root>", "el documento debe ser un objeto JSON")
    unknown = sorted(set(data) - PROBLEM_KEYS)
    if unknown:
        raise ProblemFormatError(unknown[0], "clave desconocida")
    for key in REQUIRED_KEYS:
        if key not in data:
            raise ProblemFormatError(key, "clave obligatoria ausente")

    A = _matrix(data["A"], "A")
    m, n = A.shape
    b = _vector(data["b"], "b", m)

    objective = data["objective"]
    if not isinstance(objective, dict):
        raise ProblemFormatError("objective", "se esperaba un objeto {Q, c, r}")
    unknown = sorted(set(objective) - OBJECTIVE_KEYS)
    if unknown:
        raise ProblemFormatError(f"objective.{unknown[0]}", "clave desconocida")
    for key in sorted(OBJECTIVE_KEYS):
        if key not in objective:
            raise ProblemFormatError(f"objective.{key}", "clave obligatoria ausente")
    Q = _matrix(objective["Q"], "objective.Q", n)
    if Q.shape[0] != n:
        raise ProblemFormatError("objective.Q", f"se esperaban {n} filas, recibidas {Q.shape[0]}")
    c = _vector(objective["c"], "objective.c", n)
    r = _number(objective["r"], "objective.r")

    x0 = _vector(data["x0"], "x0", n) if "x0" in data else None
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ProblemFormatError("name", "se esperaba una cadena")

    try:
        f = QuadraticObjective(Q, c, r)
    except FWSensError as e:
        raise ProblemFormatError("objective.Q", str(e)) from e
    return Problem(polytope=Polytope(A, b), objective=f, x0=x0, name=name)


def load_problem(path: str) -> Problem:
    """Reads and validates a problem JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle, parse_constant=_reject_constant)
    except OSError as e:
        raise ProblemFormatError("<file>", f"no se pudo leer {path}: {e}") from e
    except ValueError as e:
        raise ProblemFormatError("<json>", f"JSON inválido en {path}: {e}") from e
    problem = parse_problem(data)
    logger.debug("problema %s cargado: m=%d, n=%d", problem.name or path, problem.polytope.m, problem.polytope.n)
    return problem


def problem_to_dict(problem: Problem) -> Dict[str, Any]:
    """Inverse of parse_problem; optional keys are emitted only when set."""
    data: Dict[str, Any] = {}
    if problem.name is not None:
        data["name"] = problem.name
    data["A"] = problem.polytope.A.tolist()
    data["b"] = problem.polytope.b.tolist()
    data["objective"] = {
        "Q": problem.objective.Q.tolist(),
        "c": problem.objective.c_lin.tolist(),
        "r": problem.objective.r,
    }
    if problem.x0 is not None:
        data["x0"] = np.asarray(problem.x0, dtype=float).tolist()
    return data


def save_problem(problem: Problem, path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(dump_json(problem_to_dict(problem)))


def parse_vector(argument: str, field: str, length: Optional[int] = None) -> np.ndarray:
    """Reads a vector given as a JSON file path, an inline JSON list or comma-separated numbers."""
    text = argument.strip()
    if os.path.isfile(text):
        with open(text, "r", encoding="utf-8") as handle:
            text = handle.read().strip()
    if not text.startswith("["):
        text = f"[{text}]"
    try:
        value = json.loads(text, parse_constant=_reject_constant)
    except ValueError as e:
        raise ProblemFormatError(field, f"vector inválido: {e}") from e
    return _vector(value, field, length)


def to_jsonable(value: Any) -> Any:
    """Converts dataclasses, numpy arrays and scalars into plain JSON values.

    Properties are not serialized, only dataclass fields; the array field
    ``lam`` is written under the key ``lambda``.
    """
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        result = {}
        for item in dataclasses.fields(value):
            key = "lambda" if item.name == "lam" else item.name.replace("lam_", "lambda_")
            result[key] = to_jsonable(getattr(value, item.name))
        return result
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dump_json(value: Any) -> str:
    """Deterministic JSON text: stable key order, shortest round-trip floats, trailing LF."""
    return json.dumps(to_jsonable(value), indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def write_csv(frame: pd.DataFrame, path: str) -> None:
    """Writes a DataFrame as UTF-8 CSV with a header row and LF line endings."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    logger.info("CSV escrito en %s (%d filas)", path, len(frame))
