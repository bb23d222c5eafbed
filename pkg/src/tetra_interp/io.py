"""JSON payloads.

Complex scalars are ``[re, im]`` pairs and polynomials ascending coefficient
arrays of such pairs.  Output is deterministic: keys keep insertion order and
every float is written with 17 significant digits.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .blaschke import Parametrization, as_complex_vector
from .errors import InvalidData
from .polyrat import ComplexPoly, RationalFn
from .royal import CenterPoint, RoyalNode, TetraInnerFn, assemble


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if text in ("-0", "0"):
        return "0.0" if text == "0" else "-0.0"
    return text


def dumps(obj, indent: int = 2) -> str:
    """Serialize ``obj`` to JSON with 17-significant-digit floats.

    Complex numbers become ``[re, im]``; numpy scalars and arrays are
    converted to their Python counterparts.  Non-finite floats become
    ``null``.
    """

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _float(float(o))
        if isinstance(o, (complex, np.complexfloating)):
            return enc([float(o.real), float(o.imag)], level)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, np.ndarray):
            return enc(o.tolist(), level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(isinstance(v, (int, float, np.number, bool)) and not isinstance(v, complex) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            items = [pad + enc(v, level + 1) for v in o]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0) + "\n"


def load_json(path) -> dict:
    """Read a JSON object from ``path``.

    Raises
    ------
    InvalidData
        If the file cannot be read or does not hold a JSON object.
    """
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidData(f"cannot read {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise InvalidData(f"{path}: expected a JSON object")
    return payload


def pairs(values) -> list:
    return [[float(np.real(v)), float(np.imag(v))] for v in np.atleast_1d(values)]


def poly_to_json(p: ComplexPoly) -> list:
    return pairs(p.coeffs)


def poly_from_json(raw, nominal_degree: int | None = None) -> ComplexPoly:
    coeffs = as_complex_vector(raw, "coefficients")
    if len(coeffs) == 0:
        raise InvalidData("empty coefficient array")
    return ComplexPoly(coeffs, nominal_degree)


def rational_to_json(f: RationalFn) -> dict:
    return {"num": poly_to_json(f.num), "den": poly_to_json(f.den)}


def parametrization_to_json(par: Parametrization) -> dict:
    return {
        "n": par.n,
        "tau": par.tau,
        "a": poly_to_json(par.a),
        "b": poly_to_json(par.b),
        "c": poly_to_json(par.c),
        "d": poly_to_json(par.d),
        "Z_tau": pairs(par.Z_tau) if par.Z_tau else [],
    }


def parametrization_from_json(raw: dict) -> Parametrization:
    try:
        n = int(raw["n"])
        polys = [poly_from_json(raw[name], n) for name in "abcd"]
        tau = complex(*raw["tau"])
        z_tau = tuple(as_complex_vector(raw.get("Z_tau", []), "Z_tau"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidData(f"malformed parametrization: {exc}") from exc
    return Parametrization(*polys, tau=tau, Z_tau=z_tau)


def center_to_json(c: CenterPoint) -> dict:
    return {
        "x1": c.x1c,
        "x2": c.x2c,
        "x3": c.x3c,
        "omega_angle": c.omega_angle,
        "residual": c.residual,
    }


def center_from_json(raw: dict) -> CenterPoint:
    try:
        return CenterPoint(
            complex(*raw["x1"]),
            complex(*raw["x2"]),
            complex(*raw["x3"]),
            float(raw["omega_angle"]),
            float(raw.get("residual", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidData(f"malformed center: {exc}") from exc


def node_to_json(node: RoyalNode) -> dict:
    return {
        "location": node.location,
        "eta": node.value_eta,
        "eta_tilde": node.value_eta_tilde,
        "multiplicity": node.multiplicity,
        "on_circle": node.on_circle,
    }


def tetra_to_json(x: TetraInnerFn) -> dict:
    """Three ``(num, den)`` pairs plus center, base point and parametrization."""
    return {
        "n": x.n,
        "degree": x.degree,
        "tau": x.par.tau,
        "x1": rational_to_json(x.x1),
        "x2": rational_to_json(x.x2),
        "x3": rational_to_json(x.x3),
        "center": center_to_json(x.center),
        "parametrization": parametrization_to_json(x.par),
    }


def tetra_from_json(raw: dict) -> TetraInnerFn:
    """Rebuild a ``TetraInnerFn``.

    The components are reassembled from the stored parametrization and
    center, then checked against the stored coefficient arrays.
    """
    if "parametrization" not in raw or "center" not in raw:
        raise InvalidData("serialized map needs 'parametrization' and 'center'")
    par = parametrization_from_json(raw["parametrization"])
    center = center_from_json(raw["center"])
    x = assemble(par, center)
    for name, f in zip(("x1", "x2", "x3"), x.components):
        if name not in raw:
            continue
        try:
            num = as_complex_vector(raw[name]["num"], f"{name}.num")
            den = as_complex_vector(raw[name]["den"], f"{name}.den")
        except (KeyError, TypeError) as exc:
            raise InvalidData(f"malformed component {name}") from exc
        if not (_close(num, f.num.coeffs) and _close(den, f.den.coeffs)):
            raise InvalidData(f"component {name} disagrees with parametrization and center")
    return x


def _close(stored: np.ndarray, rebuilt: np.ndarray) -> bool:
    m = max(len(stored), len(rebuilt))
    a, b = np.zeros(m, complex), np.zeros(m, complex)
    a[: len(stored)], b[: len(rebuilt)] = stored, rebuilt
    return bool(np.abs(a - b).max() <= 1e-9 * max(1.0, np.abs(b).max()))
