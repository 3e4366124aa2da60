"""JSON input schemas: complexes, flows, and descriptor lists.

Every file carries a schema_version; violations raise SchemaError with a
JSON-pointer path to the offending element, which the CLI turns into an
exit-2 diagnostic.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .complexes import PoincarePolynomial
from .conley import CriticalManifold, HyperbolicFixedPoint, PeriodicOrbit
from .flows import Chart, CocycleRep, PLBeta, StepBeta, load_model
from .twisted import LocalSystem, WeightedCWComplex

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    def __init__(self, pointer, message):
        self.pointer = pointer
        self.message = message
        super().__init__("%s: %s" % (pointer or "/", message))


def _require(cond, pointer, message):
    if not cond:
        raise SchemaError(pointer, message)


def _check_version(data, pointer=""):
    _require(isinstance(data, dict), pointer, "expected an object")
    version = data.get("schema_version")
    _require(
        version == SCHEMA_VERSION,
        pointer + "/schema_version",
        "unsupported schema_version %r (expected %d)" % (version, SCHEMA_VERSION),
    )


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# complexes
# ---------------------------------------------------------------------------


def parse_complex(data):
    """WeightedCWComplex plus optional LocalSystem from the complex schema."""
    _check_version(data)
    name = data.get("name", "complex")
    s = data.get("s", 0)
    _require(isinstance(s, int) and s >= 0, "/s", "s must be a nonnegative integer")
    raw_cells = data.get("cells")
    _require(isinstance(raw_cells, list) and raw_cells, "/cells", "cells required")
    max_dim = 0
    for i, cell in enumerate(raw_cells):
        ptr = "/cells/%d" % i
        _require(isinstance(cell, dict), ptr, "expected an object")
        _require(isinstance(cell.get("id"), str), ptr + "/id", "id must be a string")
        dim = cell.get("dim")
        _require(
            isinstance(dim, int) and dim >= 0, ptr + "/dim", "dim must be >= 0"
        )
        max_dim = max(max_dim, dim)
    cells = [[] for _ in range(max_dim + 1)]
    for cell in raw_cells:
        cells[cell["dim"]].append(cell["id"])

    boundary_terms = {}
    for i, entry in enumerate(data.get("boundary", [])):
        ptr = "/boundary/%d" % i
        _require(isinstance(entry, dict), ptr, "expected an object")
        of = entry.get("of")
        _require(isinstance(of, str), ptr + "/of", "of must be a cell id")
        terms = []
        for j, term in enumerate(entry.get("terms", [])):
            tptr = "%s/terms/%d" % (ptr, j)
            _require(isinstance(term, dict), tptr, "expected an object")
            target = term.get("cell")
            _require(isinstance(target, str), tptr + "/cell", "cell id required")
            coef = term.get("coef", 1)
            _require(isinstance(coef, int), tptr + "/coef", "coef must be an int")
            weight = term.get("weight", [0] * s)
            _require(
                isinstance(weight, list)
                and len(weight) == s
                and all(isinstance(w, int) for w in weight),
                tptr + "/weight",
                "weight must be a list of %d ints" % s,
            )
            terms.append((target, coef, tuple(weight)))
        boundary_terms[of] = terms

    local_system = None
    if "local_system" in data:
        ls = data["local_system"]
        ptr = "/local_system"
        _require(isinstance(ls, dict), ptr, "expected an object")
        k = ls.get("k")
        _require(isinstance(k, int) and k >= 1, ptr + "/k", "k must be >= 1")
        monodromy = {}
        for edge, mat in ls.get("monodromy", {}).items():
            mptr = "%s/monodromy/%s" % (ptr, edge)
            _require(
                isinstance(mat, list)
                and len(mat) == k
                and all(
                    isinstance(row, list)
                    and len(row) == k
                    and all(isinstance(v, int) for v in row)
                    for row in mat
                ),
                mptr,
                "expected a %dx%d integer matrix" % (k, k),
            )
            monodromy[edge] = mat
        words = {}
        for face, word in ls.get("attaching_words", {}).items():
            wptr = "%s/attaching_words/%s" % (ptr, face)
            _require(isinstance(word, list), wptr, "expected a list of edge ids")
            letters = []
            for j, letter in enumerate(word):
                _require(
                    isinstance(letter, str) and letter.lstrip("-"),
                    "%s/%d" % (wptr, j),
                    "expected an edge id, optionally prefixed with '-'",
                )
                if letter.startswith("-"):
                    letters.append((letter[1:], -1))
                else:
                    letters.append((letter, 1))
            words[face] = letters
        local_system = LocalSystem(k=k, monodromy=monodromy, attaching_words=words)

    try:
        X = WeightedCWComplex(
            name=name, s=s, cells=cells, boundary_terms=boundary_terms
        )
    except ValueError as exc:
        raise SchemaError("/boundary", str(exc))
    return X, local_system


def load_complex(path):
    return parse_complex(load_json(path))


# ---------------------------------------------------------------------------
# flows
# ---------------------------------------------------------------------------


def _parse_beta(data, pointer):
    _require(isinstance(data, dict), pointer, "expected an object")
    kind = data.get("type")
    factor = data.get("factor", 0)
    _require(isinstance(factor, int) and factor >= 0, pointer + "/factor", "bad factor")
    if kind == "step":
        breakpoints = data.get("breakpoints", [])
        values = data.get("values")
        _require(
            isinstance(values, list) and len(values) == len(breakpoints) + 1,
            pointer + "/values",
            "need one more value than breakpoints",
        )
        return StepBeta(
            factor=factor,
            breakpoints=[float(b) for b in breakpoints],
            values=[float(v) for v in values],
        )
    if kind == "pl":
        knots = data.get("knots")
        values = data.get("values")
        _require(
            isinstance(knots, list)
            and isinstance(values, list)
            and len(knots) == len(values)
            and len(knots) >= 2,
            pointer + "/knots",
            "need matching knots and values lists",
        )
        return PLBeta(
            factor=factor,
            knots=[float(k) for k in knots],
            knot_values=[float(v) for v in values],
        )
    raise SchemaError(pointer + "/type", "beta type must be 'step' or 'pl'")


def _parse_cocycle(data, dim, pointer):
    _require(isinstance(data, dict), pointer, "expected an object")
    charts = []
    raw_charts = data.get("charts")
    _require(isinstance(raw_charts, list) and raw_charts, pointer + "/charts", "charts required")
    for i, chart in enumerate(raw_charts):
        cptr = "%s/charts/%d" % (pointer, i)
        _require(isinstance(chart, dict), cptr, "expected an object")
        region = chart.get("region")
        _require(
            isinstance(region, list) and len(region) == dim,
            cptr + "/region",
            "region must list %d factors" % dim,
        )
        arcs = []
        for j, arc in enumerate(region):
            if arc is None:
                arcs.append(None)
                continue
            _require(
                isinstance(arc, list) and len(arc) == 2,
                "%s/region/%d" % (cptr, j),
                "arc must be [lo, hi] or null",
            )
            arcs.append((float(arc[0]), float(arc[1])))
        beta = _parse_beta(chart.get("beta"), cptr + "/beta")
        charts.append(Chart(region=tuple(arcs), beta=beta))
    bound = data.get("bound")
    _require(
        isinstance(bound, (int, float)) and bound >= 0,
        pointer + "/bound",
        "bound must be a nonnegative number",
    )
    return CocycleRep(
        name=data.get("name", "cocycle"),
        dim=dim,
        charts=charts,
        bound=float(bound),
        loop_value=float(data.get("loop_value", 0.0)),
        max_step=float(data.get("max_step", 0.0)),
    )


def parse_flow(data):
    """A ModelBundle from the flow schema; the cocycle block, when present,
    replaces the registry default."""
    _check_version(data)
    model_name = data.get("model")
    _require(isinstance(model_name, str), "/model", "registry model name required")
    params = data.get("params", {})
    _require(isinstance(params, dict), "/params", "expected an object")
    kwargs = {}
    for key, value in params.items():
        if key == "omega":
            _require(
                isinstance(value, list) and value,
                "/params/omega",
                "omega must be a nonempty list",
            )
            kwargs["omega"] = tuple(float(v) for v in value)
        elif key in ("dim", "n_knots"):
            _require(isinstance(value, int), "/params/" + key, "must be an int")
            kwargs[key] = value
        elif key == "epsilon":
            kwargs["epsilon"] = float(value)
        else:
            raise SchemaError("/params/" + key, "unknown model parameter")
    try:
        bundle = load_model(model_name, **kwargs)
    except (ValueError, TypeError) as exc:
        raise SchemaError("/model", str(exc))
    if "cocycle" in data:
        rep = _parse_cocycle(data["cocycle"], bundle.model.dim, "/cocycle")
        bundle.cocycles = [rep]
    return bundle


def load_flow(path):
    return parse_flow(load_json(path))


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------


def parse_descriptors(data):
    _check_version(data)
    raw = data.get("descriptors")
    _require(isinstance(raw, list), "/descriptors", "descriptor list required")
    out = []
    for i, d in enumerate(raw):
        ptr = "/descriptors/%d" % i
        _require(isinstance(d, dict), ptr, "expected an object")
        kind = d.get("kind")
        index = d.get("index")
        _require(
            isinstance(index, int) and index >= 0, ptr + "/index", "index must be >= 0"
        )
        if kind == "fixed_point":
            out.append(HyperbolicFixedPoint(index))
        elif kind == "periodic_orbit":
            orientable = d.get("orientable", True)
            _require(
                isinstance(orientable, bool), ptr + "/orientable", "must be a bool"
            )
            out.append(PeriodicOrbit(index, orientable=orientable))
        elif kind == "critical_manifold":
            poincare = d.get("poincare")
            _require(
                isinstance(poincare, list)
                and all(isinstance(c, int) and c >= 0 for c in poincare),
                ptr + "/poincare",
                "poincare must be a list of nonnegative ints",
            )
            out.append(
                CriticalManifold(
                    index,
                    PoincarePolynomial(poincare),
                    label=d.get("label", ""),
                )
            )
        else:
            raise SchemaError(
                ptr + "/kind",
                "kind must be fixed_point, periodic_orbit, or critical_manifold",
            )
    return out


def load_descriptors(path):
    return parse_descriptors(load_json(path))


def parse_point(text, s):
    """A length-s tuple of nonzero rationals from '2' or '2,3/5' syntax.

    Rank-0 complexes have no evaluation coordinates; any text maps to ().
    """
    if s == 0:
        return ()
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if len(parts) != s:
        raise SchemaError(
            "/a", "point must have %d coordinates, got %d" % (s, len(parts))
        )
    out = []
    for part in parts:
        try:
            value = Fraction(part)
        except (ValueError, ZeroDivisionError):
            raise SchemaError("/a", "bad rational %r" % part)
        if value == 0:
            raise SchemaError("/a", "coordinates must be nonzero")
        out.append(value)
    return tuple(out)


def parse_counts(text):
    try:
        return [int(p.strip()) for p in str(text).split(",") if p.strip()]
    except ValueError:
        raise SchemaError("/counts", "expected comma-separated integers")
