"""Scenario files: a JSON document with a ``kind`` and a kind-specific payload.

Grammar (all keys lower case; numbers are JSON numbers, or the strings
``"inf"``/``"+inf"`` for +infinity where extended reals are allowed)::

    common finite-space fields
      labels      [str, ...]                 distinct point names
      distance    [[num, ...], ...]          row-major, row = first argument
      objective   {label: num | "inf"}       one entry per label
      x0          label
      budget      {"max_steps": int, "length_threshold": num}   optional

    kind            extra fields
    orbit           map {label: [label, ...]}, idempotent (bool, optional)
    ekeland         objective, eps
    ekeland-metric  objective, lambda
    caristi         objective, map
    takahashi       objective
    oettli-thera    p (table, "inf" allowed), psi [label, ...]
    fabian-preiss   pseudometrics [table, ...], objectives [{label: num}], i0
    check-space     (labels and distance only)
    counterexample  sequence, eps (default 0.5); no labels/distance
    gdelta-minimize host, closed_sets, grid, objective [num per grid point],
                    eps, depth (default 32), x0 (grid index, default 0)
    series-check    terms, horizon, threshold

``sequence`` is ``{"values": [...]}`` or ``{"geometric": {"scale": s,
"ratio": r}, "horizon": N}`` and is measured with the absolute difference.
``terms`` is a list, ``{"constant": c}`` or ``{"geometric": {"scale": s,
"ratio": r}}``. ``host`` is ``{"type": "interval", "bounds": [a, b]}`` or
``{"type": "box", "lower": [...], "upper": [...]}`` with the Euclidean metric.
Each closed set is ``{"points": [...]}`` or ``{"interval_complement": [lo, hi]}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .gdelta import GDeltaDomain, distance_to_interval_complement, distance_to_points, euclidean
from .orbit_engine import OrbitBudget
from .principles import CaristiInstance, FabianPreissInstance, OettliInstance
from .semicomplete import CounterexampleKit, SequenceSpec
from .spaces import FiniteSpace, ObjectiveTable

KINDS = (
    "orbit",
    "ekeland",
    "ekeland-metric",
    "caristi",
    "takahashi",
    "oettli-thera",
    "fabian-preiss",
    "counterexample",
    "gdelta-minimize",
    "check-space",
    "series-check",
)

_SPACE_KINDS = {"orbit", "ekeland", "ekeland-metric", "caristi", "takahashi", "oettli-thera", "fabian-preiss", "check-space"}
_REQUIRED = {
    "orbit": ("map", "x0"),
    "ekeland": ("objective", "eps", "x0"),
    "ekeland-metric": ("objective", "lambda", "x0"),
    "caristi": ("objective", "map", "x0"),
    "takahashi": ("objective", "x0"),
    "oettli-thera": ("p", "psi", "x0"),
    "fabian-preiss": ("pseudometrics", "objectives", "i0", "x0"),
    "check-space": (),
    "counterexample": ("sequence",),
    "gdelta-minimize": ("host", "closed_sets", "grid", "objective", "eps"),
    "series-check": ("terms", "horizon", "threshold"),
}


class ScenarioError(ValueError):
    """Malformed scenario; the message names the offending field."""


def _num(value, where: str, *, ext: bool = False) -> float:
    if isinstance(value, str) and ext and value.strip().lower() in ("inf", "+inf"):
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    v = float(value)
    if math.isnan(v) or (math.isinf(v) and not (ext and v > 0)):
        raise ScenarioError(f"{where}: value {value!r} is not allowed here")
    return v


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{where}: expected an integer, got {value!r}")
    return value


def _table(rows, where: str, n: int, *, ext: bool = False) -> list[list[float]]:
    if not isinstance(rows, list) or len(rows) != n:
        raise ScenarioError(f"{where}: expected {n} rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ScenarioError(f"{where}[{i}]: expected {n} entries")
        out.append([_num(v, f"{where}[{i}][{j}]", ext=ext) for j, v in enumerate(row)])
    return out


def _check_distance(table, labels, where: str) -> None:
    for i, row in enumerate(table):
        for j, v in enumerate(row):
            pair = f"{where}[{i}][{j}] ({labels[i]} -> {labels[j]})"
            if v < 0:
                raise ScenarioError(f"{pair} is negative: {v!r}")
            if i == j and v != 0:
                raise ScenarioError(f"{pair} is a nonzero diagonal entry: {v!r}")
            if i != j and v == 0:
                raise ScenarioError(f"{pair} is zero between distinct points")


class _Labels:
    def __init__(self, labels):
        self.labels = labels
        self.missing: list[str] = []

    def __call__(self, label, where: str) -> str:
        if not isinstance(label, str) or label not in self.labels:
            self.missing.append(f"{where}={label!r}")
        return label

    def check(self) -> None:
        if self.missing:
            raise ScenarioError("unresolved labels: " + ", ".join(self.missing))


def _objective_map(obj, labels, where: str) -> dict[str, float]:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected a label -> value mapping")
    extra = [k for k in obj if k not in labels]
    if extra:
        raise ScenarioError(f"{where}: unresolved labels {extra}")
    missing = [k for k in labels if k not in obj]
    if missing:
        raise ScenarioError(f"{where}: no value for {missing}")
    return {k: _num(obj[k], f"{where}.{k}", ext=True) for k in labels}


def _closed_form(form, where: str) -> dict:
    if isinstance(form, list):
        return {"values": [_num(v, f"{where}[{i}]") for i, v in enumerate(form)]}
    if not isinstance(form, dict):
        raise ScenarioError(f"{where}: expected a list or an object")
    if "values" in form:
        vals = form["values"]
        if not isinstance(vals, list) or len(vals) < 2:
            raise ScenarioError(f"{where}.values: expected at least two numbers")
        return {"values": [_num(v, f"{where}.values[{i}]") for i, v in enumerate(vals)]}
    if "constant" in form:
        return {"constant": _num(form["constant"], f"{where}.constant")}
    if "geometric" in form:
        geo = form["geometric"]
        if not isinstance(geo, dict):
            raise ScenarioError(f"{where}.geometric: expected an object")
        out = {
            "geometric": {
                "scale": _num(geo.get("scale", 1.0), f"{where}.geometric.scale"),
                "ratio": _num(geo.get("ratio"), f"{where}.geometric.ratio"),
            }
        }
        if "horizon" in form:
            out["horizon"] = _int(form["horizon"], f"{where}.horizon")
        return out
    raise ScenarioError(f"{where}: unknown form, expected values, constant or geometric")


def closed_form_term(form: dict):
    """Callable ``k -> term`` for a normalized closed-form descriptor."""
    if "values" in form:
        return form["values"].__getitem__
    if "constant" in form:
        c = form["constant"]
        return lambda k: c
    scale, ratio = form["geometric"]["scale"], form["geometric"]["ratio"]
    return lambda k: scale * ratio**k


@dataclass(frozen=True)
class Scenario:
    kind: str
    payload: dict

    # ---- typed views -------------------------------------------------

    def space(self) -> FiniteSpace:
        return FiniteSpace.from_table(self.payload["labels"], self.payload["distance"])

    def idx(self, label: str) -> int:
        return self.payload["labels"].index(label)

    def objective(self, key: str = "objective") -> ObjectiveTable:
        obj = self.payload[key]
        return ObjectiveTable(tuple(obj[k] for k in self.payload["labels"]))

    def map_rows(self) -> list[list[int]]:
        m = self.payload["map"]
        return [[self.idx(y) for y in m.get(x, [])] for x in self.payload["labels"]]

    def budget(self, steps: int | None = None, length: float | None = None) -> OrbitBudget | None:
        b = dict(self.payload.get("budget", {}))
        if steps is not None:
            b["max_steps"] = steps
        if length is not None:
            b["length_threshold"] = length
        return OrbitBudget(**b) if b else None

    def caristi(self) -> CaristiInstance:
        return CaristiInstance(tuple(map(tuple, self.map_rows())), self.objective(), self.space().dist)

    def oettli(self) -> OettliInstance:
        psi = frozenset(self.idx(x) for x in self.payload["psi"])
        return OettliInstance(self.payload["p"], self.space().dist, self.idx(self.payload["x0"]), psi)

    def fabian_preiss(self) -> FabianPreissInstance:
        labels = self.payload["labels"]
        objectives = [ObjectiveTable(tuple(o[k] for k in labels)) for o in self.payload["objectives"]]
        return FabianPreissInstance(
            tuple(self.payload["pseudometrics"]),
            tuple(objectives),
            self.payload["i0"],
            self.idx(self.payload["x0"]),
            metric=self.space().dist,
        )

    def sequence(self) -> SequenceSpec:
        form = self.payload["sequence"]
        if "values" in form:
            return SequenceSpec.from_values(form["values"])
        if "horizon" not in form:
            raise ScenarioError("sequence: a closed-form sequence needs a horizon")
        return SequenceSpec(closed_form_term(form), form["horizon"])

    def gdelta_domain(self) -> GDeltaDomain:
        sets = []
        for cs in self.payload["closed_sets"]:
            if "points" in cs:
                sets.append(distance_to_points(cs["points"]))
            else:
                lo, hi = cs["interval_complement"]
                sets.append(distance_to_interval_complement(lo, hi))
        return GDeltaDomain(euclidean, sets, self.payload.get("depth", 32))


def _point(value, where: str, dim: int | None):
    if dim is None:
        return _num(value, where)
    if not isinstance(value, list) or len(value) != dim:
        raise ScenarioError(f"{where}: expected a point with {dim} coordinates")
    return [_num(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _normalize(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ScenarioError(f"kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    required = _REQUIRED[kind] + (("labels", "distance") if kind in _SPACE_KINDS else ())
    missing = [k for k in required if k not in doc]
    if missing:
        raise ScenarioError(f"missing required field(s) for kind {kind!r}: {', '.join(missing)}")
    p: dict[str, Any] = {}

    if kind in _SPACE_KINDS:
        labels = doc["labels"]
        if not isinstance(labels, list) or not labels or not all(isinstance(s, str) for s in labels):
            raise ScenarioError("labels: expected a nonempty list of strings")
        if len(set(labels)) != len(labels):
            raise ScenarioError("labels: names must be distinct")
        n = len(labels)
        p["labels"] = list(labels)
        p["distance"] = _table(doc["distance"], "distance", n)
        _check_distance(p["distance"], labels, "distance")
        resolve = _Labels(labels)
        if "x0" in doc:
            p["x0"] = resolve(doc["x0"], "x0")
        if "objective" in doc:
            p["objective"] = _objective_map(doc["objective"], labels, "objective")
        if "map" in doc:
            m = doc["map"]
            if not isinstance(m, dict):
                raise ScenarioError("map: expected a label -> [label] mapping")
            p["map"] = {}
            for x, ys in m.items():
                resolve(x, "map key")
                if not isinstance(ys, list):
                    raise ScenarioError(f"map.{x}: expected a list of labels")
                p["map"][x] = [resolve(y, f"map.{x}[{i}]") for i, y in enumerate(ys)]
        if "p" in doc:
            p["p"] = _table(doc["p"], "p", n, ext=True)
        if "psi" in doc:
            if not isinstance(doc["psi"], list):
                raise ScenarioError("psi: expected a list of labels")
            p["psi"] = [resolve(x, f"psi[{i}]") for i, x in enumerate(doc["psi"])]
        if "pseudometrics" in doc:
            pms = doc["pseudometrics"]
            if not isinstance(pms, list) or not pms:
                raise ScenarioError("pseudometrics: expected a nonempty list of tables")
            p["pseudometrics"] = [_table(t, f"pseudometrics[{i}]", n) for i, t in enumerate(pms)]
        if "objectives" in doc:
            objs = doc["objectives"]
            if not isinstance(objs, list):
                raise ScenarioError("objectives: expected a list")
            p["objectives"] = [_objective_map(o, labels, f"objectives[{i}]") for i, o in enumerate(objs)]
        if "i0" in doc:
            p["i0"] = _int(doc["i0"], "i0")
        if "idempotent" in doc:
            if not isinstance(doc["idempotent"], bool):
                raise ScenarioError("idempotent: expected true or false")
            p["idempotent"] = doc["idempotent"]
        resolve.check()

    for key in ("eps", "lambda", "threshold"):
        if key in doc:
            p[key] = _num(doc[key], key)
            if not p[key] > 0:
                raise ScenarioError(f"{key}: must be positive, got {doc[key]!r}")
    if "horizon" in doc:
        p["horizon"] = _int(doc["horizon"], "horizon")
        if p["horizon"] < 1:
            raise ScenarioError("horizon: must be at least 1")
    if "budget" in doc:
        b = doc["budget"]
        if not isinstance(b, dict) or set(b) - {"max_steps", "length_threshold"}:
            raise ScenarioError("budget: expected an object with max_steps and/or length_threshold")
        p["budget"] = {}
        if "max_steps" in b:
            p["budget"]["max_steps"] = _int(b["max_steps"], "budget.max_steps")
        if "length_threshold" in b:
            p["budget"]["length_threshold"] = _num(b["length_threshold"], "budget.length_threshold", ext=True)
        try:
            OrbitBudget(**p["budget"])
        except ValueError as exc:
            raise ScenarioError(f"budget: {exc}") from None

    if kind == "counterexample":
        p["sequence"] = _closed_form(doc["sequence"], "sequence")
        if "values" not in p["sequence"] and "horizon" not in p["sequence"]:
            raise ScenarioError("sequence: a closed-form sequence needs a horizon")
    if kind == "series-check":
        p["terms"] = _closed_form(doc["terms"], "terms")
    if kind == "gdelta-minimize":
        host = doc["host"]
        if not isinstance(host, dict) or host.get("type") not in ("interval", "box"):
            raise ScenarioError("host: expected {type: interval|box, ...}")
        if host["type"] == "interval":
            bounds = host.get("bounds")
            if not isinstance(bounds, list) or len(bounds) != 2:
                raise ScenarioError("host.bounds: expected [a, b]")
            p["host"] = {"type": "interval", "bounds": [_num(v, f"host.bounds[{i}]") for i, v in enumerate(bounds)]}
            dim = None
        else:
            lo, hi = host.get("lower"), host.get("upper")
            if not isinstance(lo, list) or not isinstance(hi, list) or len(lo) != len(hi) or not lo:
                raise ScenarioError("host: box needs lower and upper of equal length")
            p["host"] = {
                "type": "box",
                "lower": [_num(v, f"host.lower[{i}]") for i, v in enumerate(lo)],
                "upper": [_num(v, f"host.upper[{i}]") for i, v in enumerate(hi)],
            }
            dim = len(lo)
        sets = doc["closed_sets"]
        if not isinstance(sets, list):
            raise ScenarioError("closed_sets: expected a list")
        p["closed_sets"] = []
        for i, cs in enumerate(sets):
            where = f"closed_sets[{i}]"
            if isinstance(cs, dict) and "points" in cs and isinstance(cs["points"], list) and cs["points"]:
                p["closed_sets"].append(
                    {"points": [_point(v, f"{where}.points[{j}]", dim) for j, v in enumerate(cs["points"])]}
                )
            elif isinstance(cs, dict) and "interval_complement" in cs and dim is None:
                lohi = cs["interval_complement"]
                if not isinstance(lohi, list) or len(lohi) != 2:
                    raise ScenarioError(f"{where}.interval_complement: expected [lo, hi]")
                p["closed_sets"].append({"interval_complement": [_num(v, f"{where}.interval_complement[{j}]") for j, v in enumerate(lohi)]})
            else:
                raise ScenarioError(f"{where}: expected {{points: [...]}} or, on an interval host, {{interval_complement: [lo, hi]}}")
        grid = doc["grid"]
        if not isinstance(grid, list) or not grid:
            raise ScenarioError("grid: expected a nonempty list of points")
        p["grid"] = [_point(v, f"grid[{i}]", dim) for i, v in enumerate(grid)]
        obj = doc["objective"]
        if not isinstance(obj, list) or len(obj) != len(grid):
            raise ScenarioError("objective: expected one value per grid point")
        p["objective"] = [_num(v, f"objective[{i}]", ext=True) for i, v in enumerate(obj)]
        if "depth" in doc:
            p["depth"] = _int(doc["depth"], "depth")
            if p["depth"] < 1:
                raise ScenarioError("depth: must be at least 1")
        p["x0"] = _int(doc.get("x0", 0), "x0")
        if not 0 <= p["x0"] < len(grid):
            raise ScenarioError(f"x0: grid index {p['x0']} out of range")
    unknown = set(doc) - set(p) - {"kind"}
    if unknown:
        raise ScenarioError(f"unknown field(s) for kind {kind!r}: {', '.join(sorted(unknown))}")
    return Scenario(kind, p)


def parse(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return _normalize(doc)


def load(path: str | Path) -> Scenario:
    return parse(Path(path).read_text())


def plain(value):
    """JSON-safe copy: +inf becomes the string ``"inf"``, tuples become lists."""
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {k: plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


def serialize(scenario: Scenario) -> dict:
    return {"kind": scenario.kind, **plain(scenario.payload)}


def dumps(scenario: Scenario) -> str:
    return json.dumps(serialize(scenario), indent=2, sort_keys=True) + "\n"


def kit_to_scenario(kit: CounterexampleKit, kind: str = "caristi") -> Scenario:
    """Finite scenario on the kit's prefix, for running the solvers against it.

    The map sends ``x_n`` to ``x_{n+1}`` and ``x_N`` nowhere, so a Caristi
    run reports the hypothesis failure at the prefix boundary.
    """
    labels = [f"x{n}" for n in range(1, kit.horizon + 1)]
    doc = {
        "kind": kind,
        "labels": labels,
        "distance": [[kit.g(a, b) if a != b else 0.0 for b in kit.M] for a in kit.M],
        "objective": dict(zip(labels, kit.f_values)),
        "x0": labels[0],
    }
    if kind == "caristi":
        doc["map"] = {labels[i]: ([labels[i + 1]] if i + 1 < len(labels) else []) for i in range(len(labels))}
    elif kind == "ekeland":
        doc["eps"] = 0.5
    elif kind != "takahashi":
        raise ValueError(f"cannot export a kit as kind {kind!r}")
    return _normalize(doc)


# ---- worked examples ----------------------------------------------------

LINE = {"labels": ["0", "1", "2"], "distance": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}
_DOWN = {"0": 2, "1": 1, "2": 0}


SEEDS: dict[str, dict] = {
    "orbit-chain": {"kind": "orbit", **LINE, "map": {"0": ["1"], "1": ["2"], "2": []}, "x0": "0"},
    "orbit-argmax": {"kind": "orbit", **LINE, "map": {"0": ["1", "2"], "1": ["2"], "2": []}, "x0": "0"},
    "orbit-two-cycle": {
        "kind": "orbit",
        "labels": ["0", "1"],
        "distance": [[0, 1], [1, 0]],
        "map": {"0": ["1"], "1": ["0"]},
        "x0": "0",
        "budget": {"max_steps": 10},
    },
    "ekeland-asymmetric": {
        "kind": "ekeland",
        "labels": ["a", "b"],
        "distance": [[0, 1], [3, 0]],
        "objective": {"a": 1, "b": 0},
        "eps": 1,
        "x0": "a",
    },
    "ekeland-line": {"kind": "ekeland", **LINE, "objective": _DOWN, "eps": 0.5, "x0": "0"},
    "ekeland-metric-line": {"kind": "ekeland-metric", **LINE, "objective": _DOWN, "lambda": 0.5, "x0": "0"},
    "ekeland-metric-increasing": {
        "kind": "ekeland-metric",
        **LINE,
        "objective": {"0": 0, "1": 1, "2": 2},
        "lambda": 0.5,
        "x0": "0",
    },
    "caristi-line": {
        "kind": "caristi",
        **LINE,
        "objective": _DOWN,
        "map": {"0": ["1"], "1": ["2"], "2": ["2"]},
        "x0": "0",
    },
    "caristi-two-point": {
        "kind": "caristi",
        "labels": ["a", "b"],
        "distance": [[0, 1], [1, 0]],
        "objective": {"a": 1, "b": 0},
        "map": {"a": ["b"], "b": ["b"]},
        "x0": "a",
    },
    "takahashi-line": {"kind": "takahashi", **LINE, "objective": _DOWN, "x0": "0"},
    "takahashi-fails": {
        "kind": "takahashi",
        "labels": ["a", "b"],
        "distance": [[0, 5], [5, 0]],
        "objective": {"a": 1, "b": 0},
        "x0": "a",
    },
    "oettli-thera-line": {
        "kind": "oettli-thera",
        **LINE,
        "p": [[0, -1, -2], [1, 0, -1], [2, 1, 0]],
        "psi": ["2"],
        "x0": "0",
    },
    "fabian-preiss-line": {
        "kind": "fabian-preiss",
        **LINE,
        "pseudometrics": [LINE["distance"]],
        "objectives": [_DOWN],
        "i0": 0,
        "x0": "0",
    },
    "counterexample-geometric": {
        "kind": "counterexample",
        "sequence": {"geometric": {"scale": 1, "ratio": 0.5}, "horizon": 40},
        "eps": 0.5,
    },
    "gdelta-minimize": {
        "kind": "gdelta-minimize",
        "host": {"type": "interval", "bounds": [0, 1]},
        "closed_sets": [{"points": [0.5]}],
        "grid": [0.1, 0.2, 0.3, 0.4],
        "objective": [0.1, 0.2, 0.3, 0.4],
        "eps": 1,
    },
    "check-space-quasi": {"kind": "check-space", "labels": ["a", "b"], "distance": [[0, 1], [3, 0]]},
    "series-check-constant": {"kind": "series-check", "terms": {"constant": 1}, "horizon": 100, "threshold": 10},
    "series-check-geometric": {
        "kind": "series-check",
        "terms": {"geometric": {"scale": 1, "ratio": 0.5}},
        "horizon": 50,
        "threshold": 10,
    },
}


def seed_scenarios(directory: str | Path) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, doc in SEEDS.items():
        path = out / f"{name}.json"
        path.write_text(dumps(_normalize(doc)))
        written.append(path)
    return written
