"""Reading construction spec files.

Spec files are YAML documents whose first key is ``bitriple_spec: 1``.  The
grammar is described in ``docs/spec-format.md``.  Classes are written in the
curve vocabulary of :func:`bitriple.picard.parse_class`.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from bitriple.constructions import ConstructionSpec, Expected, SpecError, TableRow, TriplePoint
from bitriple.cover import CHARACTER_ORDER, Component, SpecialPoint, tag
from bitriple.linsys import DEFAULT_PRIME
from bitriple.picard import BlowupSurface, DivisorClass, LatticeError, parse_class

SCHEMA_VERSION = 1

_TOP = {"bitriple_spec", "name", "surface", "branch", "L", "special_points", "triple_points", "analysis", "expected", "notes"}
_SURFACE = {"points", "collinear", "infinitely_near"}
_INF = {"point", "parent", "toward"}
_BRANCH = {"class", "curves", "pencil"}
_SPECIAL = {"name", "components", "local"}
_TRIPLE = {"name", "components", "case"}
_ANALYSIS = {"subgroup", "trials", "prime", "seed", "pullback"}
_EXPECTED = {"row", "census"}
_ROW = {"K2", "pg", "q", "deg_sigma", "base_points"}


class SpecFileError(ValueError):
    """Unreadable, malformed or inconsistent spec file."""


@dataclass(frozen=True)
class SpecFile:
    """A parsed file; ``construction`` is ``None`` for surface-only files."""

    path: str
    version: int
    name: str
    surface: BlowupSurface
    construction: ConstructionSpec | None

    def symbols(self) -> dict[str, DivisorClass]:
        if self.construction is None:
            return {}
        return {f"L{tag(chi)}": c for chi, c in self.construction.L.items()}


def _keys(obj: Any, allowed: set[str], where: str, required: tuple[str, ...] = ()) -> Mapping:
    if not isinstance(obj, Mapping):
        raise SpecFileError(f"{where}: expected a mapping, got {type(obj).__name__}")
    unknown = [str(k) for k in obj if str(k) not in allowed]
    if unknown:
        raise SpecFileError(f"{where}: unknown key(s) {', '.join(unknown)}")
    for k in required:
        if k not in obj:
            raise SpecFileError(f"{where}: missing key {k!r}")
    return obj


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecFileError(f"{where}: expected an integer, got {value!r}")
    return value


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise SpecFileError(f"{where}: expected a list, got {type(value).__name__}")
    return value


def _index(key: Any, prefix: str, where: str):
    text = str(key)
    if not text.startswith(prefix) or len(text) != len(prefix) + 2 or not text[len(prefix):].isdigit():
        raise SpecFileError(f"{where}: expected a key like {prefix}01, got {text!r}")
    elem = (int(text[-2]), int(text[-1]))
    if elem[0] > 2 or elem[1] > 2 or elem == (0, 0):
        raise SpecFileError(f"{where}: {text!r} is not a nontrivial element of Z3^2")
    return elem


def _surface(obj: Any) -> BlowupSurface:
    obj = _keys(obj, _SURFACE, "surface", ("points",))
    n = _int(obj["points"], "surface.points")
    if n < 0:
        raise SpecFileError("surface.points: must be nonnegative")
    collinear = [
        [_int(p, f"surface.collinear[{i}]") for p in _list(g, f"surface.collinear[{i}]")]
        for i, g in enumerate(_list(obj.get("collinear", []), "surface.collinear"))
    ]
    near = {}
    for i, rec in enumerate(_list(obj.get("infinitely_near", []), "surface.infinitely_near")):
        where = f"surface.infinitely_near[{i}]"
        rec = _keys(rec, _INF, where, ("point", "parent"))
        toward = rec.get("toward")
        near[_int(rec["point"], where + ".point")] = (
            _int(rec["parent"], where + ".parent"),
            None if toward is None else _int(toward, where + ".toward"),
        )
    for q in near:
        if not 1 <= q <= n:
            raise SpecFileError(f"surface.infinitely_near: point {q} is not among 1..{n}")
    try:
        return BlowupSurface.plane(n, collinear, near)
    except LatticeError as exc:
        raise SpecFileError(f"surface: {exc}") from exc


def _class(expr: Any, surface: BlowupSurface, where: str) -> DivisorClass:
    if isinstance(expr, int) and not isinstance(expr, bool):
        expr = str(expr)
    if not isinstance(expr, str):
        raise SpecFileError(f"{where}: expected a class expression, got {expr!r}")
    try:
        return parse_class(expr, surface)
    except LatticeError as exc:
        raise SpecFileError(f"{where}: {exc}") from exc


def _branch(obj: Any, surface: BlowupSurface) -> dict:
    if not isinstance(obj, Mapping):
        raise SpecFileError("branch: expected a mapping of D<ij> entries")
    branch = {}
    counters: dict[int, int] = {}
    for key, entry in obj.items():
        where = f"branch.{key}"
        sigma = _index(key, "D", "branch")
        entry = _keys(entry if entry is not None else {}, _BRANCH, where)
        comps = []
        for name in _list(entry.get("curves", []), where + ".curves"):
            comps.append(Component(str(name), _class(str(name), surface, f"{where}.curves")))
        pencil = entry.get("pencil", {}) or {}
        if not isinstance(pencil, Mapping):
            raise SpecFileError(f"{where}.pencil: expected a mapping like {{f2: 3}}")
        for fname, count in pencil.items():
            fname = str(fname)
            if not (fname.startswith("f") and fname[1:].isdigit()):
                raise SpecFileError(f"{where}.pencil: {fname!r} is not a pencil f<i>")
            p = int(fname[1:])
            cls = _class(fname, surface, f"{where}.pencil")
            for _ in range(_int(count, f"{where}.pencil.{fname}")):
                counters[p] = counters.get(p, 0) + 1
                comps.append(Component(f"f{p}{counters[p]}", cls))
        if "class" in entry:
            stated = _class(entry["class"], surface, f"{where}.class")
            total = DivisorClass.zero(surface.n)
            for c in comps:
                total = total + c.cls
            if total != stated:
                raise SpecFileError(
                    f"{where}: lattice inconsistency, components sum to {total} but class is {stated}"
                )
        branch[sigma] = tuple(comps)
    return branch


def _points(obj: Any, allowed: set[str], where: str) -> list[Mapping]:
    out = []
    for i, rec in enumerate(_list(obj, where)):
        rec = _keys(rec, allowed, f"{where}[{i}]", ("name", "components"))
        out.append(rec)
    return out


def _expected(obj: Any) -> Expected:
    obj = _keys(obj, _EXPECTED, "expected", ("row",))
    row = _keys(obj["row"], _ROW, "expected.row", tuple(sorted(_ROW)))
    values = {k: (None if row[k] is None else _int(row[k], f"expected.row.{k}")) for k in _ROW}
    census = None
    if obj.get("census") is not None:
        c = _keys(obj["census"], {"n", "m"}, "expected.census", ("n", "m"))
        census = (_int(c["n"], "expected.census.n"), _int(c["m"], "expected.census.m"))
    try:
        return Expected(TableRow(**values), census)
    except SpecError as exc:
        raise SpecFileError(f"expected: {exc}") from exc


def load_spec_text(text: str, path: str = "<string>") -> SpecFile:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else "unknown position"
        raise SpecFileError(f"{path}: syntax error at {where}: {getattr(exc, 'problem', exc)}") from exc
    if not isinstance(doc, Mapping):
        raise SpecFileError(f"{path}: a spec file is a mapping starting with 'bitriple_spec: {SCHEMA_VERSION}'")
    doc = _keys(doc, _TOP, "spec", ("bitriple_spec", "name", "surface"))
    version = doc["bitriple_spec"]
    if version != SCHEMA_VERSION:
        raise SpecFileError(f"unsupported spec version {version!r} (this reader handles {SCHEMA_VERSION})")
    name = str(doc["name"])
    surface = _surface(doc["surface"])
    if "branch" not in doc and "L" not in doc:
        for key in ("special_points", "triple_points", "analysis", "expected"):
            if key in doc:
                raise SpecFileError(f"{key}: only allowed together with branch and L")
        return SpecFile(path, version, name, surface, None)
    if "branch" not in doc or "L" not in doc:
        raise SpecFileError("branch and L must be given together")
    branch = _branch(doc["branch"], surface)
    if not isinstance(doc["L"], Mapping):
        raise SpecFileError("L: expected a mapping of L<ij> entries")
    L = {_index(k, "L", "L"): _class(v, surface, f"L.{k}") for k, v in doc["L"].items()}
    missing = [f"L{tag(c)}" for c in CHARACTER_ORDER if c not in L]
    if missing:
        raise SpecFileError(f"L: missing {', '.join(missing)}")
    specials = tuple(
        SpecialPoint(
            str(r["name"]),
            tuple(str(c) for c in _list(r["components"], "special_points.components")),
            _int(r.get("local", 1), "special_points.local"),
        )
        for r in _points(doc.get("special_points", []), _SPECIAL, "special_points")
    )
    triples = []
    for r in _points(doc.get("triple_points", []), _TRIPLE, "triple_points"):
        comps = tuple(str(c) for c in _list(r["components"], "triple_points.components"))
        triples.append(TriplePoint(str(r["name"]), comps, str(r.get("case", ""))))
    analysis = _keys(doc.get("analysis", {}) or {}, _ANALYSIS, "analysis")
    subgroup = (1, 0)
    if "subgroup" in analysis:
        raw = str(analysis["subgroup"])
        subgroup = _index("G" + raw.zfill(2), "G", "analysis.subgroup")
    pullback = None
    if analysis.get("pullback") is not None:
        pullback = _class(analysis["pullback"], surface, "analysis.pullback")
    expected = _expected(doc["expected"]) if doc.get("expected") is not None else None
    notes = tuple(str(x) for x in _list(doc.get("notes", []), "notes"))
    try:
        spec = ConstructionSpec(
            name=name,
            surface=surface,
            branch=branch,
            L=L,
            special_points=specials,
            triple_points=tuple(triples),
            subgroup=subgroup,
            pullback=pullback,
            trials=_int(analysis.get("trials", 5), "analysis.trials"),
            prime=_int(analysis.get("prime", DEFAULT_PRIME), "analysis.prime"),
            seed=_int(analysis.get("seed", 0), "analysis.seed"),
            expected=expected,
            notes=notes,
        )
    except SpecError as exc:
        raise SpecFileError(str(exc)) from exc
    return SpecFile(path, version, name, surface, spec)


def load_spec_file(path: str | Path) -> SpecFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise SpecFileError(f"cannot read {path}: {exc}") from exc
    return load_spec_text(text, str(path))


def parse_spec(path: str | Path) -> ConstructionSpec:
    """The construction described by a spec file."""
    sf = load_spec_file(path)
    if sf.construction is None:
        raise SpecFileError(f"{path}: no branch or L section; the file only describes a surface")
    return sf.construction


def shipped_spec_path(name: str) -> Path:
    """Path of a spec file shipped inside the package (``main`` -> ``data/main.spec``)."""
    return Path(__file__).parent / "data" / f"{name}.spec"
