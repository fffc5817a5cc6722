"""JSON workspace documents: a category, named presheaves and maps, and tasks.

Format::

    {
      "category": {
        "objects": ["0", "1"],
        "morphisms": [{"name": "id_0", "src": "0", "dst": "0"}, ...],
        "identities": {"0": "id_0", "1": "id_1"},
        "composition": [["g", "f", "gf"], ...]
      },
      "presheaves": {"E": {"sizes": {"0": 2, "1": 1}, "act": {"a": [0]},
                           "labels": {"0": ["x", "y"]}}},
      "morphisms": {"p": {"src": "E", "dst": "B", "components": {"0": [0, 0], "1": [0]}}},
      "tasks": [{"id": "t1", "kind": "search-lift", "inputs": {...}, "options": {...}}]
    }

``composition`` lists ``[g, f, g.f]`` for composable pairs of non-identity
morphisms; composites with identities are implied.  ``act`` gives the
restriction table ``P(dst) -> P(src)`` of every non-identity morphism.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .fincat import FinCat, Presheaf, PshMor, validate_fincat, validate_presheaf, validate_pshmor

TASK_KINDS = ("validate", "search-lift", "solve", "construct", "transpose", "approx-check",
              "witness", "interval-check", "cube-check")


class WorkspaceError(ValueError):
    """Invalid workspace document; ``errors`` holds ``(location, message)`` pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{loc}: {msg}" for loc, msg in self.errors))


@dataclass
class TaskRecord:
    id: str
    kind: str
    inputs: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)


@dataclass
class Workspace:
    category: FinCat
    presheaves: dict
    morphisms: dict
    tasks: list

    def task(self, task_id):
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(task_id)


class _Errors:
    def __init__(self):
        self.items = []

    def add(self, loc, msg):
        self.items.append((loc, msg))

    def raise_if_any(self):
        if self.items:
            raise WorkspaceError(self.items)


def _expect(errs, loc, value, kind):
    if not isinstance(value, kind):
        errs.add(loc, f"expected {kind.__name__ if isinstance(kind, type) else 'a value'}")
        return False
    return True


def _parse_category(doc, errs):
    loc = "category"
    if not _expect(errs, loc, doc, dict):
        return None
    objects = doc.get("objects")
    if not isinstance(objects, list) or not all(isinstance(o, str) for o in objects):
        errs.add(f"{loc}.objects", "expected a list of object names")
        return None
    if len(set(objects)) != len(objects):
        errs.add(f"{loc}.objects", "duplicate object name")
        return None
    names, src, dst = [], [], []
    for k, m in enumerate(doc.get("morphisms", [])):
        mloc = f"{loc}.morphisms[{k}]"
        if not isinstance(m, dict) or not {"name", "src", "dst"} <= set(m):
            errs.add(mloc, "expected an object with name, src and dst")
            continue
        if m["name"] in names:
            errs.add(mloc, f"duplicate morphism name {m['name']!r}")
            continue
        bad = [e for e in (m["src"], m["dst"]) if e not in objects]
        if bad:
            errs.add(mloc, f"unknown object {bad[0]!r}")
            continue
        names.append(m["name"])
        src.append(objects.index(m["src"]))
        dst.append(objects.index(m["dst"]))
    idents = doc.get("identities", {})
    if not isinstance(idents, dict):
        errs.add(f"{loc}.identities", "expected a mapping from objects to morphism names")
        return None
    ids = []
    for c, o in enumerate(objects):
        name = idents.get(o)
        if name is None:
            errs.add(f"{loc}.identities", f"object {o!r} has no identity morphism")
            continue
        if name not in names:
            errs.add(f"{loc}.identities.{o}", f"unknown morphism {name!r}")
            continue
        ids.append(names.index(name))
    if errs.items:
        return None
    n = len(names)
    table = [[-1] * n for _ in range(n)]
    idset = set(ids)
    for g in range(n):
        for f in range(n):
            if dst[f] != src[g]:
                continue
            if f in idset:
                table[g][f] = g
            elif g in idset:
                table[g][f] = f
    for k, entry in enumerate(doc.get("composition", [])):
        cloc = f"{loc}.composition[{k}]"
        if not (isinstance(entry, list) and len(entry) == 3 and all(e in names for e in entry)):
            errs.add(cloc, "expected [g, f, g.f] with known morphism names")
            continue
        g, f, h = (names.index(e) for e in entry)
        if dst[f] != src[g]:
            errs.add(cloc, f"{entry[0]} and {entry[1]} are not composable")
            continue
        table[g][f] = h
    if errs.items:
        return None
    cat = FinCat(tuple(objects), tuple(names), tuple(src), tuple(dst), tuple(ids),
                 tuple(tuple(r) for r in table))
    for msg in validate_fincat(cat):
        errs.add(loc, msg)
    return cat


def _per_object(errs, loc, cat, value, default=None):
    if not isinstance(value, dict):
        errs.add(loc, "expected a mapping keyed by object name")
        return None
    extra = [k for k in value if k not in cat.objects]
    if extra:
        errs.add(loc, f"unknown object {extra[0]!r}")
        return None
    out = []
    for o in cat.objects:
        if o not in value and default is None:
            errs.add(loc, f"missing entry for object {o!r}")
            return None
        out.append(value.get(o, default))
    return out


def _parse_presheaf(name, doc, cat, errs):
    loc = f"presheaves.{name}"
    if not _expect(errs, loc, doc, dict):
        return None
    sizes = _per_object(errs, f"{loc}.sizes", cat, doc.get("sizes"))
    if sizes is None:
        return None
    if not all(isinstance(n, int) and n >= 0 for n in sizes):
        errs.add(f"{loc}.sizes", "sizes must be non-negative integers")
        return None
    act = doc.get("act", {})
    tables = []
    for f in range(cat.n_morphisms):
        if cat.is_identity(f):
            tables.append(tuple(range(sizes[cat.src[f]])))
            continue
        t = act.get(cat.morphisms[f])
        if not isinstance(t, list):
            errs.add(f"{loc}.act", f"missing action table for {cat.morphisms[f]}")
            return None
        tables.append(tuple(t))
    labels = None
    if "labels" in doc:
        raw = _per_object(errs, f"{loc}.labels", cat, doc["labels"], default=[])
        if raw is None:
            return None
        labels = tuple(tuple(str(x) for x in l) if l else tuple(str(k) for k in range(n))
                       for l, n in zip(raw, sizes))
        if any(len(l) != n for l, n in zip(labels, sizes)):
            errs.add(f"{loc}.labels", "label count does not match the size")
            return None
    p = Presheaf(cat, tuple(sizes), tuple(tables), labels)
    bad = validate_presheaf(p)
    for msg in bad:
        errs.add(loc, msg)
    return None if bad else p


def _parse_morphism(name, doc, cat, pshs, errs):
    loc = f"morphisms.{name}"
    if not _expect(errs, loc, doc, dict):
        return None
    ends = []
    for key in ("src", "dst"):
        ref = doc.get(key)
        if ref not in pshs:
            errs.add(f"{loc}.{key}", f"unresolved presheaf {ref!r}")
            return None
        ends.append(pshs[ref])
    comps = _per_object(errs, f"{loc}.components", cat, doc.get("components"))
    if comps is None:
        return None
    m = PshMor(ends[0], ends[1], tuple(tuple(t) for t in comps))
    bad = validate_pshmor(m)
    for msg in bad:
        errs.add(loc, msg)
    return None if bad else m


def _parse_tasks(doc, errs):
    tasks = []
    seen = set()
    if not _expect(errs, "tasks", doc, list):
        return tasks
    for k, t in enumerate(doc):
        loc = f"tasks[{k}]"
        if not isinstance(t, dict) or "kind" not in t:
            errs.add(loc, "expected an object with a kind")
            continue
        if t["kind"] not in TASK_KINDS:
            errs.add(f"{loc}.kind", f"unknown task kind {t['kind']!r}")
            continue
        tid = str(t.get("id", f"task{k}"))
        if tid in seen:
            errs.add(f"{loc}.id", f"duplicate task id {tid!r}")
            continue
        seen.add(tid)
        tasks.append(TaskRecord(tid, t["kind"], dict(t.get("inputs", {})),
                                dict(t.get("options", {}))))
    return tasks


def parse_document(data):
    """Build a :class:`Workspace` from an already decoded JSON value."""
    errs = _Errors()
    if not isinstance(data, dict):
        raise WorkspaceError([("$", "expected a JSON object")])
    for key in ("category", "presheaves"):
        if key not in data:
            errs.add("$", f"missing key {key!r}")
    errs.raise_if_any()
    cat = _parse_category(data["category"], errs)
    errs.raise_if_any()
    pshs = {}
    raw = data["presheaves"]
    if _expect(errs, "presheaves", raw, dict):
        for name, doc in raw.items():
            p = _parse_presheaf(name, doc, cat, errs)
            if p is not None:
                pshs[name] = p
    mors = {}
    raw = data.get("morphisms", {})
    if _expect(errs, "morphisms", raw, dict):
        for name, doc in raw.items():
            m = _parse_morphism(name, doc, cat, pshs, errs)
            if m is not None:
                mors[name] = m
    tasks = _parse_tasks(data.get("tasks", []), errs)
    errs.raise_if_any()
    return Workspace(cat, pshs, mors, tasks)


def parse_workspace(text):
    """Parse workspace text; syntax errors report line and column."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WorkspaceError([(f"line {exc.lineno}, column {exc.colno}", exc.msg)]) from exc
    return parse_document(data)


def load_workspace(path):
    with open(path, encoding="utf-8") as fh:
        return parse_workspace(fh.read())


def serialize_workspace(w):
    cat = w.category
    objs = cat.objects
    ids = set(cat.ids)
    comp = []
    for g in range(cat.n_morphisms):
        for f in range(cat.n_morphisms):
            h = cat.comp[g][f]
            if h >= 0 and g not in ids and f not in ids:
                comp.append([cat.morphisms[g], cat.morphisms[f], cat.morphisms[h]])
    out = {
        "category": {
            "objects": list(objs),
            "morphisms": [{"name": n, "src": objs[s], "dst": objs[d]}
                          for n, s, d in zip(cat.morphisms, cat.src, cat.dst)],
            "identities": {o: cat.morphisms[i] for o, i in zip(objs, cat.ids)},
            "composition": comp,
        },
        "presheaves": {},
        "morphisms": {},
        "tasks": [{"id": t.id, "kind": t.kind, "inputs": t.inputs, "options": t.options}
                  for t in w.tasks],
    }
    names = {}
    for name, p in w.presheaves.items():
        names.setdefault(p, name)
        doc = {"sizes": dict(zip(objs, p.sizes)),
               "act": {cat.morphisms[f]: list(p.act[f]) for f in range(cat.n_morphisms)
                       if not cat.is_identity(f)}}
        if p.labels is not None:
            doc["labels"] = {o: list(l) for o, l in zip(objs, p.labels)}
        out["presheaves"][name] = doc
    for name, m in w.morphisms.items():
        out["morphisms"][name] = {"src": _name_of(w, m.src), "dst": _name_of(w, m.dst),
                                  "components": {o: list(t) for o, t in zip(objs, m.comps)}}
    return out


def _name_of(w, p):
    for name, q in w.presheaves.items():
        if q == p:
            return name
    raise KeyError("presheaf without a name in the workspace")


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
