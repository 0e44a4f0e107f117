"""Model JSON documents.

A document is ``{"formatVersion": "1.0.0", "family": ..., "objectTypes": [...], ...}``
with camelCase keys mirroring the AST. Writing is canonical (sorted keys,
two-space indent, LF, UTF-8) so that ``write(read(f)) == f`` for canonical
files.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any, Union

import jsonschema

from .model import (
    CONSTRAINT_TYPES, Attribute, AttributeCardinality, ConceptualModel, DataType, Family,
    ObjectType, RelSubsumption, Relationship, Role, RoleRef, Subsumption, ValueType,
)

FORMAT_VERSION = "1.0.0"
UNBOUNDED = "*"

PARSE_ERROR = "parse-error"
SCHEMA_ERROR = "schema-violation"
VERSION_ERROR = "version-mismatch"
FILE_ERROR = "io-error"


class ModelIOError(ValueError):
    def __init__(self, code: str, message: str, path: str = ""):
        self.code = code
        self.path = path
        where = f" at {path}" if path else ""
        super().__init__(f"{code}{where}: {message}")


# -- schema ------------------------------------------------------------------

_NAME = {"type": "string", "minLength": 1}
_COUNT = {"type": "integer", "minimum": 0}
_MAX = {"oneOf": [{"type": "integer", "minimum": 0}, {"const": UNBOUNDED}, {"type": "null"}]}
_ROLE_REF = {"type": "object", "additionalProperties": False,
             "required": ["relationship", "place"],
             "properties": {"relationship": _NAME, "place": _NAME}}


def _obj(required: list, **props) -> dict:
    return {"type": "object", "additionalProperties": False, "required": required,
            "properties": props}


def _list(item) -> dict:
    return {"type": "array", "items": item}


MODEL_SCHEMA = _obj(
    ["formatVersion", "family"],
    formatVersion={"type": "string", "pattern": r"^\d+\.\d+\.\d+$"},
    family={"enum": [f.value for f in Family]},
    objectTypes=_list(_obj(["name"], name=_NAME)),
    dataTypes=_list(_obj(["name"], name=_NAME)),
    valueTypes=_list(_obj(["name", "datatype"], name=_NAME, datatype=_NAME)),
    relationships=_list(_obj(
        ["roles"], name=_NAME,
        roles=_list(_obj(["place", "player"], place=_NAME, player=_NAME, roleName=_NAME)),
        readings=_list({"type": "string"}))),
    attributes=_list(_obj(
        ["owner", "name"], owner=_NAME, name=_NAME, datatype=_NAME,
        card=_obj(["min"], min=_COUNT, max=_MAX))),
    subsumptions=_list(_obj(["sub", "super"], sub=_NAME, super=_NAME)),
    relSubsumptions=_list(_obj(["sub", "super"], sub=_NAME, super=_NAME)),
    constraints=_list({"type": "object", "required": ["kind"],
                       "properties": {"kind": {"enum": sorted(CONSTRAINT_TYPES)}}}),
)

_ROLE_REF_FIELDS = {"sub", "sup", "first", "second"}


def _camel(name: str) -> str:
    head, *rest = name.split("_")
    return head + "".join(w.title() for w in rest)


def _field_schema(cls, f: dataclasses.Field) -> dict:
    if f.name == "roles":
        return _list(_ROLE_REF)
    if f.name in _ROLE_REF_FIELDS and cls.kind in ("roleSubsumption", "roleDisjointness"):
        return _ROLE_REF
    if f.name in ("min", "k"):
        return _COUNT
    if f.name == "max":
        return _MAX
    if f.name in ("determinants", "attributes", "places", "values", "object_types", "subtypes"):
        return _list({"type": "string"})
    return _NAME


def _constraint_schema(cls) -> dict:
    props = {"kind": {"const": cls.kind}}
    required = ["kind"]
    for f in dataclasses.fields(cls):
        props[_camel(f.name)] = _field_schema(cls, f)
        if f.default is dataclasses.MISSING:
            required.append(_camel(f.name))
    return {"type": "object", "additionalProperties": False, "required": required,
            "properties": props}


CONSTRAINT_SCHEMAS = {k: _constraint_schema(c) for k, c in CONSTRAINT_TYPES.items()}


def _path(parts) -> str:
    return "/" + "/".join(str(p) for p in parts)


def _validate(doc: Any, schema: dict, prefix=()) -> None:
    v = jsonschema.Draft202012Validator(schema)
    errors = sorted(v.iter_errors(doc), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        e = errors[0]
        raise ModelIOError(SCHEMA_ERROR, e.message, _path(list(prefix) + list(e.absolute_path)))


# -- conversion --------------------------------------------------------------


def _constraint_to_json(c) -> dict:
    out: dict = {"kind": c.kind}
    for f in dataclasses.fields(c):
        v = getattr(c, f.name)
        if v is None and f.name == "max":
            v = UNBOUNDED
        elif v is None:
            continue
        if isinstance(v, RoleRef):
            v = {"relationship": v.relationship, "place": v.place}
        elif isinstance(v, tuple):
            v = [{"relationship": x.relationship, "place": x.place} if isinstance(x, RoleRef) else x
                 for x in v]
        out[_camel(f.name)] = v
    return out


def _constraint_from_json(d: dict):
    cls = CONSTRAINT_TYPES[d["kind"]]
    kwargs = {}
    for f in dataclasses.fields(cls):
        key = _camel(f.name)
        if key not in d:
            continue
        v = d[key]
        if key == "max" and v == UNBOUNDED:
            v = None
        elif isinstance(v, dict):
            v = RoleRef(v["relationship"], v["place"])
        elif isinstance(v, list):
            v = tuple(RoleRef(x["relationship"], x["place"]) if isinstance(x, dict) else x for x in v)
        kwargs[f.name] = v
    return cls(**kwargs)


def model_to_json(model: ConceptualModel) -> dict:
    def rel(r: Relationship) -> dict:
        out: dict = {"roles": []}
        if r.name is not None:
            out["name"] = r.name
        for role in r.roles:
            rd = {"place": role.place, "player": role.player}
            if role.role_name is not None:
                rd["roleName"] = role.role_name
            out["roles"].append(rd)
        if r.readings:
            out["readings"] = list(r.readings)
        return out

    def attr(a: Attribute) -> dict:
        out = {"owner": a.owner, "name": a.name}
        if a.datatype is not None:
            out["datatype"] = a.datatype
        return out

    return {
        "formatVersion": FORMAT_VERSION,
        "family": model.family.value,
        "objectTypes": [{"name": o.name} for o in model.object_types],
        "dataTypes": [{"name": d.name} for d in model.data_types],
        "valueTypes": [{"name": v.name, "datatype": v.datatype} for v in model.value_types],
        "relationships": [rel(r) for r in model.relationships],
        "attributes": [attr(a) for a in model.attributes],
        "subsumptions": [{"sub": s.sub, "super": s.sup} for s in model.subsumptions],
        "relSubsumptions": [{"sub": s.sub, "super": s.sup} for s in model.rel_subsumptions],
        "constraints": [_constraint_to_json(c) for c in model.constraints],
    }


def model_from_json(doc: Any) -> ConceptualModel:
    """Build a model from a parsed document; raises :class:`ModelIOError`."""
    if isinstance(doc, dict) and isinstance(doc.get("formatVersion"), str):
        major = doc["formatVersion"].split(".")[0]
        if major != FORMAT_VERSION.split(".")[0]:
            raise ModelIOError(VERSION_ERROR, f"format version {doc['formatVersion']} is not "
                               f"readable (expected {FORMAT_VERSION.split('.')[0]}.x.y)",
                               "/formatVersion")
    _validate(doc, MODEL_SCHEMA)
    for i, c in enumerate(doc.get("constraints", [])):
        _validate(c, CONSTRAINT_SCHEMAS[c["kind"]], ("constraints", i))

    constraints = [_constraint_from_json(c) for c in doc.get("constraints", [])]
    attributes = []
    for a in doc.get("attributes", []):
        attributes.append(Attribute(a["owner"], a["name"], a.get("datatype")))
        if "card" in a:
            hi = a["card"].get("max")
            constraints.append(AttributeCardinality(a["owner"], a["name"], a["card"]["min"],
                                                    None if hi == UNBOUNDED else hi))
    return ConceptualModel(
        family=Family(doc["family"]),
        object_types=tuple(ObjectType(o["name"]) for o in doc.get("objectTypes", [])),
        data_types=tuple(DataType(d["name"]) for d in doc.get("dataTypes", [])),
        value_types=tuple(ValueType(v["name"], v["datatype"]) for v in doc.get("valueTypes", [])),
        relationships=tuple(
            Relationship(r.get("name"),
                         tuple(Role(x["place"], x["player"], x.get("roleName")) for x in r["roles"]),
                         tuple(r.get("readings", ())))
            for r in doc.get("relationships", [])),
        attributes=tuple(attributes),
        subsumptions=tuple(Subsumption(s["sub"], s["super"]) for s in doc.get("subsumptions", [])),
        rel_subsumptions=tuple(RelSubsumption(s["sub"], s["super"])
                               for s in doc.get("relSubsumptions", [])),
        constraints=tuple(constraints),
    )


def dumps_model(model: ConceptualModel) -> str:
    return json.dumps(model_to_json(model), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def loads_model(text: str) -> ConceptualModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelIOError(PARSE_ERROR, e.msg, f"line {e.lineno} column {e.colno}") from None
    return model_from_json(doc)


def read_model(path: Union[str, Path]) -> ConceptualModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ModelIOError(FILE_ERROR, str(e)) from None
    return loads_model(text)


def write_model(model: ConceptualModel, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8", newline="\n")
