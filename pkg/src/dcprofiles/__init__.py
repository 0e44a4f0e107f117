"""Conceptual models of UML, EER and ORM diagrams and their DC profile knowledge bases."""

from .compare import kb_equal_modulo_renaming
from .dl import KnowledgeBase, Profile, Vocabulary, check_profile
from .encode import (
    encode, encode_dcp, encode_dcs, encode_eer, encode_orm, encode_uml, orm_lift_readings,
    pos_to_standard, reify_nary,
)
from .io import read_model, write_model
from .kbtext import parse_kb_text, read_kb, serialize_kb_text, write_kb
from .model import ConceptualModel, Family, normalize_orm_value_types, validate_model
from .reasoner import (
    classify, entails, equivalent, find_countermodel, subsumes_structural, unsatisfiable_concepts,
)
from .render import generate_readings, render_diagram_source, render_model
from .semantics import Interpretation, eval_concept, eval_relation, is_model, satisfies_axiom

__version__ = "0.1.0"

__all__ = [
    "ConceptualModel", "Family", "validate_model", "normalize_orm_value_types",
    "KnowledgeBase", "Profile", "Vocabulary", "check_profile",
    "parse_kb_text", "serialize_kb_text", "read_kb", "write_kb", "kb_equal_modulo_renaming",
    "encode", "encode_dcp", "encode_dcs", "encode_uml", "encode_eer", "encode_orm",
    "pos_to_standard", "reify_nary", "orm_lift_readings",
    "Interpretation", "eval_concept", "eval_relation", "satisfies_axiom", "is_model",
    "subsumes_structural", "entails", "find_countermodel", "classify", "equivalent",
    "unsatisfiable_concepts",
    "render_model", "generate_readings", "render_diagram_source",
    "read_model", "write_model",
]
