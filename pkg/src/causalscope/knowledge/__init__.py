from causalscope.knowledge.ontology import AnnotatedGraph, OntologyStore, annotate_graph
from causalscope.knowledge.edits import EditLog, EditResult, GraphEdit, validate_edit

__all__ = [
    "AnnotatedGraph",
    "EditLog",
    "EditResult",
    "GraphEdit",
    "OntologyStore",
    "annotate_graph",
    "validate_edit",
]
