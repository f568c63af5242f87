from causalscope.qa.questions import ParsedQuestion, parse_question, template_ids
from causalscope.qa.answers import Answer, EngineState, answer_question
from causalscope.qa.memory import MemoryRecord, MemoryStore

__all__ = [
    "Answer",
    "EngineState",
    "MemoryRecord",
    "MemoryStore",
    "ParsedQuestion",
    "answer_question",
    "parse_question",
    "template_ids",
]
