"""Core XPath: parser, reference semantics and compilation to tree automata."""
from .compile import CompiledQuery, NotCompilableError, compile_filter, compile_selector, query_tags
from .evaluate import eval_reference
from .parser import (
    DOWNWARD_AXES,
    SUPPORTED_AXES,
    And,
    CoreXPathAst,
    LocationPath,
    Not,
    Or,
    Step,
    UnsupportedAxisError,
    XPathSyntaxError,
    iter_steps,
    parse_corexpath,
    unparse,
)

__all__ = [name for name in dir() if not name.startswith("_")]
