"""The mini specification language and its staged compiler."""

from .syntax import (  # noqa: F401
    AtomDecl,
    CommDecl,
    CompileError,
    Definition,
    EquationDecl,
    FuncDecl,
    ImportClause,
    ModuleAST,
    ParamBinding,
    ParamSection,
    ProcDecl,
    Sections,
    SetDecl,
    SetElement,
)
from .parser import parse_module  # noqa: F401
from .collect import collect_modules, sort_modules, split_files  # noqa: F401
from .normalize import NormalizedModule, normalize_module  # noqa: F401
from .flatten import FlatSpec, flatten  # noqa: F401
from .store import ModuleStore, out_of_date  # noqa: F401
from .pipeline import compile_spec  # noqa: F401
