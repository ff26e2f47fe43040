"""AST records for parsed specification modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..process import ProcessExpr, pexpr_text
from ..terms import Term, Var, term_text


class CompileError(Exception):
    """Compilation failure, attributed to a module where possible."""

    def __init__(self, message: str, module: str = "", line: int = 0, col: int = 0):
        self.module = module
        self.line = line
        self.col = col
        where = f"{module}: " if module else ""
        pos = f" (line {line}, col {col})" if line else ""
        super().__init__(f"{where}{message}{pos}")


@dataclass(frozen=True)
class FuncDecl:
    name: str
    args: tuple[str, ...]
    result: str

    def text(self) -> str:
        if self.args:
            return f"{self.name} : {' # '.join(self.args)} -> {self.result}"
        return f"{self.name} : -> {self.result}"


@dataclass(frozen=True)
class AtomDecl:
    name: str
    args: tuple[str, ...] = ()

    def text(self) -> str:
        if self.args:
            return f"{self.name} : {' # '.join(self.args)}"
        return self.name


@dataclass(frozen=True)
class ProcDecl:
    name: str
    args: tuple[str, ...] = ()

    def text(self) -> str:
        if self.args:
            return f"{self.name} : {' # '.join(self.args)}"
        return self.name


@dataclass(frozen=True)
class SetElement:
    """One atom-set element: name, optional arg patterns (None = bare)."""

    name: str
    args: Optional[tuple] = None

    def text(self) -> str:
        if self.args is None:
            return self.name
        return f"{self.name}({', '.join(term_text(a) for a in self.args)})"


@dataclass(frozen=True)
class SetDecl:
    name: str
    elements: tuple[SetElement, ...]
    quantifiers: tuple[tuple[str, str], ...] = ()

    def text(self) -> str:
        inner = ", ".join(e.text() for e in self.elements)
        if self.quantifiers:
            q = ", ".join(f"{v} in {s}" for v, s in self.quantifiers)
            return f"{self.name} = {{ {inner} | {q} }}"
        return f"{self.name} = {{ {inner} }}"


@dataclass(frozen=True)
class EquationDecl:
    lhs: Term
    rhs: object  # Term | Var
    tag: str = ""

    def text(self) -> str:
        tag = f"[{self.tag}] " if self.tag else ""
        return f"{tag}{term_text(self.lhs)} = {term_text(self.rhs)}"


@dataclass(frozen=True)
class CommDecl:
    left: Term
    right: Term
    result: Term
    quantifiers: tuple[tuple[str, str], ...] = ()

    def text(self) -> str:
        base = f"{term_text(self.left)} | {term_text(self.right)} = {term_text(self.result)}"
        if self.quantifiers:
            base += " for " + ", ".join(f"{v} in {s}" for v, s in self.quantifiers)
        return base


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple[Var, ...]
    body: ProcessExpr

    def text(self) -> str:
        head = self.name
        if self.params:
            head += f"({', '.join(v.name for v in self.params)})"
        return f"{head} = {pexpr_text(self.body)}"


@dataclass
class Sections:
    """One bundle of declarations (exports, internals, or a parameter)."""

    sorts: list[str] = field(default_factory=list)
    functions: list[FuncDecl] = field(default_factory=list)
    atoms: list[AtomDecl] = field(default_factory=list)
    processes: list[ProcDecl] = field(default_factory=list)
    sets: list[SetDecl] = field(default_factory=list)

    def names(self) -> set[str]:
        out = set(self.sorts)
        out |= {f.name for f in self.functions}
        out |= {a.name for a in self.atoms}
        out |= {p.name for p in self.processes}
        out |= {s.name for s in self.sets}
        return out

    def is_empty(self) -> bool:
        return not (self.sorts or self.functions or self.atoms or self.processes or self.sets)


@dataclass(frozen=True)
class ParamBinding:
    section: str
    pairs: tuple[tuple[str, str], ...]
    actual_module: str


@dataclass
class ImportClause:
    module: str
    bindings: list[ParamBinding] = field(default_factory=list)
    renamings: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class ParamSection:
    name: str
    decls: Sections = field(default_factory=Sections)


@dataclass
class ModuleAST:
    name: str
    kind: str  # "data" | "process"
    exports: Sections = field(default_factory=Sections)
    internals: Sections = field(default_factory=Sections)
    parameters: list[ParamSection] = field(default_factory=list)
    imports: list[ImportClause] = field(default_factory=list)
    variables: list[tuple[str, str]] = field(default_factory=list)
    equations: list[EquationDecl] = field(default_factory=list)
    communications: list[CommDecl] = field(default_factory=list)
    definitions: list[Definition] = field(default_factory=list)

    def import_names(self) -> list[str]:
        """All modules this AST requires: imports plus binding actuals."""
        seen: list[str] = []
        for clause in self.imports:
            if clause.module not in seen:
                seen.append(clause.module)
            for b in clause.bindings:
                if b.actual_module not in seen:
                    seen.append(b.actual_module)
        return seen


def render_module(ast: ModuleAST) -> str:
    """Canonical text of a parsed module (the stored parse artifact)."""
    out = [f"{ast.kind} module {ast.name}", "begin"]

    def emit_sections(s: Sections, indent: str):
        if s.sorts:
            out.append(f"{indent}sorts")
            names = sorted(s.sorts)
            for i, x in enumerate(names):
                out.append(f"{indent}  {x}" + ("," if i < len(names) - 1 else ""))
        if s.functions:
            out.append(f"{indent}functions")
            for f in sorted(s.functions, key=lambda d: (d.name, len(d.args))):
                out.append(f"{indent}  {f.text()}")
        if s.atoms:
            out.append(f"{indent}atoms")
            for a in sorted(s.atoms, key=lambda d: (d.name, len(d.args))):
                out.append(f"{indent}  {a.text()}")
        if s.processes:
            out.append(f"{indent}processes")
            for p in sorted(s.processes, key=lambda d: d.name):
                out.append(f"{indent}  {p.text()}")
        if s.sets:
            out.append(f"{indent}sets")
            out.append(f"{indent}of atoms")
            for d in sorted(s.sets, key=lambda d: d.name):
                out.append(f"{indent}  {d.text()}")

    if not ast.exports.is_empty():
        out.append("exports")
        out.append("begin")
        emit_sections(ast.exports, "  ")
        out.append("end")
    for ps in ast.parameters:
        out.append(f"parameters {ps.name}")
        out.append("begin")
        emit_sections(ps.decls, "  ")
        out.append(f"end {ps.name}")
    if ast.imports:
        out.append("imports")
        for clause in ast.imports:
            line = f"  {clause.module}"
            if clause.bindings or clause.renamings:
                line += " {"
                out.append(line)
                for b in clause.bindings:
                    pairs = ", ".join(f"{f} -> {a}" for f, a in b.pairs)
                    out.append(f"    {b.section} bound by [ {pairs} ] to {b.actual_module}")
                if clause.renamings:
                    pairs = ", ".join(f"{o} -> {n}" for o, n in clause.renamings)
                    out.append(f"    renamed by [ {pairs} ]")
                out.append("  }")
            else:
                out.append(line)
    emit_sections(ast.internals, "")
    if ast.variables:
        out.append("variables")
        for name, sort in sorted(ast.variables):
            out.append(f"  {name} : -> {sort}")
    if ast.communications:
        out.append("communications")
        for c in sorted(ast.communications, key=lambda d: d.text()):
            out.append(f"  {c.text()}")
    if ast.equations:
        out.append("equations")
        for e in ast.equations:
            out.append(f"  {e.text()}")
    if ast.definitions:
        out.append("definitions")
        for d in sorted(ast.definitions, key=lambda d: d.name):
            out.append(f"  {d.text()}")
    out.append(f"end {ast.name}")
    return "\n".join(out) + "\n"
