"""Parser for the module language (keyword layout as in the source texts).

The grammar covers exactly the constructs the bundled specifications use:
``data module N begin ... end N`` / ``process module N ...`` with sections
exports / parameters / imports / sorts / functions / atoms / processes /
sets / communications / variables / equations / definitions, and process
operators ``. + || * sum encaps hide prio disrupt [=]->``.
"""

from __future__ import annotations

import re
from typing import Optional

from ..process import (
    AtomSet,
    AtomPattern,
    Call,
    DELTA_P,
    Guard,
    ProcessExpr,
    SetRef,
    SKIP,
    Sum,
    alt,
    disrupt,
    iteration,
    par,
    prio,
    seq,
)
from ..terms import Term, Var
from .syntax import (
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

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>--[^\n]*)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z][A-Za-z0-9'\-]*)
  | (?P<number>\d+)
  | (?P<punct>[(){}\[\],.|=#+*>])
  | (?P<bar2>\|\|)
""",
    re.VERBOSE,
)

SECTION_KEYWORDS = {
    "exports",
    "imports",
    "parameters",
    "sorts",
    "functions",
    "atoms",
    "processes",
    "sets",
    "communications",
    "variables",
    "equations",
    "definitions",
    "begin",
    "end",
}


class Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind: str, value: str, line: int, col: int):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.value!r}, {self.line}:{self.col})"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line = 1
    col = 1
    i = 0
    n = len(source)
    while i < n:
        if source.startswith("||", i):
            tokens.append(Token("op", "||", line, col))
            i += 2
            col += 2
            continue
        m = _TOKEN_RE.match(source, i)
        if not m:
            raise CompileError(f"unexpected character {source[i]!r}", line=line, col=col)
        text = m.group(0)
        kind = m.lastgroup
        if kind == "ident":
            # a hyphen only joins when followed by an identifier character,
            # so "a->b" lexes as "a", "->", "b"
            while text.endswith("-"):
                text = text[:-1]
            tokens.append(Token("ident", text, line, col))
            i += len(text)
            col += len(text)
            continue
        if kind not in ("ws", "comment"):
            tt = {"arrow": "op", "punct": "op", "bar2": "op", "number": "number"}[kind]
            tokens.append(Token(tt, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        i = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], module: str = ""):
        self.toks = tokens
        self.pos = 0
        self.module = module
        self.variables: dict[str, str] = {}

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, value: str) -> Token:
        t = self.next()
        if t.value != value:
            self.fail(f"expected {value!r}, found {t.value!r}", t)
        return t

    def expect_ident(self) -> Token:
        t = self.next()
        if t.kind != "ident":
            self.fail(f"expected an identifier, found {t.value!r}", t)
        return t

    def at(self, value: str) -> bool:
        return self.peek().value == value

    def fail(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise CompileError(message, module=self.module, line=tok.line, col=tok.col)

    def at_section_end(self) -> bool:
        return self.peek().value in SECTION_KEYWORDS or self.peek().kind == "eof"

    # -- module ------------------------------------------------------------

    def parse_module(self) -> ModuleAST:
        kind = self.expect_ident().value
        if kind not in ("data", "process"):
            self.fail(f"module kind must be data or process, found {kind!r}")
        self.expect("module")
        name = self.expect_ident().value
        self.module = name
        ast = ModuleAST(name=name, kind=kind)
        self.expect("begin")
        while not self.at("end"):
            tok = self.peek()
            section = tok.value
            if section == "exports":
                self.next()
                self.expect("begin")
                self.parse_sections_into(ast.exports)
                self.expect("end")
            elif section == "parameters":
                self.next()
                ast.parameters.extend(self.parse_parameters())
            elif section == "imports":
                self.next()
                ast.imports.extend(self.parse_imports())
            elif section in ("sorts", "functions", "atoms", "processes", "sets"):
                self.parse_sections_into(ast.internals, single=True)
            elif section == "variables":
                self.next()
                self.parse_variables(ast)
            elif section == "communications":
                self.next()
                ast.communications.extend(self.parse_communications())
            elif section == "equations":
                self.next()
                ast.equations.extend(self.parse_equations())
            elif section == "definitions":
                self.next()
                ast.definitions.extend(self.parse_definitions())
            else:
                self.fail(f"unexpected section {section!r}")
        self.expect("end")
        closing = self.expect_ident().value
        if closing != name:
            self.fail(f"module {name} closed by 'end {closing}'")
        trailing = self.peek()
        if trailing.kind != "eof":
            self.fail(f"trailing text after end {name}", trailing)
        return ast

    # -- declaration sections ------------------------------------------------

    def parse_sections_into(self, target: Sections, single: bool = False):
        while True:
            section = self.peek().value
            if section == "sorts":
                self.next()
                target.sorts.extend(self.parse_sort_names())
            elif section == "functions":
                self.next()
                target.functions.extend(self.parse_functions())
            elif section == "atoms":
                self.next()
                target.atoms.extend(self.parse_atoms())
            elif section == "processes":
                self.next()
                target.processes.extend(self.parse_processes())
            elif section == "sets":
                self.next()
                target.sets.extend(self.parse_sets())
            else:
                return
            if single:
                return

    def parse_sort_names(self) -> list[str]:
        names = [self.expect_ident().value]
        while self.at(","):
            self.next()
            names.append(self.expect_ident().value)
        return names

    def _parse_sig_sorts(self) -> tuple[str, ...]:
        sorts = [self.expect_ident().value]
        while self.at("#"):
            self.next()
            sorts.append(self.expect_ident().value)
        return tuple(sorts)

    def parse_functions(self) -> list[FuncDecl]:
        out = []
        while self.peek().kind == "ident" and not self.at_section_end():
            name = self.expect_ident().value
            self.expect(":")
            if self.at("->"):
                self.next()
                out.append(FuncDecl(name, (), self.expect_ident().value))
            else:
                args = self._parse_sig_sorts()
                self.expect("->")
                out.append(FuncDecl(name, args, self.expect_ident().value))
        return out

    def parse_atoms(self) -> list[AtomDecl]:
        out = []
        while self.peek().kind == "ident" and not self.at_section_end():
            name = self.expect_ident().value
            if self.at(":"):
                self.next()
                out.append(AtomDecl(name, self._parse_sig_sorts()))
            else:
                out.append(AtomDecl(name))
        return out

    def parse_processes(self) -> list[ProcDecl]:
        out = []
        while self.peek().kind == "ident" and not self.at_section_end():
            name = self.expect_ident().value
            if self.at(":"):
                self.next()
                out.append(ProcDecl(name, self._parse_sig_sorts()))
            else:
                out.append(ProcDecl(name))
        return out

    def parse_sets(self) -> list[SetDecl]:
        out = []
        while self.at("of"):
            self.next()
            kind = self.expect_ident().value
            if kind != "atoms":
                self.fail("only 'sets of atoms' are supported")
            while self.peek().kind == "ident" and self.peek(1).value == "=":
                name = self.expect_ident().value
                self.expect("=")
                self.expect("{")
                elements: list[SetElement] = []
                quants: list[tuple[str, str]] = []
                binder: dict[str, Var] = {}
                raw: list[tuple[str, Optional[list]]] = []
                while not self.at("|") and not self.at("}"):
                    aname = self.expect_ident().value
                    args = None
                    if self.at("("):
                        self.next()
                        args = []
                        while not self.at(")"):
                            args.append(self._parse_raw_term())
                            if self.at(","):
                                self.next()
                        self.expect(")")
                    raw.append((aname, args))
                    if self.at(","):
                        self.next()
                if self.at("|"):
                    self.next()
                    quants.extend(self.parse_quantifiers())
                self.expect("}")
                for v, s in quants:
                    binder[v] = Var(v, s)
                for aname, args in raw:
                    if args is None:
                        elements.append(SetElement(aname, None))
                    else:
                        elements.append(
                            SetElement(aname, tuple(self._resolve_term(a, binder) for a in args))
                        )
                out.append(SetDecl(name, tuple(elements), tuple(quants)))
        return out

    def parse_quantifiers(self) -> list[tuple[str, str]]:
        quants = []
        while True:
            v = self.expect_ident().value
            self.expect("in")
            s = self.expect_ident().value
            quants.append((v, s))
            if self.at(","):
                self.next()
                continue
            return quants

    def parse_variables(self, ast: ModuleAST):
        while self.peek().kind == "ident" and not self.at_section_end():
            name = self.expect_ident().value
            self.expect(":")
            self.expect("->")
            sort = self.expect_ident().value
            ast.variables.append((name, sort))
            self.variables[name] = sort

    def parse_equations(self) -> list[EquationDecl]:
        out = []
        while self.at("[") or (self.peek().kind == "ident" and not self.at_section_end()):
            tag = ""
            if self.at("["):
                self.next()
                parts = []
                while not self.at("]"):
                    parts.append(self.next().value)
                self.expect("]")
                tag = "".join(parts)
            lhs_raw = self._parse_raw_term()
            self.expect("=")
            rhs_raw = self._parse_raw_term()
            binder = {n: Var(n, s) for n, s in self.variables.items()}
            out.append(
                EquationDecl(
                    self._resolve_term(lhs_raw, binder),
                    self._resolve_term(rhs_raw, binder),
                    tag,
                )
            )
        return out

    def parse_communications(self) -> list[CommDecl]:
        out = []
        while self.peek().kind == "ident" and not self.at_section_end():
            left_raw = self._parse_raw_term()
            self.expect("|")
            right_raw = self._parse_raw_term()
            self.expect("=")
            result_raw = self._parse_raw_term()
            quants: list[tuple[str, str]] = []
            if self.at("for"):
                self.next()
                quants = self.parse_quantifiers()
            binder = {v: Var(v, s) for v, s in quants}
            for n, s in self.variables.items():
                binder.setdefault(n, Var(n, s))
            out.append(
                CommDecl(
                    self._resolve_term(left_raw, binder),
                    self._resolve_term(right_raw, binder),
                    self._resolve_term(result_raw, binder),
                    tuple(quants),
                )
            )
        return out

    # -- imports & parameters ----------------------------------------------

    def parse_imports(self) -> list[ImportClause]:
        out = []
        while True:
            name = self.expect_ident().value
            clause = ImportClause(module=name)
            if self.at("{"):
                self.next()
                while not self.at("}"):
                    if self.at("renamed"):
                        self.next()
                        self.expect("by")
                        clause.renamings.extend(self._parse_pair_list())
                    else:
                        section = self.expect_ident().value
                        self.expect("bound")
                        self.expect("by")
                        pairs = self._parse_pair_list()
                        self.expect("to")
                        actual = self.expect_ident().value
                        clause.bindings.append(
                            ParamBinding(section, tuple(pairs), actual)
                        )
                self.expect("}")
            out.append(clause)
            if self.at(","):
                self.next()
                continue
            return out

    def _parse_pair_list(self) -> list[tuple[str, str]]:
        self.expect("[")
        pairs = []
        while not self.at("]"):
            old = self.expect_ident().value
            self.expect("->")
            new = self.expect_ident().value
            pairs.append((old, new))
            if self.at(","):
                self.next()
        self.expect("]")
        return pairs

    def parse_parameters(self) -> list[ParamSection]:
        out = []
        while True:
            name = self.expect_ident().value
            self.expect("begin")
            ps = ParamSection(name=name)
            self.parse_sections_into(ps.decls)
            self.expect("end")
            closing = self.expect_ident().value
            if closing != name:
                self.fail(f"parameter section {name} closed by 'end {closing}'")
            out.append(ps)
            if self.at(","):
                self.next()
                continue
            return out

    # -- terms ----------------------------------------------------------------

    def _parse_raw_term(self):
        name = self.expect_ident().value
        if self.at("("):
            self.next()
            args = []
            while not self.at(")"):
                args.append(self._parse_raw_term())
                if self.at(","):
                    self.next()
            self.expect(")")
            return (name, args)
        return (name, None)

    def _resolve_term(self, raw, binder: dict[str, Var]):
        name, args = raw
        if args is None:
            v = binder.get(name)
            if v is not None:
                return v
            return Term(name)
        return Term(name, tuple(self._resolve_term(a, binder) for a in args))

    # -- process expressions --------------------------------------------------

    def parse_definitions(self) -> list[Definition]:
        out = []
        while self.peek().kind == "ident" and not self.at_section_end():
            name = self.expect_ident().value
            params: list[Var] = []
            if self.at("("):
                self.next()
                while not self.at(")"):
                    params.append(Var(self.expect_ident().value, ""))
                    if self.at(","):
                        self.next()
                self.expect(")")
            self.expect("=")
            binder = {v.name: v for v in params}
            body = self.parse_pexpr(binder, 0)
            out.append(Definition(name, tuple(params), body))
        return out

    def parse_pexpr(self, binder: dict[str, Var], prec: int) -> ProcessExpr:
        left = self.parse_primary(binder)
        while True:
            op = self.peek().value
            if op == "+" and prec <= 10:
                self.next()
                right = self.parse_pexpr(binder, 11)
                left = alt(left, right)
            elif op == "||" and prec <= 20:
                self.next()
                right = self.parse_pexpr(binder, 21)
                left = par(left, right)
            elif op == "*" and prec <= 30:
                self.next()
                right = self.parse_pexpr(binder, 31)
                left = iteration(left, right)
            elif op == "." and prec <= 40:
                self.next()
                right = self.parse_pexpr(binder, 41)
                left = seq(left, right)
            else:
                return left

    def parse_primary(self, binder: dict[str, Var]) -> ProcessExpr:
        tok = self.peek()
        if tok.value == "(":
            self.next()
            inner = self.parse_pexpr(binder, 0)
            self.expect(")")
            return inner
        if tok.value == "[":
            self.next()
            lhs = self._resolve_term(self._parse_raw_term(), binder)
            self.expect("=")
            rhs = self._resolve_term(self._parse_raw_term(), binder)
            self.expect("]")
            self.expect("->")
            body = self.parse_pexpr(binder, 11)
            return Guard(lhs, rhs, body)
        if tok.value == "skip":
            self.next()
            return SKIP
        if tok.value == "delta":
            self.next()
            return DELTA_P
        if tok.value == "sum":
            self.next()
            self.expect("(")
            vname = self.expect_ident().value
            self.expect("in")
            sort = self.expect_ident().value
            self.expect(",")
            v = Var(vname, sort)
            inner_binder = dict(binder)
            inner_binder[vname] = v
            body = self.parse_pexpr(inner_binder, 0)
            self.expect(")")
            return Sum(v, sort, body)
        if tok.value in ("encaps", "hide"):
            self.next()
            self.expect("(")
            aset = self.parse_set_expr()
            self.expect(",")
            body = self.parse_pexpr(binder, 0)
            self.expect(")")
            from ..process import Encaps, Hide

            return Encaps(aset, body) if tok.value == "encaps" else Hide(aset, body)
        if tok.value == "prio":
            self.next()
            self.expect("(")
            aset = self.parse_set_expr()
            self.expect(">")
            kw = self.expect_ident().value
            if kw != "atoms":
                self.fail("prio syntax is prio(SET > atoms, expr)")
            self.expect(",")
            body = self.parse_pexpr(binder, 0)
            self.expect(")")
            from ..process import Prio

            return Prio(aset, body)
        if tok.value == "disrupt":
            self.next()
            self.expect("(")
            body = self.parse_pexpr(binder, 0)
            self.expect(",")
            inter = self.parse_pexpr(binder, 0)
            self.expect(")")
            return disrupt(body, inter)
        if tok.kind == "ident":
            name = self.expect_ident().value
            if self.at("("):
                self.next()
                args = []
                while not self.at(")"):
                    args.append(self._resolve_term(self._parse_raw_term(), binder))
                    if self.at(","):
                        self.next()
                self.expect(")")
                return Call(name, tuple(args))
            return Call(name)
        self.fail(f"unexpected token {tok.value!r} in process expression", tok)

    def parse_set_expr(self):
        if self.peek().kind == "ident":
            return SetRef(self.expect_ident().value)
        self.expect("{")
        pats: list[AtomPattern] = []
        raw: list[tuple[str, Optional[list]]] = []
        while not self.at("|") and not self.at("}"):
            aname = self.expect_ident().value
            args = None
            if self.at("("):
                self.next()
                args = []
                while not self.at(")"):
                    args.append(self._parse_raw_term())
                    if self.at(","):
                        self.next()
                self.expect(")")
            raw.append((aname, args))
            if self.at(","):
                self.next()
        quants: list[tuple[str, str]] = []
        if self.at("|"):
            self.next()
            quants = self.parse_quantifiers()
        self.expect("}")
        binder = {v: Var(v, s) for v, s in quants}
        for aname, args in raw:
            if args is None:
                pats.append(AtomPattern(aname))
            else:
                pats.append(
                    AtomPattern(aname, tuple(self._resolve_term(a, binder) for a in args))
                )
        return AtomSet(pats)


def parse_module(source: str) -> ModuleAST:
    """Parse one module's source text into its AST."""
    return _Parser(tokenize(source)).parse_module()
