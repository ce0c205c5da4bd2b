"""
frontend.py — Lexer, parser descendente recursivo y resolución de nombres.

Responsabilidades:
  1. ``tokenize``: texto ``.rml`` → tokens con ubicación (comentarios ``//``
     descartados, operadores por máxima coincidencia).
  2. ``parse``: tokens → ``ParsedModel`` sin resolver, con precedencias
     de operadores relacionales y lógicos.
  3. ``resolve``: ``ParsedModel`` → ``Model`` con nombres ligados, aridades
     calculadas y comandos validados.
  4. ``load_model``: atajo archivo → ``Model``.

Principios de diseño:
  • Los errores se acumulan como ``Diagnostic`` y se lanzan juntos en un
    ``FrontendError``; el parser se re-sincroniza en la siguiente
    declaración de nivel superior.
  • Una línea de un bloque es una conjunción independiente; un ``&&``
    de nivel superior también separa conjunciones.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from config import DEFAULT_SCOPE
from exceptions import FrontendError
from model import (
    BinaryFormula,
    BinaryRel,
    CmpOp,
    Command,
    CommandKind,
    Compare,
    Conjunct,
    Diagnostic,
    FieldDecl,
    Formula,
    IdenConst,
    LogicOp,
    Model,
    MultKind,
    MultTest,
    Multiplicity,
    NoneConst,
    Not,
    PredRef,
    Quant,
    QuantKind,
    RelExpr,
    RelKind,
    RelName,
    RelOp,
    Severity,
    SigDecl,
    SourceSpan,
    UnaryOp,
    UnaryRel,
    UnivConst,
    VarRef,
    arity_of,
    conjoin,
)

logger = logging.getLogger(__name__)


# ════════════════════════════════════════════════════════════
# 1. TOKENS
# ════════════════════════════════════════════════════════════

KEYWORDS: frozenset[str] = frozenset(
    "sig one lone some set no all fact pred assert check run for in not and or none univ iden".split()
)

_PATRON_TOKEN = re.compile(
    r"""
    (?P<comentario>//[^\n]*)
  | (?P<salto>\n)
  | (?P<espacio>[ \t\r\f]+)
  | (?P<entero>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=>|=>|!in(?![A-Za-z0-9_])|!=|&&|\|\||->|[=!+\-&.~*^:,|{}()])
    """,
    re.VERBOSE,
)

# Tras estos tokens la fórmula continúa en la línea siguiente
_CONTINUACION: frozenset[str] = frozenset(
    {"<=>", "=>", "!in", "!=", "&&", "||", "->", "=", "!", "+", "-", "&", ".",
     "~", "*", "^", ":", ",", "|", "{", "(", "in", "not", "and", "or"}
)


class TokenKind(str, Enum):
    IDENT = "identifier"
    KEYWORD = "keyword"
    OPERATOR = "operator"
    INTEGER = "integer"
    PUNCT = "punctuation"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.kind.value} {self.text!r}"


NEWLINE = "\n"


def _filtrar_saltos(tokens: list[Token]) -> list[Token]:
    """Deja sólo los saltos de línea que separan fórmulas."""
    resultado: list[Token] = []
    profundidad = 0
    for tok in tokens:
        if tok.text == NEWLINE and tok.kind is TokenKind.PUNCT:
            if (
                profundidad > 0
                or not resultado
                or resultado[-1].text == NEWLINE
                or resultado[-1].text in _CONTINUACION
            ):
                continue
        elif tok.text == "(":
            profundidad += 1
        elif tok.text == ")":
            profundidad = max(0, profundidad - 1)
        resultado.append(tok)
    while resultado and resultado[-1].text == NEWLINE:
        resultado.pop()
    return resultado


def tokenize(source: str, file: str = "<entrada>") -> list[Token]:
    """Convierte texto fuente en tokens.

    Args:
        source: Texto UTF-8 del modelo.
        file:   Nombre usado en las ubicaciones.

    Returns:
        Lista de tokens; los saltos de línea significativos aparecen como
        puntuación ``"\\n"``.

    Raises:
        FrontendError: con un diagnóstico por cada carácter no reconocido.
    """
    tokens: list[Token] = []
    diagnosticos: list[Diagnostic] = []
    linea, inicio_linea, pos = 1, 0, 0

    while pos < len(source):
        col = pos - inicio_linea + 1
        m = _PATRON_TOKEN.match(source, pos)
        if m is None:
            span = SourceSpan(file, linea, col, linea, col)
            diagnosticos.append(
                Diagnostic(Severity.ERROR, f"Carácter no reconocido {source[pos]!r}", span)
            )
            pos += 1
            continue

        tipo, texto = m.lastgroup, m.group()
        span = SourceSpan(file, linea, col, linea, col + max(len(texto), 1) - 1)
        if tipo == "salto":
            tokens.append(Token(TokenKind.PUNCT, NEWLINE, span))
            linea, inicio_linea = linea + 1, m.end()
        elif tipo == "entero":
            tokens.append(Token(TokenKind.INTEGER, texto, span))
        elif tipo == "ident":
            kind = TokenKind.KEYWORD if texto in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, texto, span))
        elif tipo == "op":
            tokens.append(Token(TokenKind.OPERATOR, texto, span))
        pos = m.end()

    if diagnosticos:
        raise FrontendError("Error léxico", diagnosticos, {"archivo": file})
    return _filtrar_saltos(tokens)


# ════════════════════════════════════════════════════════════
# 2. MODELO SIN RESOLVER
# ════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class Block:
    """Bloque ``fact``/``pred``/``assert`` con sus fórmulas, una por línea."""

    name: str
    formulas: tuple[Formula, ...]
    span: SourceSpan


@dataclass(frozen=True)
class ParsedModel:
    sigs: tuple[SigDecl, ...] = ()
    facts: tuple[Block, ...] = ()
    preds: tuple[Block, ...] = ()
    asserts: tuple[Block, ...] = ()
    commands: tuple[Command, ...] = ()
    file: str = "<entrada>"


class _SyntaxError(Exception):
    def __init__(self, span: SourceSpan, message: str) -> None:
        super().__init__(message)
        self.diagnostic = Diagnostic(Severity.ERROR, message, span)


_INICIO_DECLARACION = frozenset({"sig", "fact", "pred", "assert", "check", "run"})
_MULT_SIG = {"one": Multiplicity.ONE, "lone": Multiplicity.LONE, "some": Multiplicity.SOME}
_MULT_CAMPO = {**_MULT_SIG, "set": Multiplicity.SET}
_MULT_TEST = {"no": MultKind.NO, "some": MultKind.SOME, "lone": MultKind.LONE, "one": MultKind.ONE}
_QUANT = {"all": QuantKind.ALL, "some": QuantKind.SOME, "no": QuantKind.NO}
_CMP = {"in": CmpOp.IN, "!in": CmpOp.NOT_IN, "=": CmpOp.EQ, "!=": CmpOp.NEQ}
_OPERADORES_REL = frozenset({".", "+", "-", "&", "->"})


# ════════════════════════════════════════════════════════════
# 3. PARSER DESCENDENTE RECURSIVO
# ════════════════════════════════════════════════════════════


class _Parser:
    def __init__(self, tokens: Sequence[Token], file: str) -> None:
        self.tokens = list(tokens)
        self.file = file
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []
        self.entre_parentesis: set[int] = set()
        self._parentizadas: list[Formula] = []
        self.hechos_anonimos = 0

    # ── utilidades ──────────────────────────────────────────

    def _peek(self, offset: int = 0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def _at(self, *textos: str, offset: int = 0) -> bool:
        tok = self._peek(offset)
        return tok is not None and tok.kind is not TokenKind.IDENT and tok.text in textos

    def _at_ident(self, offset: int = 0) -> bool:
        tok = self._peek(offset)
        return tok is not None and tok.kind is TokenKind.IDENT

    def _span_actual(self) -> SourceSpan:
        tok = self._peek()
        if tok is not None:
            return tok.span
        if self.tokens:
            return self.tokens[-1].span
        return SourceSpan(self.file, 1, 1, 1, 1)

    def _avanzar(self) -> Token:
        tok = self._peek()
        if tok is None:
            raise _SyntaxError(self._span_actual(), "Fin de archivo inesperado")
        self.pos += 1
        return tok

    def _esperar(self, texto: str) -> Token:
        if not self._at(texto):
            tok = self._peek()
            visto = "fin de archivo" if tok is None else repr(tok.text)
            raise _SyntaxError(self._span_actual(), f"Se esperaba '{texto}' y se encontró {visto}")
        return self._avanzar()

    def _ident(self, que: str = "un identificador") -> Token:
        if not self._at_ident():
            raise _SyntaxError(self._span_actual(), f"Se esperaba {que}")
        return self._avanzar()

    def _saltar_lineas(self) -> None:
        while self._at(NEWLINE):
            self.pos += 1

    def _previo(self) -> Token:
        return self.tokens[self.pos - 1]

    def _desde(self, inicio: Token) -> SourceSpan:
        return inicio.span.through(self._previo().span)

    # ── declaraciones ───────────────────────────────────────

    def _es_inicio_declaracion(self) -> bool:
        if self._at(*_INICIO_DECLARACION):
            return True
        return self._at(*_MULT_SIG) and self._at("sig", offset=1)

    def _resincronizar(self) -> None:
        self.pos += 1
        while self._peek() is not None and not self._es_inicio_declaracion():
            self.pos += 1

    def parse_model(self) -> ParsedModel:
        sigs: list[SigDecl] = []
        facts: list[Block] = []
        preds: list[Block] = []
        asserts: list[Block] = []
        commands: list[Command] = []

        while True:
            self._saltar_lineas()
            if self._peek() is None:
                break
            try:
                if self._at("sig") or (self._at(*_MULT_SIG) and self._at("sig", offset=1)):
                    sigs.extend(self._sig())
                elif self._at("fact"):
                    facts.append(self._bloque_fact())
                elif self._at("pred"):
                    preds.append(self._bloque_nombrado("pred"))
                elif self._at("assert"):
                    asserts.append(self._bloque_nombrado("assert"))
                elif self._at("check", "run"):
                    commands.append(self._comando())
                else:
                    raise _SyntaxError(self._span_actual(), "Se esperaba una declaración")
            except _SyntaxError as exc:
                self.diagnostics.append(exc.diagnostic)
                self._resincronizar()

        return ParsedModel(
            tuple(sigs), tuple(facts), tuple(preds), tuple(asserts), tuple(commands), self.file
        )

    def _sig(self) -> list[SigDecl]:
        inicio = self._peek()
        mult = Multiplicity.SET
        if self._at(*_MULT_SIG):
            mult = _MULT_SIG[self._avanzar().text]
        self._esperar("sig")
        nombres = [self._ident("el nombre de la signatura")]
        while self._at(","):
            self._avanzar()
            nombres.append(self._ident("el nombre de la signatura"))

        self._esperar("{")
        campos: list[tuple[Token, Multiplicity, Token]] = []
        self._saltar_lineas()
        while not self._at("}"):
            grupo = [self._ident("el nombre del campo")]
            while self._at(","):
                self._avanzar()
                grupo.append(self._ident("el nombre del campo"))
            self._esperar(":")
            mult_campo = Multiplicity.SET
            if self._at(*_MULT_CAMPO):
                mult_campo = _MULT_CAMPO[self._avanzar().text]
            destino = self._ident("la signatura destino")
            campos.extend((n, mult_campo, destino) for n in grupo)
            self._saltar_lineas()
            if self._at(","):
                self._avanzar()
                self._saltar_lineas()
            elif not self._at("}"):
                raise _SyntaxError(self._span_actual(), "Se esperaba ',' o '}'")
        self._avanzar()
        span = self._desde(inicio)

        return [
            SigDecl(
                n.text,
                mult,
                tuple(
                    FieldDecl(c.text, n.text, d.text, mc, span=c.span.through(d.span))
                    for c, mc, d in campos
                ),
                span=span,
            )
            for n in nombres
        ]

    def _bloque_fact(self) -> Block:
        inicio = self._esperar("fact")
        if self._at_ident():
            nombre = self._avanzar().text
        else:
            nombre = f"fact_{self.hechos_anonimos}"
            self.hechos_anonimos += 1
        formulas = self._cuerpo()
        return Block(nombre, formulas, self._desde(inicio))

    def _bloque_nombrado(self, palabra: str) -> Block:
        inicio = self._esperar(palabra)
        nombre = self._ident(f"el nombre de '{palabra}'").text
        formulas = self._cuerpo()
        return Block(nombre, formulas, self._desde(inicio))

    def _comando(self) -> Command:
        inicio = self._avanzar()
        objetivo = self._ident("el objetivo del comando").text
        alcance = None
        if self._at("for"):
            self._avanzar()
            tok = self._peek()
            if tok is None or tok.kind is not TokenKind.INTEGER:
                raise _SyntaxError(self._span_actual(), "Se esperaba un entero tras 'for'")
            self._avanzar()
            alcance = int(tok.text)
            if alcance < 1:
                raise _SyntaxError(tok.span, "El alcance debe ser ≥ 1")
        return Command(CommandKind(inicio.text), objetivo, alcance, span=self._desde(inicio))

    def _cuerpo(self) -> tuple[Formula, ...]:
        self._esperar("{")
        formulas: list[Formula] = []
        while True:
            self._saltar_lineas()
            if self._at("}"):
                self._avanzar()
                return tuple(formulas)
            f = self.formula()
            formulas.extend(self._separar_conjunciones(f))
            if not (self._at(NEWLINE) or self._at("}")):
                raise _SyntaxError(self._span_actual(), "Se esperaba fin de línea o '}'")

    def _separar_conjunciones(self, f: Formula) -> list[Formula]:
        if (
            isinstance(f, BinaryFormula)
            and f.op is LogicOp.AND
            and id(f) not in self.entre_parentesis
        ):
            return self._separar_conjunciones(f.left) + self._separar_conjunciones(f.right)
        return [f]

    # ── fórmulas ────────────────────────────────────────────

    def formula(self) -> Formula:
        izq = self._implicacion()
        while self._at("<=>"):
            self._avanzar()
            der = self._implicacion()
            izq = BinaryFormula(LogicOp.IFF, izq, der, span=izq.span.through(der.span))
        return izq

    def _implicacion(self) -> Formula:
        izq = self._disyuncion()
        if self._at("=>"):
            self._avanzar()
            der = self._implicacion()
            return BinaryFormula(LogicOp.IMPLIES, izq, der, span=izq.span.through(der.span))
        return izq

    def _disyuncion(self) -> Formula:
        izq = self._conjuncion()
        while self._at("||", "or"):
            self._avanzar()
            der = self._conjuncion()
            izq = BinaryFormula(LogicOp.OR, izq, der, span=izq.span.through(der.span))
        return izq

    def _conjuncion(self) -> Formula:
        izq = self._negacion()
        while self._at("&&", "and"):
            self._avanzar()
            der = self._negacion()
            izq = BinaryFormula(LogicOp.AND, izq, der, span=izq.span.through(der.span))
        return izq

    def _negacion(self) -> Formula:
        if self._at("!", "not"):
            tok = self._avanzar()
            f = self._negacion()
            return Not(f, span=tok.span.through(f.span))
        if self._hay_cuantificador():
            return self._cuantificador()
        return self._formula_primaria()

    def _hay_cuantificador(self) -> bool:
        if self._at("all"):
            return True
        if not self._at("some", "no"):
            return False
        i = 1
        while self._at_ident(i) and self._at(",", offset=i + 1):
            i += 2
        return self._at_ident(i) and self._at(":", offset=i + 1)

    def _cuantificador(self) -> Formula:
        inicio = self._avanzar()
        kind = _QUANT[inicio.text]
        decls: list[tuple[Token, RelExpr]] = []
        while True:
            nombres = [self._ident("una variable")]
            while self._at(","):
                self._avanzar()
                nombres.append(self._ident("una variable"))
            self._esperar(":")
            cota = self.rel()
            decls.extend((n, cota) for n in nombres)
            if not self._at(","):
                break
            self._avanzar()
        self._esperar("|")
        cuerpo = self.formula()

        # "no a, b: S | f" equivale a "all a: S | no b: S | f"
        resultado = cuerpo
        for i, (nombre, cota) in enumerate(reversed(decls)):
            k = kind if (i == 0 or kind is not QuantKind.NO) else QuantKind.ALL
            span = (inicio if i == len(decls) - 1 else nombre).span.through(cuerpo.span)
            resultado = Quant(k, nombre.text, cota, resultado, span=span)
        return resultado

    def _formula_primaria(self) -> Formula:
        if self._at(*_MULT_TEST):
            tok = self._avanzar()
            e = self.rel()
            return MultTest(_MULT_TEST[tok.text], e, span=tok.span.through(e.span))

        if self._at("("):
            guardado = self.pos
            try:
                self._avanzar()
                f = self.formula()
                self._esperar(")")
                if self._hay_comparacion() or self._at(*_OPERADORES_REL):
                    raise _SyntaxError(self._span_actual(), "expresión relacional")
                self.entre_parentesis.add(id(f))
                self._parentizadas.append(f)
                return f
            except _SyntaxError:
                self.pos = guardado

        izq = self.rel()
        if self._hay_comparacion():
            op = self._operador_comparacion()
            der = self.rel()
            return Compare(op, izq, der, span=izq.span.through(der.span))
        if isinstance(izq, RelName):
            return PredRef(izq.name, span=izq.span)
        raise _SyntaxError(self._span_actual(), "Se esperaba un operador de comparación")

    def _hay_comparacion(self) -> bool:
        if self._at(*_CMP):
            return True
        return self._at("not", "!") and self._at("in", offset=1)

    def _operador_comparacion(self) -> CmpOp:
        tok = self._avanzar()
        if tok.text in ("not", "!"):
            self._avanzar()
            return CmpOp.NOT_IN
        return _CMP[tok.text]

    # ── expresiones relacionales ────────────────────────────

    def rel(self) -> RelExpr:
        izq = self._interseccion()
        while self._at("+", "-"):
            op = RelOp(self._avanzar().text)
            der = self._interseccion()
            izq = BinaryRel(op, izq, der, span=izq.span.through(der.span))
        return izq

    def _interseccion(self) -> RelExpr:
        izq = self._producto()
        while self._at("&"):
            self._avanzar()
            der = self._producto()
            izq = BinaryRel(RelOp.INTERSECT, izq, der, span=izq.span.through(der.span))
        return izq

    def _producto(self) -> RelExpr:
        izq = self._join()
        while self._at("->"):
            self._avanzar()
            der = self._join()
            izq = BinaryRel(RelOp.PRODUCT, izq, der, span=izq.span.through(der.span))
        return izq

    def _join(self) -> RelExpr:
        izq = self._unario()
        while self._at("."):
            self._avanzar()
            der = self._unario()
            izq = BinaryRel(RelOp.JOIN, izq, der, span=izq.span.through(der.span))
        return izq

    def _unario(self) -> RelExpr:
        if self._at("~", "^", "*"):
            tok = self._avanzar()
            e = self._unario()
            return UnaryRel(UnaryOp(tok.text), e, span=tok.span.through(e.span))
        return self._primaria_rel()

    def _primaria_rel(self) -> RelExpr:
        tok = self._peek()
        if tok is None:
            raise _SyntaxError(self._span_actual(), "Fin de archivo inesperado en una expresión")
        if tok.kind is TokenKind.IDENT:
            self._avanzar()
            return RelName(tok.text, span=tok.span)
        if self._at("none"):
            self._avanzar()
            return NoneConst(span=tok.span)
        if self._at("univ"):
            self._avanzar()
            return UnivConst(span=tok.span)
        if self._at("iden"):
            self._avanzar()
            return IdenConst(span=tok.span)
        if self._at("("):
            self._avanzar()
            e = self.rel()
            self._esperar(")")
            return e
        raise _SyntaxError(tok.span, f"Se esperaba una expresión relacional y se encontró {tok.text!r}")


def parse(tokens: Sequence[Token], file: str = "<entrada>") -> ParsedModel:
    """Construye el modelo sin resolver.

    Raises:
        FrontendError: con el primer error sintáctico de cada declaración.
    """
    parser = _Parser(tokens, file)
    parsed = parser.parse_model()
    if parser.diagnostics:
        raise FrontendError("Errores de sintaxis", parser.diagnostics, {"archivo": file})
    return parsed


def parse_formula(source: str, file: str = "<entrada>") -> Formula:
    """Parsea una fórmula suelta (sin resolver); útil para pruebas y filtros."""
    parser = _Parser(tokenize(source, file), file)
    try:
        f = parser.formula()
        if parser._peek() is not None:
            raise _SyntaxError(parser._span_actual(), "Texto sobrante tras la fórmula")
    except _SyntaxError as exc:
        raise FrontendError("Error de sintaxis", [exc.diagnostic]) from exc
    return f


def parse_rel(source: str, file: str = "<entrada>") -> RelExpr:
    """Parsea una expresión relacional suelta (sin resolver)."""
    parser = _Parser(tokenize(source, file), file)
    try:
        e = parser.rel()
        if parser._peek() is not None:
            raise _SyntaxError(parser._span_actual(), "Texto sobrante tras la expresión")
    except _SyntaxError as exc:
        raise FrontendError("Error de sintaxis", [exc.diagnostic]) from exc
    return e


# ════════════════════════════════════════════════════════════
# 4. RESOLUCIÓN DE NOMBRES Y ARIDADES
# ════════════════════════════════════════════════════════════


@dataclass
class _Resolver:
    parsed: ParsedModel
    diagnostics: list[Diagnostic] = field(default_factory=list)
    sigs: dict[str, SigDecl] = field(default_factory=dict)
    campos: dict[str, FieldDecl] = field(default_factory=dict)
    preds_crudos: dict[str, Block] = field(default_factory=dict)
    cuerpos_pred: dict[str, Formula] = field(default_factory=dict)
    preds: dict[str, tuple[Conjunct, ...]] = field(default_factory=dict)
    en_curso: set[str] = field(default_factory=set)

    def _error(self, span: SourceSpan, mensaje: str) -> None:
        self.diagnostics.append(Diagnostic(Severity.ERROR, mensaje, span))

    def resolver(self) -> Model:
        self._declaraciones()

        for bloque in self.parsed.preds:
            if bloque.name in self.preds_crudos:
                self._error(bloque.span, f"Predicado duplicado: '{bloque.name}'")
                continue
            self.preds_crudos[bloque.name] = bloque
        for nombre in self.preds_crudos:
            self._pred(nombre)

        facts: list[Conjunct] = []
        vistos: set[str] = set()
        for bloque in self.parsed.facts:
            if bloque.name in vistos:
                self._error(bloque.span, f"Hecho duplicado: '{bloque.name}'")
                continue
            vistos.add(bloque.name)
            facts.extend(self._conjunciones(bloque))

        asserts: dict[str, Formula] = {}
        for bloque in self.parsed.asserts:
            if bloque.name in asserts:
                self._error(bloque.span, f"Aserción duplicada: '{bloque.name}'")
                continue
            asserts[bloque.name] = conjoin(c.formula for c in self._conjunciones(bloque))

        commands = [self._comando(c, asserts) for c in self.parsed.commands]

        if any(d.severity is Severity.ERROR for d in self.diagnostics):
            raise FrontendError(
                "Errores de resolución", self.diagnostics, {"archivo": self.parsed.file}
            )
        return Model(
            sigs=tuple(self.sigs.values()),
            facts=tuple(facts),
            preds=dict(self.preds),
            asserts=asserts,
            commands=tuple(commands),
            file=self.parsed.file,
        )

    def _declaraciones(self) -> None:
        for s in self.parsed.sigs:
            if s.name in self.sigs:
                self._error(s.span, f"Signatura duplicada: '{s.name}'")
                continue
            self.sigs[s.name] = s
        for s in self.sigs.values():
            for f in s.fields:
                if f.name in self.campos or f.name in self.sigs:
                    self._error(f.span, f"Campo duplicado: '{f.name}'")
                    continue
                if f.target not in self.sigs:
                    self._error(f.span, f"Signatura destino desconocida: '{f.target}'")
                    continue
                self.campos[f.name] = f

    def _conjunciones(self, bloque: Block) -> list[Conjunct]:
        resultado = []
        for i, f in enumerate(bloque.formulas):
            try:
                resuelta = self.formula(f, frozenset())
            except FrontendError as exc:
                self.diagnostics.extend(exc.diagnostics)
                continue
            resultado.append(Conjunct(bloque.name, i, resuelta, span=f.span))
        return resultado

    def _pred(self, nombre: str) -> Optional[Formula]:
        if nombre in self.cuerpos_pred:
            return self.cuerpos_pred[nombre]
        if nombre in self.en_curso:
            return None
        self.en_curso.add(nombre)
        conjunciones = tuple(self._conjunciones(self.preds_crudos[nombre]))
        self.en_curso.discard(nombre)
        self.preds[nombre] = conjunciones
        self.cuerpos_pred[nombre] = conjoin(c.formula for c in conjunciones)
        return self.cuerpos_pred[nombre]

    def _comando(self, c: Command, asserts: dict[str, Formula]) -> Command:
        if c.kind is CommandKind.CHECK and c.target not in asserts:
            self._error(c.span, f"El comando check nombra una aserción inexistente: '{c.target}'")
        if c.kind is CommandKind.RUN and c.target not in self.preds_crudos:
            self._error(c.span, f"El comando run nombra un predicado inexistente: '{c.target}'")
        return replace(c, scope=c.scope if c.scope is not None else DEFAULT_SCOPE)

    def formula(self, f: Formula, env: frozenset[str]) -> Formula:
        match f:
            case Compare(op=op, left=l, right=r):
                rl, rr = self.rel(l, env), self.rel(r, env)
                if rl.arity != rr.arity:
                    raise _error(f.span, f"Aridades distintas en '{op.value}': {rl.arity} y {rr.arity}")
                return replace(f, left=rl, right=rr)
            case MultTest(expr=e):
                return replace(f, expr=self.rel(e, env))
            case Quant(var=v, bound=b, body=body):
                rb = self.rel(b, env)
                if rb.arity != 1:
                    raise _error(b.span, f"La cota de '{v}' debe ser unaria")
                return replace(f, bound=rb, body=self.formula(body, env | {v}))
            case Not(formula=x):
                return replace(f, formula=self.formula(x, env))
            case BinaryFormula(left=l, right=r):
                return replace(f, left=self.formula(l, env), right=self.formula(r, env))
            case PredRef(name=name):
                if name in env:
                    raise _error(f.span, f"La variable '{name}' no es una fórmula")
                if name not in self.preds_crudos:
                    raise _error(f.span, f"Predicado desconocido: '{name}'")
                cuerpo = self._pred(name)
                if cuerpo is None:
                    raise _error(f.span, f"Ciclo de predicados en '{name}'")
                return replace(f, body=cuerpo)
        raise TypeError(f"Nodo desconocido: {f!r}")

    def rel(self, e: RelExpr, env: frozenset[str]) -> RelExpr:
        match e:
            case RelName(name=name):
                if name in env:
                    return VarRef(name, span=e.span, arity=1)
                if name in self.sigs:
                    return RelName(name, kind=RelKind.SIG, span=e.span, arity=1)
                if name in self.campos:
                    return RelName(name, kind=RelKind.FIELD, span=e.span, arity=2)
                raise _error(e.span, f"Nombre desconocido: '{name}'")
            case BinaryRel(left=l, right=r):
                nuevo = replace(e, left=self.rel(l, env), right=self.rel(r, env))
            case UnaryRel(expr=x):
                nuevo = replace(e, expr=self.rel(x, env))
            case _:
                nuevo = e
        return replace(nuevo, arity=arity_of(nuevo))


def _error(span: SourceSpan, mensaje: str) -> FrontendError:
    return FrontendError(mensaje, [Diagnostic(Severity.ERROR, mensaje, span)])


def resolve(parsed: ParsedModel) -> Model:
    """Liga nombres, calcula aridades y valida comandos.

    Raises:
        FrontendError: nombres desconocidos, declaraciones duplicadas o
            aridades incompatibles (cada diagnóstico con su ubicación).
    """
    return _Resolver(parsed).resolver()


def resolve_formula(m: Model, f: Formula, variables: frozenset[str] = frozenset()) -> Formula:
    """Resuelve una fórmula suelta contra las declaraciones de ``m``."""
    resolver = _Resolver(ParsedModel(sigs=m.sigs, file=m.file))
    resolver._declaraciones()
    for nombre, conjunciones in m.preds.items():
        resolver.preds_crudos[nombre] = Block(nombre, (), conjunciones[0].span if conjunciones else f.span)
        resolver.preds[nombre] = conjunciones
        resolver.cuerpos_pred[nombre] = m.pred_body(nombre)
    return resolver.formula(f, variables)


# ════════════════════════════════════════════════════════════
# 5. CARGA DE ARCHIVOS
# ════════════════════════════════════════════════════════════


def parse_model(source: str, file: str = "<entrada>") -> Model:
    """Texto fuente → ``Model`` resuelto."""
    return resolve(parse(tokenize(source, file), file))


def load_model(path: Path | str) -> Model:
    """Lee un archivo ``.rml`` (UTF-8) y devuelve el modelo resuelto."""
    ruta = Path(path)
    m = parse_model(ruta.read_text(encoding="utf-8"), ruta.name)
    logger.info(
        "Modelo '%s' cargado: %d signaturas, %d campos, %d hechos, %d comandos.",
        ruta.name, len(m.sigs), len(m.fields), len(m.facts), len(m.commands),
    )
    return m
