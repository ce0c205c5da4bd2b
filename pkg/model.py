"""
model.py — Sintaxis abstracta resuelta, átomos e instancias del lenguaje RML.

Responsabilidades:
  1. Ubicaciones en el fuente (``SourceSpan``) y diagnósticos.
  2. Declaraciones (signaturas, campos, comandos) y el ``Model`` resuelto.
  3. Nodos de expresiones relacionales y de fórmulas.
  4. Ayudantes estáticos: aridad, variables libres, hojas relacionales,
     relaciones referidas, firmas por columna e impresión legible.
  5. Átomos, instancias y su codificación JSON.

Principios de diseño:
  • Todos los tipos son inmutables (``frozen``) tras la resolución.
  • La igualdad estructural ignora ubicaciones y aridades: dos nodos
    impresos igual son iguales.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Iterator, Mapping, Optional, Union

from exceptions import FixtureError, FrontendError

logger = logging.getLogger(__name__)


# ════════════════════════════════════════════════════════════
# 1. UBICACIONES Y DIAGNÓSTICOS
# ════════════════════════════════════════════════════════════


@dataclass(frozen=True, order=True)
class SourceSpan:
    """Rango de texto ``[inicio, fin]`` (ambos inclusivos, base 1)."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"Span invertido: {self!r}")

    def contains(self, other: SourceSpan) -> bool:
        return (
            (self.start_line, self.start_col) <= (other.start_line, other.start_col)
            and (other.end_line, other.end_col) <= (self.end_line, self.end_col)
        )

    def through(self, other: SourceSpan) -> SourceSpan:
        """Span desde el inicio de ``self`` hasta el fin de ``other``."""
        return SourceSpan(self.file, self.start_line, self.start_col, other.end_line, other.end_col)

    def to_dict(self) -> dict[str, Any]:
        return {
            "file": self.file,
            "start_line": self.start_line,
            "start_col": self.start_col,
            "end_line": self.end_line,
            "end_col": self.end_col,
        }

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


NO_SPAN = SourceSpan("<sintetico>", 1, 1, 1, 1)


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """Mensaje del frontend anclado a una posición del fuente."""

    severity: Severity
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.severity.value}: {self.message}"


def error_at(span: SourceSpan, message: str) -> FrontendError:
    """Crea un ``FrontendError`` con un único diagnóstico de error."""
    return FrontendError(message, [Diagnostic(Severity.ERROR, message, span)])


# ════════════════════════════════════════════════════════════
# 2. DECLARACIONES
# ════════════════════════════════════════════════════════════


class Multiplicity(str, Enum):
    ONE = "one"
    LONE = "lone"
    SOME = "some"
    SET = "set"


@dataclass(frozen=True)
class FieldDecl:
    """Campo binario ``owner × target`` con multiplicidad por dueño."""

    name: str
    owner: str
    target: str
    mult: Multiplicity = Multiplicity.SET
    span: SourceSpan = field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class SigDecl:
    name: str
    mult: Multiplicity = Multiplicity.SET
    fields: tuple[FieldDecl, ...] = ()
    span: SourceSpan = field(default=NO_SPAN, compare=False, repr=False)


class CommandKind(str, Enum):
    CHECK = "check"
    RUN = "run"


@dataclass(frozen=True)
class Command:
    kind: CommandKind
    target: str
    scope: int
    span: SourceSpan = field(default=NO_SPAN, compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.kind.value} {self.target} for {self.scope}"


# ════════════════════════════════════════════════════════════
# 3. EXPRESIONES RELACIONALES
# ════════════════════════════════════════════════════════════


class RelKind(str, Enum):
    SIG = "sig"
    FIELD = "field"
    UNRESOLVED = "?"


class RelOp(str, Enum):
    UNION = "+"
    DIFFERENCE = "-"
    INTERSECT = "&"
    JOIN = "."
    PRODUCT = "->"


class UnaryOp(str, Enum):
    TRANSPOSE = "~"
    TCLOSURE = "^"
    RTCLOSURE = "*"


@dataclass(frozen=True)
class RelExpr:
    span: SourceSpan = field(default=NO_SPAN, compare=False, repr=False, kw_only=True)
    arity: int = field(default=0, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class RelName(RelExpr):
    """Referencia a una signatura o a un campo."""

    name: str
    kind: RelKind = field(default=RelKind.UNRESOLVED, compare=False, kw_only=True)


@dataclass(frozen=True)
class VarRef(RelExpr):
    name: str


@dataclass(frozen=True)
class NoneConst(RelExpr):
    pass


@dataclass(frozen=True)
class UnivConst(RelExpr):
    pass


@dataclass(frozen=True)
class IdenConst(RelExpr):
    pass


@dataclass(frozen=True)
class BinaryRel(RelExpr):
    """Unión, diferencia, intersección, join o producto."""

    op: RelOp
    left: RelExpr
    right: RelExpr


@dataclass(frozen=True)
class UnaryRel(RelExpr):
    """Transpuesta, clausura transitiva o reflexivo-transitiva."""

    op: UnaryOp
    expr: RelExpr


# ════════════════════════════════════════════════════════════
# 4. FÓRMULAS
# ════════════════════════════════════════════════════════════


class CmpOp(str, Enum):
    IN = "in"
    NOT_IN = "!in"
    EQ = "="
    NEQ = "!="


class MultKind(str, Enum):
    NO = "no"
    SOME = "some"
    LONE = "lone"
    ONE = "one"


class QuantKind(str, Enum):
    ALL = "all"
    SOME = "some"
    NO = "no"


class LogicOp(str, Enum):
    AND = "&&"
    OR = "||"
    IMPLIES = "=>"
    IFF = "<=>"


@dataclass(frozen=True)
class Formula:
    span: SourceSpan = field(default=NO_SPAN, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Compare(Formula):
    """Subset (``in``), NotSubset (``!in``), Equal (``=``), NotEqual (``!=``)."""

    op: CmpOp
    left: RelExpr
    right: RelExpr


@dataclass(frozen=True)
class MultTest(Formula):
    kind: MultKind
    expr: RelExpr


@dataclass(frozen=True)
class Quant(Formula):
    """Cuantificador de una sola variable; las listas se anidan al parsear."""

    kind: QuantKind
    var: str
    bound: RelExpr
    body: Formula


@dataclass(frozen=True)
class Not(Formula):
    formula: Formula


@dataclass(frozen=True)
class BinaryFormula(Formula):
    op: LogicOp
    left: Formula
    right: Formula


@dataclass(frozen=True)
class PredRef(Formula):
    """Uso de un predicado sin parámetros; ``body`` es la conjunción de sus líneas."""

    name: str
    body: Optional[Formula] = field(default=None, compare=False, repr=False, kw_only=True)


Node = Union[RelExpr, Formula]

TRUE_FORMULA = MultTest(MultKind.NO, NoneConst(arity=1))


def conjoin(formulas: Iterable[Formula]) -> Formula:
    """Conjunción asociada a la izquierda; la lista vacía es ``no none``."""
    resultado: Optional[Formula] = None
    for f in formulas:
        if resultado is None:
            resultado = f
        else:
            resultado = BinaryFormula(LogicOp.AND, resultado, f, span=resultado.span.through(f.span))
    return resultado if resultado is not None else TRUE_FORMULA


# ════════════════════════════════════════════════════════════
# 5. CONJUNTOS DE RESTRICCIONES Y MODELO
# ════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class Conjunct:
    """Una línea de un bloque ``fact`` o ``pred``."""

    owner: str
    index: int
    formula: Formula
    span: SourceSpan = field(default=NO_SPAN, compare=False, repr=False)

    @property
    def ref(self) -> tuple[str, int]:
        return (self.owner, self.index)

    @property
    def label(self) -> str:
        return f"{self.owner}[{self.index}]"


@dataclass(frozen=True)
class Model:
    """Modelo resuelto: declaraciones, hechos, predicados, aserciones, comandos."""

    sigs: tuple[SigDecl, ...]
    facts: tuple[Conjunct, ...] = ()
    preds: Mapping[str, tuple[Conjunct, ...]] = field(default_factory=dict)
    asserts: Mapping[str, Formula] = field(default_factory=dict)
    commands: tuple[Command, ...] = ()
    file: str = "<entrada>"

    def sig(self, name: str) -> Optional[SigDecl]:
        return next((s for s in self.sigs if s.name == name), None)

    def field_decl(self, name: str) -> Optional[FieldDecl]:
        return next((f for f in self.fields if f.name == name), None)

    @property
    def fields(self) -> tuple[FieldDecl, ...]:
        return tuple(f for s in self.sigs for f in s.fields)

    @property
    def sig_names(self) -> frozenset[str]:
        return frozenset(s.name for s in self.sigs)

    def relation_names(self) -> tuple[str, ...]:
        """Signaturas y luego campos, en orden de declaración."""
        return tuple(s.name for s in self.sigs) + tuple(f.name for f in self.fields)

    def pred_body(self, name: str) -> Formula:
        return conjoin(c.formula for c in self.preds[name])

    def all_conjuncts(self) -> tuple[Conjunct, ...]:
        return self.facts + tuple(c for cs in self.preds.values() for c in cs)

    def conjunct(self, ref: tuple[str, int]) -> Conjunct:
        for c in self.all_conjuncts():
            if c.ref == ref:
                return c
        raise KeyError(ref)

    def without_conjuncts(self, refs: Iterable[tuple[str, int]]) -> Model:
        """Copia del modelo sin los hechos indicados (los índices se conservan)."""
        quitar = set(refs)
        return replace(self, facts=tuple(c for c in self.facts if c.ref not in quitar))


# ════════════════════════════════════════════════════════════
# 6. AYUDANTES ESTÁTICOS
# ════════════════════════════════════════════════════════════


def arity_of(e: RelExpr) -> int:
    """Aridad de una expresión ya resuelta.

    Raises:
        FrontendError: composición mal tipada (p. ej. transpuesta de un unario).
    """
    match e:
        case RelName(kind=RelKind.SIG):
            return 1
        case RelName(kind=RelKind.FIELD):
            return 2
        case RelName(name=name):
            raise error_at(e.span, f"Nombre sin resolver: '{name}'")
        case VarRef() | NoneConst() | UnivConst():
            return 1
        case IdenConst():
            return 2
        case BinaryRel(op=RelOp.JOIN, left=l, right=r):
            suma = arity_of(l) + arity_of(r)
            if suma < 3:
                raise error_at(e.span, "El join de dos expresiones unarias no está definido")
            return suma - 2
        case BinaryRel(op=RelOp.PRODUCT, left=l, right=r):
            return arity_of(l) + arity_of(r)
        case BinaryRel(op=op, left=l, right=r):
            al, ar = arity_of(l), arity_of(r)
            if al != ar:
                raise error_at(e.span, f"Aridades distintas en '{op.value}': {al} y {ar}")
            return al
        case UnaryRel(op=op, expr=inner):
            if arity_of(inner) != 2:
                raise error_at(e.span, f"'{op.value}' requiere una relación binaria")
            return 2
    raise TypeError(f"Nodo desconocido: {e!r}")


def children(n: Node) -> tuple[Node, ...]:
    """Hijos inmediatos de un nodo (los de ``PredRef`` no se recorren)."""
    match n:
        case BinaryRel(left=l, right=r) | Compare(left=l, right=r) | BinaryFormula(left=l, right=r):
            return (l, r)
        case UnaryRel(expr=x) | MultTest(expr=x) | Not(formula=x):
            return (x,)
        case Quant(bound=b, body=body):
            return (b, body)
    return ()


def free_vars(n: Node) -> frozenset[str]:
    match n:
        case VarRef(name=name):
            return frozenset({name})
        case Quant(var=v, bound=b, body=body):
            return free_vars(b) | (free_vars(body) - {v})
        case PredRef():
            return frozenset()
    resultado: frozenset[str] = frozenset()
    for c in children(n):
        resultado |= free_vars(c)
    return resultado


def leaf_rel_subexprs(n: Node) -> list[RelExpr]:
    """Operandos relacionales máximos de comparaciones y pruebas de multiplicidad.

    Recorre los conectivos booleanos de izquierda a derecha; dentro de
    un cuantificador, la cota es una hoja más.
    """
    match n:
        case RelExpr():
            return [n]
        case Compare(left=l, right=r):
            return [l, r]
        case MultTest(expr=x):
            return [x]
        case Quant(bound=b, body=body):
            return [b] + leaf_rel_subexprs(body)
        case PredRef(body=body):
            return leaf_rel_subexprs(body) if body is not None else []
    hojas: list[RelExpr] = []
    for c in children(n):
        hojas.extend(leaf_rel_subexprs(c))
    return hojas


def relation_refs(n: Node) -> frozenset[str]:
    """Nombres de signaturas y campos mencionados (incluye cuerpos de predicados)."""
    match n:
        case RelName(name=name):
            return frozenset({name})
        case PredRef(body=body):
            return relation_refs(body) if body is not None else frozenset()
    resultado: frozenset[str] = frozenset()
    for c in children(n):
        resultado |= relation_refs(c)
    return resultado


def walk(n: Node) -> Iterator[Node]:
    """Pre-orden sobre el nodo y todos sus descendientes."""
    yield n
    for c in children(n):
        yield from walk(c)


def column_sigs(
    e: RelExpr,
    m: Model,
    var_sigs: Mapping[str, frozenset[str]],
) -> tuple[frozenset[str], ...]:
    """Firmas posibles de cada columna de ``e`` según los tipos declarados."""
    todas = m.sig_names
    match e:
        case RelName(name=name, kind=RelKind.SIG):
            return (frozenset({name}),)
        case RelName(name=name):
            decl = m.field_decl(name)
            if decl is None:
                return (todas, todas)
            return (frozenset({decl.owner}), frozenset({decl.target}))
        case VarRef(name=name):
            return (var_sigs.get(name, todas),)
        case NoneConst():
            return (frozenset(),)
        case UnivConst():
            return (todas,)
        case IdenConst():
            return (todas, todas)
        case BinaryRel(op=op, left=l, right=r):
            cl, cr = column_sigs(l, m, var_sigs), column_sigs(r, m, var_sigs)
            if op is RelOp.UNION:
                return tuple(a | b for a, b in zip(cl, cr))
            if op is RelOp.INTERSECT:
                return tuple(a & b for a, b in zip(cl, cr))
            if op is RelOp.DIFFERENCE:
                return cl
            if op is RelOp.JOIN:
                return cl[:-1] + cr[1:]
            return cl + cr
        case UnaryRel(op=UnaryOp.TRANSPOSE, expr=x):
            return tuple(reversed(column_sigs(x, m, var_sigs)))
        case UnaryRel(op=UnaryOp.TCLOSURE, expr=x):
            return column_sigs(x, m, var_sigs)
        case UnaryRel():
            return (todas, todas)
    raise TypeError(f"Nodo desconocido: {e!r}")


# ════════════════════════════════════════════════════════════
# 7. IMPRESIÓN
#    Paréntesis mínimos según la precedencia del parser.
# ════════════════════════════════════════════════════════════

_NIVEL_REL = {
    RelOp.UNION: 1,
    RelOp.DIFFERENCE: 1,
    RelOp.INTERSECT: 2,
    RelOp.PRODUCT: 3,
    RelOp.JOIN: 4,
}
_NIVEL_UNARIO = 5
_NIVEL_ATOMO = 6

_NIVEL_LOGICO = {
    LogicOp.IFF: 1,
    LogicOp.IMPLIES: 2,
    LogicOp.OR: 3,
    LogicOp.AND: 4,
}
_NIVEL_NOT = 5


def _imprimir_rel(e: RelExpr) -> tuple[str, int]:
    match e:
        case RelName(name=name) | VarRef(name=name):
            return name, _NIVEL_ATOMO
        case NoneConst():
            return "none", _NIVEL_ATOMO
        case UnivConst():
            return "univ", _NIVEL_ATOMO
        case IdenConst():
            return "iden", _NIVEL_ATOMO
        case UnaryRel(op=op, expr=x):
            texto, nivel = _imprimir_rel(x)
            if nivel < _NIVEL_UNARIO:
                texto = f"({texto})"
            return f"{op.value}{texto}", _NIVEL_UNARIO
        case BinaryRel(op=op, left=l, right=r):
            nivel = _NIVEL_REL[op]
            tl, nl = _imprimir_rel(l)
            tr, nr = _imprimir_rel(r)
            if nl < nivel:
                tl = f"({tl})"
            if nr <= nivel:
                tr = f"({tr})"
            sep = "." if op is RelOp.JOIN else f" {op.value} "
            return f"{tl}{sep}{tr}", nivel
    raise TypeError(f"Nodo desconocido: {e!r}")


def _imprimir_formula(f: Formula) -> tuple[str, int]:
    match f:
        case Compare(op=op, left=l, right=r):
            return f"{_imprimir_rel(l)[0]} {op.value} {_imprimir_rel(r)[0]}", _NIVEL_ATOMO
        case MultTest(kind=kind, expr=x):
            return f"{kind.value} {_imprimir_rel(x)[0]}", _NIVEL_ATOMO
        case PredRef(name=name):
            return name, _NIVEL_ATOMO
        case Quant(kind=kind, var=v, bound=b, body=body):
            return f"{kind.value} {v}: {_imprimir_rel(b)[0]} | {_imprimir_formula(body)[0]}", 0
        case Not(formula=x):
            texto, nivel = _imprimir_formula(x)
            if nivel < _NIVEL_NOT:
                texto = f"({texto})"
            return f"!{texto}", _NIVEL_NOT
        case BinaryFormula(op=op, left=l, right=r):
            nivel = _NIVEL_LOGICO[op]
            tl, nl = _imprimir_formula(l)
            tr, nr = _imprimir_formula(r)
            # "=>" asocia a la derecha; el resto a la izquierda
            izq_estricto = op is LogicOp.IMPLIES
            if nl == 0 or nl < nivel or (izq_estricto and nl == nivel):
                tl = f"({tl})"
            if nr == 0 or nr < nivel or (not izq_estricto and nr == nivel):
                tr = f"({tr})"
            return f"{tl} {op.value} {tr}", nivel
    raise TypeError(f"Nodo desconocido: {f!r}")


def pretty(n: Node) -> str:
    """Texto fuente equivalente al nodo, re-parseable."""
    if isinstance(n, RelExpr):
        return _imprimir_rel(n)[0]
    return _imprimir_formula(n)[0]


# ════════════════════════════════════════════════════════════
# 8. ÁTOMOS E INSTANCIAS
# ════════════════════════════════════════════════════════════


@dataclass(frozen=True, order=True)
class Atom:
    """Elemento ``SigName + índice`` del universo acotado."""

    sig: str
    index: int

    @property
    def name(self) -> str:
        return f"{self.sig}{self.index}"

    def __str__(self) -> str:
        return self.name


Tuple = tuple[Atom, ...]


@dataclass(frozen=True, eq=False)
class Instance:
    """Asignación concreta de cada relación a un conjunto de tuplas.

    ``sig_contents`` guarda átomos; ``field_contents`` pares. Las
    entradas vacías son equivalentes a entradas ausentes.
    """

    sig_contents: Mapping[str, frozenset[Atom]]
    field_contents: Mapping[str, frozenset[tuple[Atom, Atom]]]

    @property
    def universe(self) -> tuple[Atom, ...]:
        atomos: set[Atom] = set()
        for contenido in self.sig_contents.values():
            atomos |= contenido
        return tuple(sorted(atomos))

    def relation(self, name: str) -> frozenset[Tuple]:
        """Tuplas de una relación; las signaturas devuelven 1-tuplas."""
        if name in self.sig_contents:
            return frozenset((a,) for a in self.sig_contents[name])
        return frozenset(self.field_contents.get(name, frozenset()))

    def relation_names(self) -> tuple[str, ...]:
        return tuple(self.sig_contents) + tuple(self.field_contents)

    def _clave(self) -> tuple:
        sigs = tuple(sorted((k, frozenset(v)) for k, v in self.sig_contents.items() if v))
        campos = tuple(sorted((k, frozenset(v)) for k, v in self.field_contents.items() if v))
        return (sigs, campos)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return self._clave() == other._clave()

    def __hash__(self) -> int:
        return hash(self._clave())


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    """Codificación JSON: ``{"universe", "sigs", "fields"}`` con nombres de átomos."""
    return {
        "universe": [a.name for a in inst.universe],
        "sigs": {
            nombre: [a.name for a in sorted(atomos)]
            for nombre, atomos in inst.sig_contents.items()
        },
        "fields": {
            nombre: [[a.name, b.name] for a, b in sorted(tuplas)]
            for nombre, tuplas in inst.field_contents.items()
        },
    }


def _parsear_atomo(texto: Any, sig: str) -> Atom:
    if not isinstance(texto, str) or not texto.startswith(sig):
        raise FixtureError(f"Átomo '{texto}' no pertenece a la signatura '{sig}'")
    resto = texto[len(sig):]
    if not re.fullmatch(r"\d+", resto):
        raise FixtureError(f"Átomo '{texto}' no tiene la forma {sig}<índice>")
    return Atom(sig, int(resto))


def instance_from_dict(data: Any, m: Model) -> Instance:
    """Decodifica una instancia JSON contra las declaraciones de ``m``.

    Raises:
        FixtureError: estructura inválida, nombres desconocidos o átomos
            de campos que no aparecen en ninguna signatura.
    """
    if not isinstance(data, dict) or not isinstance(data.get("sigs", {}), dict):
        raise FixtureError("La instancia debe ser un objeto con 'sigs' y 'fields'")
    sigs_json = data.get("sigs", {})
    campos_json = data.get("fields", {})
    if not isinstance(campos_json, dict):
        raise FixtureError("'fields' debe ser un objeto")

    desconocidas = set(sigs_json) - m.sig_names
    if desconocidas:
        raise FixtureError("Signaturas desconocidas en la instancia", {"sigs": sorted(desconocidas)})
    campos_validos = {f.name for f in m.fields}
    desconocidos = set(campos_json) - campos_validos
    if desconocidos:
        raise FixtureError("Campos desconocidos en la instancia", {"fields": sorted(desconocidos)})

    sig_contents: dict[str, frozenset[Atom]] = {}
    por_nombre: dict[str, Atom] = {}
    for s in m.sigs:
        atomos = frozenset(_parsear_atomo(t, s.name) for t in sigs_json.get(s.name, []))
        sig_contents[s.name] = atomos
        por_nombre.update({a.name: a for a in atomos})

    field_contents: dict[str, frozenset[tuple[Atom, Atom]]] = {}
    for f in m.fields:
        tuplas = set()
        for par in campos_json.get(f.name, []):
            if not isinstance(par, list) or len(par) != 2:
                raise FixtureError(f"Tupla inválida en '{f.name}': {par!r}")
            try:
                tuplas.add((por_nombre[par[0]], por_nombre[par[1]]))
            except KeyError as exc:
                raise FixtureError(
                    f"Átomo {exc.args[0]!r} de '{f.name}' no está en ninguna signatura"
                ) from exc
        field_contents[f.name] = frozenset(tuplas)

    inst = Instance(sig_contents, field_contents)
    if "universe" in data and sorted(data["universe"]) != sorted(a.name for a in inst.universe):
        raise FixtureError("'universe' no coincide con los átomos de las signaturas")
    return inst
