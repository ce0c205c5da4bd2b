"""
evaluator.py — Evaluación concreta de expresiones y fórmulas sobre instancias.

Responsabilidades:
  1. ``eval_rel`` / ``eval_formula``: semántica relacional estándar bajo una
     ligadura de variables.
  2. ``involved_atoms``: átomos de la ligadura y de las hojas evaluadas de
     un nodo (base del puntaje relacional).
  3. ``guarded_instantiate``: despoja la cadena externa de cuantificadores
     y liga sus variables a átomos concretos.
  4. ``check_instance``: lista de violaciones de tipado, multiplicidad y
     hechos de una instancia.
  5. ``enumerate_instances``: oráculo de fuerza bruta para pruebas.

Principios de diseño:
  • Funciones puras: las instancias son inmutables.
  • El universo de una instancia son los átomos presentes en alguna
    signatura; ``univ`` e ``iden`` se evalúan sobre ese universo.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from config import ENUM_MAX_VARS
from exceptions import EnumerationBudgetError, InternalError
from grounder import build_bounds, build_var_map
from model import (
    Atom,
    BinaryFormula,
    BinaryRel,
    CmpOp,
    Compare,
    Conjunct,
    Formula,
    IdenConst,
    Instance,
    LogicOp,
    Model,
    MultKind,
    MultTest,
    Multiplicity,
    Node,
    NoneConst,
    Not,
    PredRef,
    Quant,
    QuantKind,
    RelExpr,
    RelKind,
    RelName,
    RelOp,
    Tuple,
    UnaryOp,
    UnaryRel,
    UnivConst,
    VarRef,
    arity_of,
    children,
    column_sigs,
    free_vars,
    leaf_rel_subexprs,
)

logger = logging.getLogger(__name__)

Binding = Mapping[str, Atom]


# ════════════════════════════════════════════════════════════
# 1. CONJUNTOS DE TUPLAS
# ════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class TupleSet:
    arity: int
    tuples: frozenset[Tuple]

    def atoms(self) -> frozenset[Atom]:
        return frozenset(a for t in self.tuples for a in t)

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self) -> Iterator[Tuple]:
        return iter(sorted(self.tuples))

    def __contains__(self, t: object) -> bool:
        return t in self.tuples


def _join(izq: frozenset[Tuple], der: frozenset[Tuple]) -> frozenset[Tuple]:
    por_primera: dict[Atom, list[Tuple]] = {}
    for t in der:
        por_primera.setdefault(t[0], []).append(t)
    return frozenset(
        a[:-1] + b[1:] for a in izq for b in por_primera.get(a[-1], ())
    )


def _clausura(r: frozenset[Tuple]) -> frozenset[Tuple]:
    resultado = r
    while True:
        nuevo = resultado | _join(resultado, r)
        if nuevo == resultado:
            return resultado
        resultado = nuevo


def _aridad(e: RelExpr) -> int:
    return e.arity or arity_of(e)


# ════════════════════════════════════════════════════════════
# 2. EVALUACIÓN
# ════════════════════════════════════════════════════════════


def eval_rel(e: RelExpr, inst: Instance, b: Binding) -> TupleSet:
    """Valor de una expresión relacional en ``inst`` bajo la ligadura ``b``.

    Raises:
        InternalError: si ``e`` usa una variable que ``b`` no liga.
    """
    match e:
        case RelName(name=name, kind=kind):
            aridad = e.arity or (1 if kind is RelKind.SIG or name in inst.sig_contents else 2)
            return TupleSet(aridad, inst.relation(name))
        case VarRef(name=name):
            if name not in b:
                raise InternalError("Variable sin ligar", {"variable": name})
            return TupleSet(1, frozenset({(b[name],)}))
        case NoneConst():
            return TupleSet(1, frozenset())
        case UnivConst():
            return TupleSet(1, frozenset((a,) for a in inst.universe))
        case IdenConst():
            return TupleSet(2, frozenset((a, a) for a in inst.universe))
        case BinaryRel(op=op, left=l, right=r):
            tl, tr = eval_rel(l, inst, b).tuples, eval_rel(r, inst, b).tuples
            if op is RelOp.UNION:
                tuplas = tl | tr
            elif op is RelOp.DIFFERENCE:
                tuplas = tl - tr
            elif op is RelOp.INTERSECT:
                tuplas = tl & tr
            elif op is RelOp.JOIN:
                tuplas = _join(tl, tr)
            else:
                tuplas = frozenset(a + c for a in tl for c in tr)
            return TupleSet(_aridad(e), tuplas)
        case UnaryRel(op=op, expr=x):
            tx = eval_rel(x, inst, b).tuples
            if op is UnaryOp.TRANSPOSE:
                return TupleSet(2, frozenset((t[1], t[0]) for t in tx))
            cierre = _clausura(tx)
            if op is UnaryOp.RTCLOSURE:
                cierre |= frozenset((a, a) for a in inst.universe)
            return TupleSet(2, cierre)
    raise TypeError(f"Nodo desconocido: {e!r}")


def eval_formula(f: Formula, inst: Instance, b: Binding) -> bool:
    """Valor de verdad de ``f`` en ``inst`` bajo la ligadura ``b``."""
    match f:
        case Compare(op=op, left=l, right=r):
            tl, tr = eval_rel(l, inst, b).tuples, eval_rel(r, inst, b).tuples
            if op is CmpOp.IN:
                return tl <= tr
            if op is CmpOp.NOT_IN:
                return not tl <= tr
            if op is CmpOp.EQ:
                return tl == tr
            return tl != tr
        case MultTest(kind=kind, expr=x):
            n = len(eval_rel(x, inst, b))
            return {
                MultKind.NO: n == 0,
                MultKind.SOME: n > 0,
                MultKind.LONE: n <= 1,
                MultKind.ONE: n == 1,
            }[kind]
        case Quant(kind=kind, var=v, bound=bound, body=body):
            atomos = [t[0] for t in eval_rel(bound, inst, b)]
            valores = (eval_formula(body, inst, {**b, v: a}) for a in atomos)
            if kind is QuantKind.ALL:
                return all(valores)
            if kind is QuantKind.SOME:
                return any(valores)
            return not any(valores)
        case Not(formula=x):
            return not eval_formula(x, inst, b)
        case BinaryFormula(op=op, left=l, right=r):
            if op is LogicOp.AND:
                return eval_formula(l, inst, b) and eval_formula(r, inst, b)
            if op is LogicOp.OR:
                return eval_formula(l, inst, b) or eval_formula(r, inst, b)
            if op is LogicOp.IMPLIES:
                return (not eval_formula(l, inst, b)) or eval_formula(r, inst, b)
            return eval_formula(l, inst, b) == eval_formula(r, inst, b)
        case PredRef(body=body):
            return True if body is None else eval_formula(body, inst, b)
    raise TypeError(f"Nodo desconocido: {f!r}")


def _cuantificadores(n: Node) -> list[Quant]:
    match n:
        case Quant(body=body):
            return [n] + _cuantificadores(body)
        case PredRef(body=body):
            return _cuantificadores(body) if body is not None else []
        case RelExpr() | Compare() | MultTest():
            return []
    return [q for c in children(n) for q in _cuantificadores(c)]


def _ligaduras(
    libres: frozenset[str],
    cotas: Mapping[str, RelExpr],
    orden: list[str],
    inst: Instance,
    b: Binding,
) -> Iterator[Binding]:
    """Extensiones de ``b`` a las variables internas de ``libres``, cada una sobre su cota.

    Las variables internas ocultan a las de ``b``; las externas se ligan primero.
    """
    necesarias: set[str] = set()
    pendientes = set(libres)
    while pendientes:
        v = pendientes.pop()
        if v in necesarias or v not in cotas:
            continue
        necesarias.add(v)
        pendientes |= free_vars(cotas[v])
    secuencia = sorted(necesarias, key=orden.index)

    def extender(i: int, actual: Binding) -> Iterator[Binding]:
        if i == len(secuencia):
            yield actual
            return
        v = secuencia[i]
        for (a,) in eval_rel(cotas[v], inst, actual):
            yield from extender(i + 1, {**actual, v: a})

    yield from extender(0, dict(b))


def involved_atoms(n: Node, inst: Instance, b: Binding) -> frozenset[Atom]:
    """Átomos ligados a variables libres de ``n`` más los de sus hojas evaluadas.

    Las hojas son las de ``leaf_rel_subexprs``. Una hoja que menciona la
    variable de un cuantificador interno se evalúa con cada átomo de su
    cota; si no la menciona, una sola vez.
    """
    cuants = _cuantificadores(n)
    cotas = {q.var: q.bound for q in cuants}
    orden = [q.var for q in cuants]
    atomos = {b[v] for v in free_vars(n) if v in b}
    for hoja in leaf_rel_subexprs(n):
        for ligadura in _ligaduras(free_vars(hoja), cotas, orden, inst, b):
            atomos |= eval_rel(hoja, inst, ligadura).atoms()
    return frozenset(atomos)


# ════════════════════════════════════════════════════════════
# 3. INSTANCIACIÓN CON GUARDAS
# ════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class QuantPrefix:
    """Cadena externa de cuantificadores ya despojada de una fórmula."""

    variables: tuple[tuple[str, RelExpr, QuantKind], ...]
    body: Formula

    @property
    def universal(self) -> bool:
        return all(k is QuantKind.ALL for _, _, k in self.variables)


def strip_quantifiers(f: Formula) -> QuantPrefix:
    variables = []
    while isinstance(f, Quant):
        variables.append((f.var, f.bound, f.kind))
        f = f.body
    return QuantPrefix(tuple(variables), f)


@dataclass(frozen=True)
class Instantiation:
    binding: dict[str, Atom]
    body: Formula
    guards: tuple[tuple[str, RelExpr], ...]

    def guards_hold(self, inst: Instance) -> bool:
        """``True`` si cada variable pertenece a su cota en ``inst``."""
        return all(
            (self.binding[v],) in eval_rel(cota, inst, self.binding)
            for v, cota in self.guards
        )


def guarded_instantiate(
    c: Conjunct, atoms: Sequence[Atom], m: Model
) -> Optional[Instantiation]:
    """Liga posicionalmente las variables externas de ``c`` a ``atoms``.

    Returns:
        La instanciación, o ``None`` si algún átomo no es compatible con
        la firma estática de su cota (el llamador descarta la combinación).

    Raises:
        InternalError: si el número de átomos no coincide con el de variables.
    """
    prefijo = strip_quantifiers(c.formula)
    if len(atoms) != len(prefijo.variables):
        raise InternalError(
            "Número de átomos distinto al de variables",
            {"conjuncion": c.label, "variables": len(prefijo.variables), "atomos": len(atoms)},
        )
    firmas: dict[str, frozenset[str]] = {}
    for (v, cota, _), a in zip(prefijo.variables, atoms):
        if a.sig not in column_sigs(cota, m, firmas)[0]:
            return None
        firmas[v] = frozenset({a.sig})
    return Instantiation(
        binding={v: a for (v, _, _), a in zip(prefijo.variables, atoms)},
        body=prefijo.body,
        guards=tuple((v, cota) for v, cota, _ in prefijo.variables),
    )


def compatible_instantiations(
    c: Conjunct, atoms: Iterable[Atom], m: Model
) -> list[Instantiation]:
    """Todas las instanciaciones de ``c`` con átomos de ``atoms`` (con repetición)."""
    ordenados = sorted(atoms)
    n = len(strip_quantifiers(c.formula).variables)
    resultado = []
    for combinacion in itertools.product(ordenados, repeat=n):
        inst = guarded_instantiate(c, combinacion, m)
        if inst is not None:
            resultado.append(inst)
    return resultado


# ════════════════════════════════════════════════════════════
# 4. VALIDACIÓN DE INSTANCIAS
# ════════════════════════════════════════════════════════════


def _cumple(mult: Multiplicity, n: int) -> bool:
    if mult is Multiplicity.ONE:
        return n == 1
    if mult is Multiplicity.LONE:
        return n <= 1
    if mult is Multiplicity.SOME:
        return n >= 1
    return True


def check_instance(m: Model, inst: Instance) -> list[str]:
    """Violaciones de declaraciones y hechos; vacía si ``inst`` es válida."""
    problemas: list[str] = []
    for s in m.sigs:
        contenido = inst.sig_contents.get(s.name, frozenset())
        ajenos = sorted(a.name for a in contenido if a.sig != s.name)
        if ajenos:
            problemas.append(f"{s.name} contiene átomos ajenos: {ajenos}")
        if not _cumple(s.mult, len(contenido)):
            problemas.append(f"{s.name} tiene {len(contenido)} átomos (multiplicidad {s.mult.value})")

    for f in m.fields:
        duenos = inst.sig_contents.get(f.owner, frozenset())
        destinos = inst.sig_contents.get(f.target, frozenset())
        tuplas = inst.field_contents.get(f.name, frozenset())
        for o, t in sorted(tuplas):
            if o not in duenos or t not in destinos:
                problemas.append(f"{f.name} contiene {o}->{t} fuera de {f.owner}->{f.target}")
        for o in sorted(duenos):
            n = sum(1 for (x, _) in tuplas if x == o)
            if not _cumple(f.mult, n):
                problemas.append(f"{o}.{f.name} tiene {n} tuplas (multiplicidad {f.mult.value})")

    if not problemas:
        for c in m.facts:
            if not eval_formula(c.formula, inst, {}):
                problemas.append(f"hecho {c.label} ({c.span}) es falso")
    return problemas


# ════════════════════════════════════════════════════════════
# 5. ORÁCULO DE ENUMERACIÓN
# ════════════════════════════════════════════════════════════


def _subconjuntos(pool: Sequence, mult: Multiplicity) -> list[frozenset]:
    resultado = []
    for mascara in range(1 << len(pool)):
        elegido = frozenset(x for i, x in enumerate(pool) if mascara >> i & 1)
        if _cumple(mult, len(elegido)):
            resultado.append(elegido)
    return resultado


def _opciones_campo(duenos: Sequence[Atom], destinos: Sequence[Atom], mult: Multiplicity) -> list[frozenset]:
    por_dueno = [
        [frozenset((o, t) for t in sub) for sub in _subconjuntos(destinos, mult)]
        for o in duenos
    ]
    return [frozenset().union(*eleccion) for eleccion in itertools.product(*por_dueno)]


def enumerate_instances(
    m: Model, scope: int, filter: Optional[Formula] = None
) -> list[Instance]:
    """Todas las instancias válidas de ``m`` al alcance dado, en orden fijo.

    Raises:
        EnumerationBudgetError: si hay más de ``ENUM_MAX_VARS`` variables
            relacionales.
    """
    bounds = build_bounds(m, scope)
    n_vars = build_var_map(m, bounds).num_vars
    if n_vars > ENUM_MAX_VARS:
        raise EnumerationBudgetError(
            "Demasiadas variables para enumerar",
            {"variables": n_vars, "limite": ENUM_MAX_VARS},
        )

    opciones_sig = []
    for s in m.sigs:
        pool = bounds.sig_atoms[s.name]
        if s.mult is Multiplicity.ONE:
            opciones_sig.append([frozenset(pool)])
        else:
            opciones_sig.append(_subconjuntos(pool, s.mult))

    resultado: list[Instance] = []
    for eleccion in itertools.product(*opciones_sig):
        sig_contents = {s.name: contenido for s, contenido in zip(m.sigs, eleccion)}
        opciones = [
            _opciones_campo(
                sorted(sig_contents[f.owner]), sorted(sig_contents[f.target]), f.mult
            )
            for f in m.fields
        ]
        for campos in itertools.product(*opciones):
            inst = Instance(dict(sig_contents), {f.name: t for f, t in zip(m.fields, campos)})
            if not all(eval_formula(c.formula, inst, {}) for c in m.facts):
                continue
            if filter is not None and not eval_formula(filter, inst, {}):
                continue
            resultado.append(inst)

    logger.debug("Enumeración a alcance %d: %d instancias (%d variables).", scope, len(resultado), n_vars)
    return resultado
