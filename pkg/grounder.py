"""
grounder.py — Traducción de un modelo acotado a CNF con procedencia por grupos.

Responsabilidades:
  1. ``build_bounds`` / ``build_var_map``: átomos por signatura y una variable
     booleana por tupla posible de cada relación.
  2. ``Circuit``: compuertas AND/OR con negación por signo, plegado de
     constantes y compartición estructural.
  3. ``translate_rel`` / ``translate_formula``: matrices booleanas
     (join como OR de ANDs, clausura por elevación al cuadrado).
  4. ``ground``: un grupo de cláusulas por declaración, por hecho y por la
     propiedad; Tseitin para llevar los circuitos a CNF.
  5. ``decode`` / ``encode_instance``: asignación ↔ instancia.
  6. ``load_into`` y ``write_dimacs``: carga con selectores y volcado DIMACS.

Principios de diseño:
  • Las pertenencias a signaturas ``one`` son constantes, no variables.
  • Las definiciones de Tseitin forman su propio grupo sin selector: quitar
    un grupo nunca deja sin definir una compuerta que otro grupo usa.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping, Optional, Sequence, TextIO, Union

from exceptions import ConfigError
from model import (
    Atom,
    BinaryFormula,
    BinaryRel,
    CmpOp,
    Compare,
    Formula,
    IdenConst,
    Instance,
    LogicOp,
    Model,
    MultKind,
    MultTest,
    Multiplicity,
    NO_SPAN,
    NoneConst,
    Not,
    PredRef,
    Quant,
    QuantKind,
    RelExpr,
    RelKind,
    RelName,
    RelOp,
    SourceSpan,
    Tuple,
    UnaryOp,
    UnaryRel,
    UnivConst,
    VarRef,
    free_vars,
    pretty,
)

if TYPE_CHECKING:
    from sat import Solver

logger = logging.getLogger(__name__)

Value = Union[bool, int]
Clause = list[int]


# ════════════════════════════════════════════════════════════
# 1. COTAS Y MAPA DE VARIABLES
# ════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class Bounds:
    """Átomos disponibles por signatura y tuplas posibles por campo.

    Attributes:
        scope:        Alcance usado.
        sig_atoms:    Signatura → átomos ``Sig0..Sig{k-1}`` (1 si es ``one``).
        fixed:        Signaturas cuya pertenencia es constante (``one``).
        field_pools:  Campo → tuplas ``dueño × destino``.
    """

    scope: int
    sig_atoms: Mapping[str, tuple[Atom, ...]]
    fixed: frozenset[str]
    field_pools: Mapping[str, tuple[tuple[Atom, Atom], ...]]

    @property
    def universe(self) -> tuple[Atom, ...]:
        return tuple(a for atomos in self.sig_atoms.values() for a in atomos)

    def pool(self, relation: str) -> tuple[Tuple, ...]:
        if relation in self.sig_atoms:
            return tuple((a,) for a in self.sig_atoms[relation])
        return self.field_pools[relation]


def build_bounds(m: Model, scope: int) -> Bounds:
    """Átomos ``SigName0..`` por signatura; ``one`` recibe exactamente uno."""
    if scope < 1:
        raise ConfigError("El alcance debe ser ≥ 1", {"alcance": scope})
    sig_atoms = {
        s.name: tuple(Atom(s.name, i) for i in range(1 if s.mult is Multiplicity.ONE else scope))
        for s in m.sigs
    }
    field_pools = {
        f.name: tuple((o, t) for o in sig_atoms[f.owner] for t in sig_atoms[f.target])
        for f in m.fields
    }
    fixed = frozenset(s.name for s in m.sigs if s.mult is Multiplicity.ONE)
    return Bounds(scope, sig_atoms, fixed, field_pools)


@dataclass(frozen=True)
class VarMap:
    """Biyección (relación, tupla) ↔ variable, ids contiguos desde 1."""

    keys: tuple[tuple[str, Tuple], ...]
    ids: Mapping[tuple[str, Tuple], int]

    @property
    def num_vars(self) -> int:
        return len(self.keys)

    def var(self, relation: str, t: Tuple) -> Optional[int]:
        return self.ids.get((relation, t))

    def key(self, var: int) -> tuple[str, Tuple]:
        return self.keys[var - 1]

    def variables(self) -> range:
        return range(1, len(self.keys) + 1)


def build_var_map(m: Model, bounds: Bounds) -> VarMap:
    """Primero pertenencias a signaturas, luego campos, en orden de declaración."""
    claves: list[tuple[str, Tuple]] = []
    for s in m.sigs:
        if s.name not in bounds.fixed:
            claves.extend((s.name, (a,)) for a in bounds.sig_atoms[s.name])
    for f in m.fields:
        claves.extend((f.name, t) for t in bounds.field_pools[f.name])
    return VarMap(tuple(claves), {k: i for i, k in enumerate(claves, start=1)})


# ════════════════════════════════════════════════════════════
# 2. CIRCUITOS BOOLEANOS
#    Un valor es True/False o un literal entero (negativo = negado).
# ════════════════════════════════════════════════════════════


class Circuit:
    """Fábrica de compuertas con plegado de constantes y caché estructural."""

    def __init__(self, first_label: int) -> None:
        self.next_label = first_label
        self.gates: dict[int, tuple[str, tuple[int, ...]]] = {}
        self._cache: dict[tuple[str, tuple[int, ...]], int] = {}
        self._defined: set[int] = set()

    @staticmethod
    def not_(a: Value) -> Value:
        if a is True:
            return False
        if a is False:
            return True
        return -a

    def and_(self, *xs: Value) -> Value:
        return self._gate("and", xs)

    def or_(self, *xs: Value) -> Value:
        return self._gate("or", xs)

    def implies(self, a: Value, b: Value) -> Value:
        return self.or_(self.not_(a), b)

    def iff(self, a: Value, b: Value) -> Value:
        return self.and_(self.implies(a, b), self.implies(b, a))

    def _gate(self, op: str, xs: Iterable[Value]) -> Value:
        neutro = op == "and"
        absorbente = not neutro
        hijos: set[int] = set()
        for x in xs:
            if x is absorbente:
                return absorbente
            if x is neutro:
                continue
            if -x in hijos:
                return absorbente
            hijos.add(x)
        if not hijos:
            return neutro
        if len(hijos) == 1:
            return next(iter(hijos))
        clave = (op, tuple(sorted(hijos)))
        label = self._cache.get(clave)
        if label is None:
            label = self.next_label
            self.next_label += 1
            self._cache[clave] = label
            self.gates[label] = clave
        return label

    def define(self, root: Value) -> list[Clause]:
        """Cláusulas de Tseitin de las compuertas alcanzables aún no definidas."""
        if isinstance(root, bool):
            return []
        clausulas: list[Clause] = []
        pila = [abs(root)]
        while pila:
            g = pila.pop()
            if g not in self.gates or g in self._defined:
                continue
            self._defined.add(g)
            op, hijos = self.gates[g]
            if op == "and":
                clausulas.extend([-g, c] for c in hijos)
                clausulas.append([g] + [-c for c in hijos])
            else:
                clausulas.extend([g, -c] for c in hijos)
                clausulas.append([-g] + list(hijos))
            pila.extend(abs(c) for c in hijos)
        return clausulas

    def evaluate(self, v: Value, assignment: Mapping[int, bool]) -> bool:
        """Valor de ``v`` dadas las variables de entrada (pruebas y depuración)."""
        memo: dict[int, bool] = {}

        def valor(x: Value) -> bool:
            if isinstance(x, bool):
                return x
            g = abs(x)
            if g not in memo:
                if g in self.gates:
                    op, hijos = self.gates[g]
                    valores = (valor(c) for c in hijos)
                    memo[g] = all(valores) if op == "and" else any(valores)
                else:
                    memo[g] = assignment[g]
            return memo[g] if x > 0 else not memo[g]

        return valor(v)


# ════════════════════════════════════════════════════════════
# 3. MATRICES BOOLEANAS Y TRADUCCIÓN
# ════════════════════════════════════════════════════════════


@dataclass
class BooleanMatrix:
    """Tupla → valor booleano; una clave ausente vale ``False``."""

    arity: int
    entries: dict[Tuple, Value] = field(default_factory=dict)

    def get(self, t: Tuple) -> Value:
        return self.entries.get(t, False)

    def put(self, t: Tuple, v: Value) -> None:
        if v is False:
            self.entries.pop(t, None)
        else:
            self.entries[t] = v


class Translator:
    """Traduce expresiones y fórmulas resueltas a valores de un ``Circuit``."""

    def __init__(self, bounds: Bounds, var_map: VarMap, circuit: Circuit) -> None:
        self.bounds = bounds
        self.var_map = var_map
        self.c = circuit
        self._cache: dict[RelExpr, BooleanMatrix] = {}

    def member(self, a: Atom) -> Value:
        if a.sig in self.bounds.fixed:
            return True
        v = self.var_map.var(a.sig, (a,))
        return v if v is not None else False

    def rel(self, e: RelExpr, env: Mapping[str, Atom]) -> BooleanMatrix:
        cerrada = not free_vars(e)
        if cerrada and e in self._cache:
            return self._cache[e]
        matriz = self._rel(e, env)
        if cerrada:
            self._cache[e] = matriz
        return matriz

    def _rel(self, e: RelExpr, env: Mapping[str, Atom]) -> BooleanMatrix:
        c = self.c
        match e:
            case RelName(name=name, kind=RelKind.SIG) if name in self.bounds.fixed:
                return BooleanMatrix(1, {(a,): True for a in self.bounds.sig_atoms[name]})
            case RelName(name=name):
                resultado = BooleanMatrix(1 if e.kind is RelKind.SIG else 2)
                for t in self.bounds.pool(name):
                    resultado.put(t, self.var_map.var(name, t))
                return resultado
            case VarRef(name=name):
                return BooleanMatrix(1, {(env[name],): True})
            case NoneConst():
                return BooleanMatrix(1)
            case UnivConst():
                resultado = BooleanMatrix(1)
                for a in self.bounds.universe:
                    resultado.put((a,), self.member(a))
                return resultado
            case IdenConst():
                return self._identidad()
            case BinaryRel(op=op, left=l, right=r):
                ml, mr = self.rel(l, env), self.rel(r, env)
                if op is RelOp.UNION:
                    return self._union(ml, mr)
                if op is RelOp.INTERSECT:
                    resultado = BooleanMatrix(ml.arity)
                    for t, v in ml.entries.items():
                        resultado.put(t, c.and_(v, mr.get(t)))
                    return resultado
                if op is RelOp.DIFFERENCE:
                    resultado = BooleanMatrix(ml.arity)
                    for t, v in ml.entries.items():
                        resultado.put(t, c.and_(v, c.not_(mr.get(t))))
                    return resultado
                if op is RelOp.JOIN:
                    return self._join(ml, mr)
                resultado = BooleanMatrix(ml.arity + mr.arity)
                for tl, vl in ml.entries.items():
                    for tr, vr in mr.entries.items():
                        resultado.put(tl + tr, c.and_(vl, vr))
                return resultado
            case UnaryRel(op=op, expr=x):
                mx = self.rel(x, env)
                if op is UnaryOp.TRANSPOSE:
                    return BooleanMatrix(2, {(t[1], t[0]): v for t, v in mx.entries.items()})
                cierre = self._clausura(mx)
                if op is UnaryOp.RTCLOSURE:
                    cierre = self._union(cierre, self._identidad())
                return cierre
        raise TypeError(f"Nodo desconocido: {e!r}")

    def _identidad(self) -> BooleanMatrix:
        resultado = BooleanMatrix(2)
        for a in self.bounds.universe:
            resultado.put((a, a), self.member(a))
        return resultado

    def _union(self, ml: BooleanMatrix, mr: BooleanMatrix) -> BooleanMatrix:
        resultado = BooleanMatrix(ml.arity)
        for t in ml.entries.keys() | mr.entries.keys():
            resultado.put(t, self.c.or_(ml.get(t), mr.get(t)))
        return resultado

    def _join(self, ml: BooleanMatrix, mr: BooleanMatrix) -> BooleanMatrix:
        por_primera: dict[Atom, list[tuple[Tuple, Value]]] = {}
        for t, v in mr.entries.items():
            por_primera.setdefault(t[0], []).append((t, v))
        terminos: dict[Tuple, list[Value]] = {}
        for tl, vl in ml.entries.items():
            for tr, vr in por_primera.get(tl[-1], ()):
                terminos.setdefault(tl[:-1] + tr[1:], []).append(self.c.and_(vl, vr))
        resultado = BooleanMatrix(ml.arity + mr.arity - 2)
        for t in sorted(terminos):
            resultado.put(t, self.c.or_(*terminos[t]))
        return resultado

    def _clausura(self, m: BooleanMatrix) -> BooleanMatrix:
        # R ∪ R·R repetido ⌈log2 n⌉ veces cubre caminos de largo ≤ n
        resultado = m
        largo = 1
        while largo < len(self.bounds.universe):
            resultado = self._union(resultado, self._join(resultado, resultado))
            largo *= 2
        return resultado

    def formula(self, f: Formula, env: Mapping[str, Atom]) -> Value:
        c = self.c
        match f:
            case Compare(op=op, left=l, right=r):
                ml, mr = self.rel(l, env), self.rel(r, env)
                if op in (CmpOp.IN, CmpOp.NOT_IN):
                    valor = self._subconjunto(ml, mr)
                else:
                    valor = c.and_(self._subconjunto(ml, mr), self._subconjunto(mr, ml))
                return valor if op in (CmpOp.IN, CmpOp.EQ) else c.not_(valor)
            case MultTest(kind=kind, expr=x):
                valores = list(self.rel(x, env).entries.values())
                alguno = c.or_(*valores)
                if kind is MultKind.SOME:
                    return alguno
                if kind is MultKind.NO:
                    return c.not_(alguno)
                a_lo_sumo_uno = c.and_(
                    *(
                        c.not_(c.and_(valores[i], valores[j]))
                        for i in range(len(valores))
                        for j in range(i + 1, len(valores))
                    )
                )
                if kind is MultKind.LONE:
                    return a_lo_sumo_uno
                return c.and_(alguno, a_lo_sumo_uno)
            case Quant(kind=kind, var=v, bound=b, body=body):
                cota = self.rel(b, env)
                if kind is QuantKind.ALL:
                    return c.and_(
                        *(
                            c.implies(pertenece, self.formula(body, {**env, v: t[0]}))
                            for t, pertenece in sorted(cota.entries.items())
                        )
                    )
                existe = c.or_(
                    *(
                        c.and_(pertenece, self.formula(body, {**env, v: t[0]}))
                        for t, pertenece in sorted(cota.entries.items())
                    )
                )
                return existe if kind is QuantKind.SOME else c.not_(existe)
            case Not(formula=x):
                return c.not_(self.formula(x, env))
            case BinaryFormula(op=op, left=l, right=r):
                vl, vr = self.formula(l, env), self.formula(r, env)
                if op is LogicOp.AND:
                    return c.and_(vl, vr)
                if op is LogicOp.OR:
                    return c.or_(vl, vr)
                if op is LogicOp.IMPLIES:
                    return c.implies(vl, vr)
                return c.iff(vl, vr)
            case PredRef(body=body):
                return True if body is None else self.formula(body, env)
        raise TypeError(f"Nodo desconocido: {f!r}")

    def _subconjunto(self, ml: BooleanMatrix, mr: BooleanMatrix) -> Value:
        return self.c.and_(*(self.c.implies(v, mr.get(t)) for t, v in sorted(ml.entries.items())))

    def multiplicity(self, mult: Multiplicity, valores: Sequence[Value]) -> Value:
        """Restricción de cardinalidad ``one``/``lone``/``some``/``set`` sobre valores."""
        c = self.c
        if mult is Multiplicity.SET:
            return True
        alguno = c.or_(*valores)
        lone = c.and_(
            *(
                c.not_(c.and_(valores[i], valores[j]))
                for i in range(len(valores))
                for j in range(i + 1, len(valores))
            )
        )
        if mult is Multiplicity.SOME:
            return alguno
        if mult is Multiplicity.LONE:
            return lone
        return c.and_(alguno, lone)


def translate_rel(
    e: RelExpr, bounds: Bounds, var_map: VarMap, env: Mapping[str, Atom],
    circuit: Optional[Circuit] = None,
) -> BooleanMatrix:
    """Matriz booleana de ``e``; crea un circuito nuevo si no se pasa uno."""
    circuit = circuit or Circuit(var_map.num_vars + 1)
    return Translator(bounds, var_map, circuit).rel(e, env)


def translate_formula(
    f: Formula, bounds: Bounds, var_map: VarMap, env: Mapping[str, Atom],
    circuit: Optional[Circuit] = None,
) -> Value:
    """Valor de circuito de ``f``; constantes ya plegadas."""
    circuit = circuit or Circuit(var_map.num_vars + 1)
    return Translator(bounds, var_map, circuit).formula(f, env)


# ════════════════════════════════════════════════════════════
# 4. PROBLEMA ATERRIZADO (CNF + GRUPOS)
# ════════════════════════════════════════════════════════════


class GroupKind(str, Enum):
    DEFINITION = "definition"
    DECLARATION = "declaration"
    FACT = "fact-conjunct"
    PROPERTY = "property"


@dataclass(frozen=True)
class ClauseGroup:
    id: int
    kind: GroupKind
    label: str
    span: SourceSpan = NO_SPAN
    conjunct: Optional[tuple[str, int]] = None

    def __str__(self) -> str:
        return f"#{self.id} {self.kind.value} {self.label} @ {self.span}"


@dataclass
class GroundProblem:
    """CNF sobre variables de tuplas con la procedencia de cada cláusula.

    Attributes:
        bounds:        Cotas usadas.
        var_map:       Variables relacionales (ids ``1..var_map.num_vars``).
        num_vars:      Total de variables incluyendo auxiliares de Tseitin.
        clauses:       Cláusulas en orden de emisión.
        clause_group:  Grupo de cada cláusula (paralela a ``clauses``).
        groups:        Id de grupo → descripción.
    """

    bounds: Bounds
    var_map: VarMap
    num_vars: int
    clauses: list[Clause]
    clause_group: list[int]
    groups: dict[int, ClauseGroup]

    @property
    def num_relation_vars(self) -> int:
        return self.var_map.num_vars

    def group_clauses(self, gid: int) -> list[Clause]:
        return [c for c, g in zip(self.clauses, self.clause_group) if g == gid]

    def selectable_groups(self) -> list[ClauseGroup]:
        return [g for g in self.groups.values() if g.kind is not GroupKind.DEFINITION]


class _Emisor:
    def __init__(self, circuit: Circuit) -> None:
        self.circuit = circuit
        self.clauses: list[Clause] = []
        self.clause_group: list[int] = []
        self.groups: dict[int, ClauseGroup] = {0: ClauseGroup(0, GroupKind.DEFINITION, "tseitin")}

    def grupo(self, kind: GroupKind, label: str, raiz: Value, span: SourceSpan = NO_SPAN,
              conjunct: Optional[tuple[str, int]] = None) -> None:
        gid = len(self.groups)
        self.groups[gid] = ClauseGroup(gid, kind, label, span, conjunct)
        for clausula in self.circuit.define(raiz):
            self.clauses.append(clausula)
            self.clause_group.append(0)
        if raiz is True:
            return
        self.clauses.append([] if raiz is False else [raiz])
        self.clause_group.append(gid)


def ground(
    m: Model,
    property: Formula,
    negate_property: bool,
    scope: int,
) -> GroundProblem:
    """Compila ``M ∧ (±property)`` al alcance dado.

    Emite un grupo por cada restricción de multiplicidad de signaturas y
    campos (con el tipado de columnas), uno por cada hecho y uno para la
    propiedad, negada si ``negate_property``.
    """
    bounds = build_bounds(m, scope)
    var_map = build_var_map(m, bounds)
    circuit = Circuit(var_map.num_vars + 1)
    tr = Translator(bounds, var_map, circuit)
    emisor = _Emisor(circuit)

    for s in m.sigs:
        if s.mult in (Multiplicity.LONE, Multiplicity.SOME):
            valores = [tr.member(a) for a in bounds.sig_atoms[s.name]]
            emisor.grupo(GroupKind.DECLARATION, f"{s.mult.value} sig {s.name}",
                         tr.multiplicity(s.mult, valores), s.span)

    for f in m.fields:
        restricciones: list[Value] = []
        for o, t in bounds.field_pools[f.name]:
            v = var_map.var(f.name, (o, t))
            restricciones.append(circuit.implies(v, circuit.and_(tr.member(o), tr.member(t))))
        for o in bounds.sig_atoms[f.owner]:
            fila = [var_map.var(f.name, (o, t)) for t in bounds.sig_atoms[f.target]]
            restricciones.append(circuit.implies(tr.member(o), tr.multiplicity(f.mult, fila)))
        emisor.grupo(GroupKind.DECLARATION, f"{f.owner}.{f.name}: {f.mult.value} {f.target}",
                     circuit.and_(*restricciones), f.span)

    for conj in m.facts:
        emisor.grupo(GroupKind.FACT, f"{conj.label} {pretty(conj.formula)}",
                     tr.formula(conj.formula, {}), conj.span, conj.ref)

    raiz = tr.formula(property, {})
    emisor.grupo(GroupKind.PROPERTY, ("!" if negate_property else "") + f"({pretty(property)})",
                 circuit.not_(raiz) if negate_property else raiz, property.span)

    problema = GroundProblem(
        bounds=bounds,
        var_map=var_map,
        num_vars=circuit.next_label - 1,
        clauses=emisor.clauses,
        clause_group=emisor.clause_group,
        groups=emisor.groups,
    )
    logger.info(
        "Problema aterrizado a alcance %d: %d variables relacionales, %d auxiliares, "
        "%d cláusulas, %d grupos.",
        scope, var_map.num_vars, problema.num_vars - var_map.num_vars,
        len(problema.clauses), len(problema.groups),
    )
    return problema


# ════════════════════════════════════════════════════════════
# 5. DECODIFICACIÓN Y CODIFICACIÓN DE INSTANCIAS
# ════════════════════════════════════════════════════════════


def decode(assignment: Union[Sequence[bool], Mapping[int, bool]], var_map: VarMap, bounds: Bounds) -> Instance:
    """Instancia con las tuplas de variables verdaderas más las constantes.

    ``assignment`` se indexa por id de variable; las auxiliares se ignoran.
    """
    sig_contents: dict[str, set[Atom]] = {
        nombre: set(atomos) if nombre in bounds.fixed else set()
        for nombre, atomos in bounds.sig_atoms.items()
    }
    field_contents: dict[str, set[tuple[Atom, Atom]]] = {nombre: set() for nombre in bounds.field_pools}
    for v in var_map.variables():
        if not assignment[v]:
            continue
        relacion, t = var_map.key(v)
        if relacion in sig_contents:
            sig_contents[relacion].add(t[0])
        else:
            field_contents[relacion].add(t)
    return Instance(
        {k: frozenset(v) for k, v in sig_contents.items()},
        {k: frozenset(v) for k, v in field_contents.items()},
    )


def encode_instance(inst: Instance, var_map: VarMap) -> dict[int, bool]:
    """Inversa de ``decode`` sobre las variables relacionales."""
    return {
        v: var_map.key(v)[1] in inst.relation(var_map.key(v)[0])
        for v in var_map.variables()
    }


# ════════════════════════════════════════════════════════════
# 6. CARGA EN EL SOLUCIONADOR Y VOLCADO DIMACS
# ════════════════════════════════════════════════════════════


def load_into(
    problem: GroundProblem, solver: "Solver", omit: Iterable[int] = ()
) -> dict[int, int]:
    """Carga las cláusulas con un selector fresco por grupo seleccionable.

    Returns:
        Grupo → variable selectora. Afirmar todos los selectores como
        suposiciones equivale a afirmar el problema sin los grupos omitidos.
    """
    omitidos = set(omit)
    solver.ensure_vars(problem.num_vars)
    selectores = {
        g.id: solver.new_var() for g in problem.selectable_groups() if g.id not in omitidos
    }
    for clausula, gid in zip(problem.clauses, problem.clause_group):
        if gid in omitidos:
            continue
        if problem.groups[gid].kind is GroupKind.DEFINITION:
            solver.add_clause(clausula)
        else:
            solver.add_clause(clausula + [-selectores[gid]])
    return selectores


def load_plain(problem: GroundProblem, solver: "Solver") -> None:
    """Carga todas las cláusulas sin selectores."""
    solver.ensure_vars(problem.num_vars)
    for clausula in problem.clauses:
        solver.add_clause(clausula)


def write_dimacs(problem: GroundProblem, out: Union[Path, str, TextIO]) -> None:
    """Vuelca el CNF con un comentario ``c group <id> <kind> <span>`` por grupo."""
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            write_dimacs(problem, fh)
        logger.info("CNF escrito en %s (%d cláusulas).", out, len(problem.clauses))
        return
    out.write(f"p cnf {problem.num_vars} {len(problem.clauses)}\n")
    for gid, grupo in sorted(problem.groups.items()):
        out.write(f"c group {gid} {grupo.kind.value} {grupo.span}\n")
        for clausula in problem.group_clauses(gid):
            out.write(" ".join(str(x) for x in clausula) + " 0\n")
