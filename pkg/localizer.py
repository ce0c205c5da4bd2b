"""
localizer.py — Localización de fallas a partir de pares (contraejemplo, instancia sat).

Flujo de ``localize``:
  1. ``generate_pairs``: contraejemplos de M ∧ ¬p, cada uno bloqueado tras
     encontrarlo, y su instancia más cercana de M ∧ p vía PMAX.
  2. ``compare``: tuplas, átomos y relaciones que separan cada par; se
     conserva lo común a todos los pares.
  3. ``get_susp_exprs``: conjunciones que mencionan las relaciones del diff.
  4. ``compute_scores`` + ``rank``: puntaje booleano (cambios de evaluación)
     más puntaje relacional (cobertura de los átomos del diff).
  5. ``unsat_localize``: si M ∧ p no tiene instancias, evalúa las
     conjunciones del núcleo sobre la instancia sat de M′ ∧ p.

Todos los puntajes son ``Fraction`` exactas; el redondeo es asunto del reporte.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from exceptions import FixtureError, InternalError, ModelError, ResidualUnsatError
from evaluator import (
    check_instance,
    compatible_instantiations,
    eval_formula,
    involved_atoms,
    strip_quantifiers,
)
from grounder import ClauseGroup, GroupKind, decode, ground, load_plain
from maxsat import PMaxProblem, PMaxResult, solve_pmax, soft_from_instance
from model import (
    Atom,
    BinaryFormula,
    Command,
    CommandKind,
    Compare,
    Conjunct,
    Formula,
    Instance,
    Model,
    MultTest,
    Node,
    Not,
    PredRef,
    SourceSpan,
    Tuple,
    pretty,
    relation_refs,
    walk,
)
from sat import Solver

logger = logging.getLogger(__name__)


# ════════════════════════════════════════════════════════════
# 1. TIPOS
# ════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class Pair:
    cex: Instance
    sat: Instance
    distance: Optional[int] = None


@dataclass(frozen=True)
class PairSet:
    pairs: tuple[Pair, ...]
    max_pairs: int = 1

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)


@dataclass(frozen=True)
class NoCex:
    """La aserción se cumple al alcance dado."""

    scope: int


@dataclass(frozen=True)
class UnsatSignal:
    """M ∧ p no tiene instancias: núcleo de grupos y el contraejemplo que lo mostró."""

    core: tuple[ClauseGroup, ...]
    cex: Instance


@dataclass(frozen=True)
class Diff:
    """Diferencias entre contraejemplos e instancias sat.

    Attributes:
        per_pair:   Por par, relación → diferencia simétrica de tuplas.
        relations:  Relaciones directas e inferidas comunes a los pares.
        atoms:      Átomos de tuplas diferentes comunes a los pares.
        fallback:   ``True`` si alguna intersección quedó vacía y se usó la unión.
    """

    per_pair: tuple[dict[str, frozenset[Tuple]], ...]
    relations: frozenset[str]
    atoms: frozenset[Atom]
    fallback: bool = False


class NodeKind(str, Enum):
    BOOLEAN = "boolean"
    RELATIONAL = "relational"


@dataclass(frozen=True)
class ScoredNode:
    """Nodo puntuado con su ubicación de origen.

    ``total = boolean_score + relational_score``; las hojas relacionales
    tienen puntaje booleano 0.
    """

    text: str
    span: SourceSpan
    conjunct: tuple[str, int]
    kind: NodeKind
    depth: int
    boolean_score: Fraction
    relational_score: Fraction
    operator_hint: Optional[str] = None

    @property
    def total(self) -> Fraction:
        return self.boolean_score + self.relational_score


class ReportStatus(str, Enum):
    LOCALIZED = "localized"
    UNSAT_CONFLICTS = "unsat-conflicts"
    NO_COUNTEREXAMPLE = "no-counterexample"


@dataclass(frozen=True)
class RankedReport:
    status: ReportStatus
    ranking: tuple[ScoredNode, ...] = ()
    diff: Optional[Diff] = None
    pairs: tuple[Pair, ...] = ()
    core: tuple[ClauseGroup, ...] = ()
    command: Optional[Command] = None
    scope: Optional[int] = None

    @property
    def pairs_used(self) -> int:
        return len(self.pairs)


# ════════════════════════════════════════════════════════════
# 2. GENERACIÓN DE PARES
# ════════════════════════════════════════════════════════════


def _verificar_par(m: Model, p: Formula, cex: Instance, sat: Instance) -> None:
    problemas = check_instance(m, cex) + check_instance(m, sat)
    if problemas:
        raise InternalError("Par generado no es instancia del modelo", {"problemas": problemas})
    if eval_formula(p, cex, {}):
        raise InternalError("El contraejemplo generado satisface la propiedad")
    if not eval_formula(p, sat, {}):
        raise InternalError("La instancia sat generada viola la propiedad")


def generate_pairs(
    m: Model, p: Formula, scope: int, max_pairs: int
) -> Union[PairSet, UnsatSignal, NoCex]:
    """Hasta ``max_pairs`` pares (cex, sat) con sat a distancia mínima del cex."""
    cex_problema = ground(m, p, True, scope)
    solver = Solver()
    load_plain(cex_problema, solver)
    hard = ground(m, p, False, scope)

    pares: list[Pair] = []
    while len(pares) < max_pairs:
        resultado = solver.solve()
        logger.debug("Búsqueda de contraejemplo: %s", solver.stats)
        if not resultado.satisfiable:
            if not pares:
                logger.info("Sin contraejemplos a alcance %d.", scope)
                return NoCex(scope)
            logger.warning(
                "Contraejemplos agotados: se continúa con %d de %d pares.", len(pares), max_pairs
            )
            break

        cex = decode(resultado.model, cex_problema.var_map, cex_problema.bounds)
        blandas = soft_from_instance(cex, hard.var_map)
        solver.add_clause([-l for l in blandas])

        pmax = solve_pmax(PMaxProblem(hard, blandas))
        if not pmax.optimal:
            logger.info("M ∧ p es insatisfacible; se pasa al análisis de núcleo.")
            return UnsatSignal(pmax.core, cex)

        _verificar_par(m, p, cex, pmax.instance)
        pares.append(Pair(cex, pmax.instance, pmax.cost))
        logger.info("Par %d generado (distancia PMAX %d).", len(pares), pmax.cost)

    return PairSet(tuple(pares), max_pairs)


# ════════════════════════════════════════════════════════════
# 3. COMPARACIÓN
# ════════════════════════════════════════════════════════════


def _diff_par(par: Pair) -> tuple[dict[str, frozenset[Tuple]], frozenset[str], frozenset[Atom]]:
    cex, sat = par.cex, par.sat
    nombres = dict.fromkeys(cex.relation_names() + sat.relation_names())
    diferencias = {n: cex.relation(n) ^ sat.relation(n) for n in nombres}
    directas = {n for n, d in diferencias.items() if d}
    atomos = frozenset(a for d in diferencias.values() for t in d for a in t)
    campos = dict.fromkeys(tuple(cex.field_contents) + tuple(sat.field_contents))
    inferidas = {
        n for n in campos
        if any(set(t) & atomos for t in cex.relation(n) | sat.relation(n))
    }
    return diferencias, frozenset(directas | inferidas), atomos


def compare(pairs: PairSet) -> Diff:
    """Relaciones y átomos que distinguen los pares, comunes a todos ellos.

    Si la intersección de relaciones o la de átomos queda vacía, ese
    componente usa la unión y el diff queda marcado con ``fallback``.
    """
    if not len(pairs):
        raise InternalError("compare requiere al menos un par")
    por_par, relaciones, atomos = zip(*(_diff_par(par) for par in pairs))

    fallback = False
    comunes_rel = frozenset.intersection(*relaciones)
    if not comunes_rel:
        comunes_rel = frozenset.union(*relaciones)
        fallback = True
    comunes_atm = frozenset.intersection(*atomos)
    if not comunes_atm:
        comunes_atm = frozenset.union(*atomos)
        fallback = True
    if fallback:
        logger.warning("Sin diferencias comunes entre pares; se usa la unión.")

    logger.info(
        "Diff: relaciones %s, átomos %s.",
        sorted(comunes_rel), [a.name for a in sorted(comunes_atm)],
    )
    return Diff(tuple(por_par), comunes_rel, comunes_atm, fallback)


# ════════════════════════════════════════════════════════════
# 4. SELECCIÓN DE EXPRESIONES SOSPECHOSAS
# ════════════════════════════════════════════════════════════


def _predicados_referidos(f: Formula) -> list[str]:
    nombres: list[str] = []
    pendientes: list[Node] = [f]
    while pendientes:
        for n in walk(pendientes.pop()):
            if isinstance(n, PredRef) and n.name not in nombres:
                nombres.append(n.name)
                if n.body is not None:
                    pendientes.append(n.body)
    return nombres


def get_susp_exprs(
    m: Model, d: Diff, property: Optional[Formula] = None
) -> list[Conjunct]:
    """Hechos (y conjunciones de predicados que usa ``property``) sobre el diff.

    Primero exige mencionar TODAS las relaciones del diff; si ninguna
    conjunción lo hace, basta con mencionar alguna.
    """
    candidatas = list(m.facts)
    if property is not None:
        for nombre in _predicados_referidos(property):
            candidatas.extend(m.preds.get(nombre, ()))

    todas = [c for c in candidatas if d.relations <= relation_refs(c.formula)]
    if todas:
        return todas
    alguna = [c for c in candidatas if d.relations & relation_refs(c.formula)]
    if alguna:
        logger.warning(
            "Ninguna conjunción menciona todas las relaciones del diff; "
            "se usan %d que mencionan alguna.", len(alguna),
        )
    return alguna


# ════════════════════════════════════════════════════════════
# 5. PUNTAJES
# ════════════════════════════════════════════════════════════


@dataclass
class _Nodo:
    node: Node
    depth: int
    kind: NodeKind
    hijos: list[int] = field(default_factory=list)


def _nodos_puntuables(cuerpo: Formula) -> list[_Nodo]:
    """Nodos booleanos y hojas relacionales del cuerpo, en pre-orden.

    Un cuantificador interno o una referencia a predicado es un nodo
    booleano opaco: su interior tiene variables que no se ligan.
    """
    nodos: list[_Nodo] = []

    def visitar(n: Formula, depth: int) -> int:
        idx = len(nodos)
        nodos.append(_Nodo(n, depth, NodeKind.BOOLEAN))
        match n:
            case BinaryFormula(left=l, right=r):
                nodos[idx].hijos = [visitar(l, depth + 1), visitar(r, depth + 1)]
            case Not(formula=x):
                nodos[idx].hijos = [visitar(x, depth + 1)]
            case Compare(left=l, right=r):
                for hoja in (l, r):
                    nodos.append(_Nodo(hoja, depth + 1, NodeKind.RELATIONAL))
            case MultTest(expr=x):
                nodos.append(_Nodo(x, depth + 1, NodeKind.RELATIONAL))
        return idx

    visitar(cuerpo, 0)
    return nodos


def _lado(n: Node, inst: Instance, binding: dict[str, Atom], atomos: frozenset[Atom]) -> Fraction:
    involucrados = involved_atoms(n, inst, binding)
    if atomos <= involucrados:
        return Fraction(len(atomos), len(involucrados))
    return Fraction(0)


def _puntuar_conjuncion(
    c: Conjunct, d: Diff, pairs: PairSet, m: Model
) -> list[ScoredNode]:
    prefijo = strip_quantifiers(c.formula)
    nodos = _nodos_puntuables(prefijo.body)
    if prefijo.variables:
        ligaduras = [i.binding for i in compatible_instantiations(c, d.atoms, m)]
    else:
        ligaduras = [{}]
    n_pares = len(pairs)

    cambios = [0] * len(nodos)
    relacional = [Fraction(0)] * len(nodos)
    for par in pairs:
        suma_par = [Fraction(0)] * len(nodos)
        for b in ligaduras:
            for i, nodo in enumerate(nodos):
                if nodo.kind is NodeKind.BOOLEAN:
                    if eval_formula(nodo.node, par.cex, b) != eval_formula(nodo.node, par.sat, b):
                        cambios[i] += 1
                suma_par[i] += (
                    _lado(nodo.node, par.cex, b, d.atoms) + _lado(nodo.node, par.sat, b, d.atoms)
                ) / 2
        if ligaduras:
            for i in range(len(nodos)):
                relacional[i] += suma_par[i] / len(ligaduras)

    def cambios_subarbol(i: int) -> int:
        return cambios[i] + sum(cambios_subarbol(h) for h in nodos[i].hijos)

    booleano = [
        Fraction(cambios_subarbol(i), n_pares) if nodo.kind is NodeKind.BOOLEAN else Fraction(0)
        for i, nodo in enumerate(nodos)
    ]
    totales = [booleano[i] + relacional[i] / n_pares for i in range(len(nodos))]

    resultado = []
    for i, nodo in enumerate(nodos):
        pista = None
        if isinstance(nodo.node, BinaryFormula):
            izq, der = nodo.hijos
            if totales[izq] != totales[der]:
                pista = nodo.node.op.value
        resultado.append(
            ScoredNode(
                text=pretty(nodo.node),
                span=nodo.node.span,
                conjunct=c.ref,
                kind=nodo.kind,
                depth=nodo.depth,
                boolean_score=booleano[i],
                relational_score=relacional[i] / n_pares,
                operator_hint=pista,
            )
        )
    return resultado


def compute_scores(
    exprs: Sequence[Conjunct], d: Diff, pairs: PairSet, m: Model
) -> list[ScoredNode]:
    """Puntajes booleano y relacional de cada nodo de cada conjunción.

    Cada conjunción se despoja de sus cuantificadores externos y sus
    variables se ligan a los átomos del diff compatibles con el tipo.
    """
    if not d.atoms:
        raise InternalError("El diff no tiene átomos")
    if not len(pairs):
        raise InternalError("compute_scores requiere al menos un par")
    nodos: list[ScoredNode] = []
    for c in exprs:
        puntuados = _puntuar_conjuncion(c, d, pairs, m)
        for n in puntuados:
            logger.debug(
                "  %s %s: booleano=%s relacional=%s", c.label, n.text, n.boolean_score, n.relational_score
            )
        nodos.extend(puntuados)
    return nodos


def _clave_orden(n: ScoredNode) -> tuple:
    return (-n.total, n.kind is not NodeKind.BOOLEAN, n.depth, n.span)


def rank(
    nodes: Sequence[ScoredNode],
    diff: Optional[Diff] = None,
    pairs: Sequence[Pair] = (),
) -> RankedReport:
    """Orden descendente por total; empates: booleanos, menos profundos, antes en el fuente."""
    return RankedReport(
        status=ReportStatus.LOCALIZED,
        ranking=tuple(sorted(nodes, key=_clave_orden)),
        diff=diff,
        pairs=tuple(pairs),
    )


# ════════════════════════════════════════════════════════════
# 6. ANÁLISIS DE NÚCLEO INSATISFACIBLE
# ════════════════════════════════════════════════════════════


def _es_conflicto(c: Conjunct, sat: Instance, atomos: frozenset[Atom], m: Model) -> bool:
    prefijo = strip_quantifiers(c.formula)
    if prefijo.variables and prefijo.universal:
        for inst in compatible_instantiations(c, atomos, m):
            if inst.guards_hold(sat) and not eval_formula(inst.body, sat, inst.binding):
                return True
        return False
    return not eval_formula(c.formula, sat, {})


def _readmitir(
    m: Model,
    refs: list[tuple[str, int]],
    cex: Instance,
    scope: int,
    property: Formula,
    inicial: PMaxResult,
) -> PMaxResult:
    """Devuelve al modelo las conjunciones del núcleo que no alejan la instancia sat.

    Se prueban primero las conjunciones sin cuantificadores y luego las
    cuantificadas, cada grupo en el orden del núcleo. Una conjunción vuelve
    si M′ con ella sigue teniendo una instancia de M′ ∧ p a la distancia
    óptima original.
    """

    def cuantificada(ref: tuple[str, int]) -> bool:
        return bool(strip_quantifiers(m.conjunct(ref).formula).variables)

    orden = sorted(range(len(refs)), key=lambda i: (cuantificada(refs[i]), i))
    fuera = list(refs)
    mejor = inicial
    for i in orden:
        prueba = [r for r in fuera if r != refs[i]]
        hard = ground(m.without_conjuncts(prueba), property, False, scope)
        r = solve_pmax(PMaxProblem(hard, soft_from_instance(cex, hard.var_map)))
        if r.optimal and r.cost == inicial.cost:
            logger.debug("Conjunción del núcleo readmitida: %s", refs[i])
            fuera, mejor = prueba, r
    return mejor


def unsat_localize(
    m: Model,
    core: Sequence[ClauseGroup],
    cex: Instance,
    scope: int,
    property: Formula,
) -> RankedReport:
    """Conjunciones del núcleo que son falsas en la instancia sat de M′ ∧ p.

    M′ es ``m`` sin las conjunciones de hechos del núcleo; entre las
    instancias más cercanas se prefiere la que cumple más de ellas. Las
    conjunciones universales se evalúan por átomo del diff (guarda falsa
    equivale a verdadero); las demás, completas.

    Raises:
        ResidualUnsatError: si M′ ∧ p sigue siendo insatisfacible.
    """
    refs = [g.conjunct for g in core if g.kind is GroupKind.FACT and g.conjunct is not None]
    reducido = m.without_conjuncts(refs)
    hard = ground(reducido, property, False, scope)
    pmax = solve_pmax(PMaxProblem(hard, soft_from_instance(cex, hard.var_map)))
    if not pmax.optimal:
        raise ResidualUnsatError(
            "El modelo sin el núcleo sigue sin instancias que cumplan la propiedad",
            {"nucleo_residual": [str(g) for g in pmax.core]},
        )
    pmax = _readmitir(m, refs, cex, scope, property, pmax)

    par = Pair(cex, pmax.instance, pmax.cost)
    diff = compare(PairSet((par,)))
    conflictos = []
    for ref in refs:
        c = m.conjunct(ref)
        if _es_conflicto(c, par.sat, diff.atoms, m):
            logger.info("Conflicto: %s %s", c.label, pretty(c.formula))
            conflictos.append(
                ScoredNode(
                    text=pretty(c.formula),
                    span=c.span,
                    conjunct=c.ref,
                    kind=NodeKind.BOOLEAN,
                    depth=0,
                    boolean_score=Fraction(1),
                    relational_score=Fraction(0),
                )
            )
    return RankedReport(
        status=ReportStatus.UNSAT_CONFLICTS,
        ranking=tuple(sorted(conflictos, key=_clave_orden)),
        diff=diff,
        pairs=(par,),
        core=tuple(core),
    )


# ════════════════════════════════════════════════════════════
# 7. ORQUESTACIÓN
# ════════════════════════════════════════════════════════════


def select_command(m: Model, name: Optional[str] = None, kind: CommandKind = CommandKind.CHECK) -> Command:
    """Comando ``kind`` nombrado, o el único del modelo si no se nombra.

    Raises:
        ModelError: no hay ninguno, hay varios sin nombre, o el nombre no existe.
    """
    candidatos = [c for c in m.commands if c.kind is kind]
    if name is not None:
        candidatos = [c for c in candidatos if c.target == name]
        if not candidatos:
            raise ModelError(f"No hay comando {kind.value} para '{name}'", {"archivo": m.file})
        return candidatos[0]
    if not candidatos:
        raise ModelError(f"El modelo no tiene comandos {kind.value}", {"archivo": m.file})
    if len(candidatos) > 1:
        raise ModelError(
            f"Hay varios comandos {kind.value}; indique uno con --command",
            {"comandos": [c.target for c in candidatos]},
        )
    return candidatos[0]


def _distancia(a: Instance, b: Instance) -> int:
    """Tuplas en exactamente una de las dos instancias (distancia de Hamming)."""
    nombres = dict.fromkeys(a.relation_names() + b.relation_names())
    return sum(len(a.relation(n) ^ b.relation(n)) for n in nombres)


def _validar_fixture(m: Model, p: Formula, cex: Instance, sat: Instance) -> None:
    for nombre, inst, esperado in (("cex", cex, False), ("sat", sat, True)):
        problemas = check_instance(m, inst)
        if problemas:
            raise FixtureError(f"La instancia {nombre} no es instancia del modelo", {"problemas": problemas})
        if eval_formula(p, inst, {}) != esperado:
            lado = "satisface" if not esperado else "viola"
            raise FixtureError(f"La instancia {nombre} {lado} la propiedad", {"instancia": nombre})


def localize(
    m: Model,
    command: Command,
    scope: Optional[int] = None,
    max_pairs: int = 5,
    fixture: Optional[tuple[Instance, Instance]] = None,
) -> RankedReport:
    """Ranking de expresiones sospechosas para el comando ``check`` dado.

    Con ``fixture`` se omite la búsqueda y se usa ese único par, tras
    validarlo contra el modelo y la propiedad.
    """
    if command.target not in m.asserts:
        raise ModelError(f"Aserción inexistente: '{command.target}'", {"archivo": m.file})
    propiedad = m.asserts[command.target]
    alcance = scope or command.scope

    if fixture is not None:
        cex, sat = fixture
        _validar_fixture(m, propiedad, cex, sat)
        pares: Union[PairSet, UnsatSignal, NoCex] = PairSet((Pair(cex, sat, _distancia(cex, sat)),), 1)
    else:
        pares = generate_pairs(m, propiedad, alcance, max_pairs)

    if isinstance(pares, NoCex):
        return RankedReport(ReportStatus.NO_COUNTEREXAMPLE, command=command, scope=alcance)
    if isinstance(pares, UnsatSignal):
        reporte = unsat_localize(m, pares.core, pares.cex, alcance, propiedad)
        return _con_comando(reporte, command, alcance)

    diff = compare(pares)
    exprs = get_susp_exprs(m, diff, propiedad)
    logger.info("%d conjunciones sospechosas.", len(exprs))
    nodos = compute_scores(exprs, diff, pares, m) if exprs else []
    reporte = rank(nodos, diff, pares.pairs)
    logger.info("Ranking con %d nodos.", len(reporte.ranking))
    return _con_comando(reporte, command, alcance)


def _con_comando(reporte: RankedReport, command: Command, scope: int) -> RankedReport:
    return replace(reporte, command=command, scope=scope)
