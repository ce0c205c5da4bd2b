"""
maxsat.py — MaxSAT parcial: la instancia más cercana que satisface lo duro.

Las cláusulas blandas son unitarias, una por variable relacional, con la
polaridad del contraejemplo. Se busca linealmente k = 0, 1, 2, ... con un
contador secuencial "a lo sumo k" sobre los indicadores de violación
(la negación de cada blanda) hasta que el problema sea satisfacible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from exceptions import InternalError
from grounder import ClauseGroup, GroundProblem, VarMap, decode, load_into
from model import Instance, Tuple
from sat import Solver, minimize_core

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PMaxProblem:
    hard: GroundProblem
    soft: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.hard.num_relation_vars
        if len(self.soft) != n or sorted(abs(l) for l in self.soft) != list(range(1, n + 1)):
            raise InternalError(
                "Las blandas deben cubrir cada variable relacional exactamente una vez",
                {"blandas": len(self.soft), "variables": n},
            )


class PMaxStatus(str, Enum):
    OPTIMAL = "optimal"
    HARD_UNSAT = "hard_unsat"


@dataclass(frozen=True)
class PMaxResult:
    """Resultado de ``solve_pmax``.

    Con ``OPTIMAL``: ``instance`` viola exactamente ``cost`` blandas, y
    ``violated`` las nombra como (relación, tupla). Con ``HARD_UNSAT``:
    ``core`` son los grupos de un núcleo mínimo de la parte dura.
    """

    status: PMaxStatus
    assignment: tuple[bool, ...] = ()
    instance: Optional[Instance] = None
    cost: int = 0
    violated: tuple[tuple[str, Tuple], ...] = ()
    core: tuple[ClauseGroup, ...] = field(default_factory=tuple)

    @property
    def optimal(self) -> bool:
        return self.status is PMaxStatus.OPTIMAL


def soft_from_instance(inst: Instance, var_map: VarMap) -> tuple[int, ...]:
    """``+v`` si la tupla de ``v`` está en ``inst``; ``-v`` si no."""
    return tuple(
        v if var_map.key(v)[1] in inst.relation(var_map.key(v)[0]) else -v
        for v in var_map.variables()
    )


def encode_at_most_k(
    lits: Sequence[int], k: int, first_aux: int
) -> tuple[list[list[int]], list[int]]:
    """Contador secuencial: a lo sumo ``k`` de ``lits`` verdaderos.

    ``s[i][j]`` significa "entre los primeros i+1 literales hay al menos
    j+1 verdaderos". Las auxiliares se numeran desde ``first_aux``.

    Returns:
        (cláusulas, variables auxiliares usadas).
    """
    n = len(lits)
    if k < 0 or k > n:
        raise InternalError("k fuera de rango", {"k": k, "literales": n})
    if k == 0:
        return [[-l] for l in lits], []
    if k == n:
        return [], []

    siguiente = first_aux
    s: list[list[int]] = []
    for _ in range(n - 1):
        s.append(list(range(siguiente, siguiente + k)))
        siguiente += k

    clausulas: list[list[int]] = [[-lits[0], s[0][0]]]
    clausulas.extend([-s[0][j]] for j in range(1, k))
    for i in range(1, n - 1):
        x = lits[i]
        clausulas.append([-x, s[i][0]])
        clausulas.append([-s[i - 1][0], s[i][0]])
        for j in range(1, k):
            clausulas.append([-x, -s[i - 1][j - 1], s[i][j]])
            clausulas.append([-s[i - 1][j], s[i][j]])
        clausulas.append([-x, -s[i - 1][k - 1]])
    clausulas.append([-lits[n - 1], -s[n - 2][k - 1]])

    return clausulas, [a for fila in s for a in fila]


def _nucleo_duro(problem: GroundProblem) -> PMaxResult:
    solver = Solver()
    selectores = load_into(problem, solver)
    resultado = solver.solve(sorted(selectores.values()))
    if resultado.satisfiable:
        return PMaxResult(PMaxStatus.OPTIMAL)
    nucleo = minimize_core(solver, resultado.core)
    por_selector = {sel: gid for gid, sel in selectores.items()}
    grupos = tuple(problem.groups[por_selector[s]] for s in sorted(nucleo))
    logger.info("Parte dura insatisfacible; núcleo de %d grupos.", len(grupos))
    for g in grupos:
        logger.debug("  núcleo: %s", g)
    return PMaxResult(PMaxStatus.HARD_UNSAT, core=grupos)


def solve_pmax(problem: PMaxProblem) -> PMaxResult:
    """Asignación de la parte dura que viola el mínimo número de blandas.

    Si la parte dura sola es insatisfacible devuelve ``HARD_UNSAT`` con
    el núcleo de grupos minimizado.
    """
    hard = problem.hard
    previo = _nucleo_duro(hard)
    if not previo.optimal:
        return previo

    indicadores = [-l for l in problem.soft]
    for k in range(len(indicadores) + 1):
        solver = Solver()
        selectores = load_into(hard, solver)
        for l in problem.soft:
            solver.set_phase(abs(l), l > 0)
        clausulas, auxiliares = encode_at_most_k(indicadores, k, solver.num_vars + 1)
        solver.ensure_vars(solver.num_vars + len(auxiliares))
        for c in clausulas:
            solver.add_clause(c)
        resultado = solver.solve(sorted(selectores.values()))
        if not resultado.satisfiable:
            logger.debug("PMAX: sin solución con k=%d.", k)
            continue

        violadas = tuple(
            hard.var_map.key(abs(l)) for l in problem.soft if not resultado.value(l)
        )
        if len(violadas) != k:
            raise InternalError(
                "El costo de la solución no coincide con el primer k satisfacible",
                {"k": k, "costo": len(violadas)},
            )
        asignacion = resultado.model[: hard.num_relation_vars + 1]
        instancia = decode(asignacion, hard.var_map, hard.bounds)
        logger.info("PMAX óptimo con %d blandas violadas.", k)
        return PMaxResult(PMaxStatus.OPTIMAL, asignacion, instancia, k, violadas)

    raise InternalError("La parte dura es satisfacible pero ningún k la satisface")
