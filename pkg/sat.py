"""
sat.py — Solucionador CDCL incremental con suposiciones y núcleos.

Responsabilidades:
  1. ``Solver``: dos literales vigilados, aprendizaje 1UIP, VSIDS con
     heap, guardado de fase y reinicios de Luby.
  2. Suposiciones decididas en los niveles 1..n; si una queda falsa,
     ``analyze_final`` devuelve el subconjunto de suposiciones culpable.
  3. ``minimize_core``: minimización por borrado con refinamiento.
  4. ``parse_dimacs``: lectura de CNF con comentarios de grupo.

Literales como enteros con signo (``-v`` es la negación de ``v``), igual
que en DIMACS.
"""

from __future__ import annotations

import heapq
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from config import ACTIVITY_RESCALE, RESTART_BASE, VAR_DECAY
from exceptions import RmlError

logger = logging.getLogger(__name__)


def luby(i: int) -> int:
    """Término ``i`` (desde 0) de la secuencia 1 1 2 1 1 2 4 1 1 2 ..."""
    tam, seq = 1, 0
    while tam < i + 1:
        seq += 1
        tam = 2 * tam + 1
    while tam - 1 != i:
        tam = (tam - 1) >> 1
        seq -= 1
        i %= tam
    return 1 << seq


@dataclass
class SolverStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    learned: int = 0
    restarts: int = 0
    solves: int = 0


@dataclass(frozen=True)
class SolveResult:
    """Resultado de ``Solver.solve``.

    Attributes:
        satisfiable:  ``True`` si hay modelo.
        model:        ``model[v]`` es el valor de la variable ``v`` (índice 0 sin uso).
        core:         Si es UNSAT, suposiciones que bastan para la contradicción.
    """

    satisfiable: bool
    model: tuple[bool, ...] = ()
    core: frozenset[int] = frozenset()

    def value(self, lit: int) -> bool:
        v = self.model[abs(lit)]
        return v if lit > 0 else not v


class Solver:
    """CDCL incremental: las cláusulas aprendidas se conservan entre llamadas."""

    def __init__(self) -> None:
        self.num_vars = 0
        self.ok = True
        self.stats = SolverStats()
        self._values: list[Optional[bool]] = [None]
        self._level: list[int] = [0]
        self._reason: list[Optional[list[int]]] = [None]
        self._phase: list[bool] = [False]
        self._activity: list[float] = [0.0]
        self._watches: dict[int, list[list[int]]] = {}
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._heap: list[tuple[float, int]] = []
        self._inc = 1.0

    # ── Variables y cláusulas ──────────────────────────────

    def new_var(self) -> int:
        self.num_vars += 1
        v = self.num_vars
        self._values.append(None)
        self._level.append(0)
        self._reason.append(None)
        self._phase.append(False)
        self._activity.append(0.0)
        self._watches[v] = []
        self._watches[-v] = []
        heapq.heappush(self._heap, (0.0, v))
        return v

    def ensure_vars(self, n: int) -> None:
        while self.num_vars < n:
            self.new_var()

    def set_phase(self, var: int, value: bool) -> None:
        """Polaridad preferida al decidir ``var`` por primera vez."""
        self._phase[var] = value

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Agrega una cláusula en el nivel 0.

        Returns:
            ``False`` si el conjunto de cláusulas ya es insatisfacible.
        """
        if not self.ok:
            return False
        self._cancel_until(0)
        clausula: list[int] = []
        for lit in dict.fromkeys(lits):
            if abs(lit) > self.num_vars or lit == 0:
                raise RmlError("Literal fuera de rango", {"literal": lit, "variables": self.num_vars})
            if -lit in clausula:
                return True
            valor = self._lit_value(lit)
            if valor is True:
                return True
            if valor is None:
                clausula.append(lit)
        if not clausula:
            self.ok = False
            return False
        if len(clausula) == 1:
            self._enqueue(clausula[0], None)
            self.ok = self._propagate() is None
            return self.ok
        self._attach(clausula)
        return True

    # ── Búsqueda ───────────────────────────────────────────

    def solve(self, assumptions: Sequence[int] = ()) -> SolveResult:
        """Busca un modelo que haga verdaderas todas las ``assumptions``."""
        self.stats.solves += 1
        if not self.ok:
            return SolveResult(False)
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return SolveResult(False)

        supuestos = list(assumptions)
        reinicio = 0
        limite = luby(reinicio) * RESTART_BASE
        conflictos = 0

        while True:
            conflicto = self._propagate()
            if conflicto is not None:
                self.stats.conflicts += 1
                conflictos += 1
                if self._decision_level() == 0:
                    self.ok = False
                    return SolveResult(False)
                aprendida, nivel = self._analyze(conflicto)
                self._cancel_until(nivel)
                if len(aprendida) == 1:
                    self._enqueue(aprendida[0], None)
                else:
                    self._attach(aprendida)
                    self._enqueue(aprendida[0], aprendida)
                    self.stats.learned += 1
                self._inc /= VAR_DECAY
                continue

            if conflictos >= limite:
                self.stats.restarts += 1
                reinicio += 1
                limite = luby(reinicio) * RESTART_BASE
                conflictos = 0
                self._cancel_until(0)
                continue

            nivel = self._decision_level()
            if nivel < len(supuestos):
                p = supuestos[nivel]
                valor = self._lit_value(p)
                self._trail_lim.append(len(self._trail))
                if valor is False:
                    nucleo = self._analyze_final(p)
                    self._cancel_until(0)
                    return SolveResult(False, core=nucleo)
                if valor is None:
                    self._enqueue(p, None)
                continue

            v = self._pick_branch()
            if v is None:
                modelo = tuple(bool(x) for x in self._values)
                self._cancel_until(0)
                return SolveResult(True, model=modelo)
            self.stats.decisions += 1
            self._trail_lim.append(len(self._trail))
            self._enqueue(v if self._phase[v] else -v, None)

    # ── Internos ───────────────────────────────────────────

    def _lit_value(self, lit: int) -> Optional[bool]:
        v = self._values[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def _decision_level(self) -> int:
        return len(self._trail_lim)

    def _attach(self, clausula: list[int]) -> None:
        self._watches[clausula[0]].append(clausula)
        self._watches[clausula[1]].append(clausula)

    def _enqueue(self, lit: int, reason: Optional[list[int]]) -> None:
        v = abs(lit)
        self._values[v] = lit > 0
        self._level[v] = self._decision_level()
        self._reason[v] = reason
        self._trail.append(lit)

    def _propagate(self) -> Optional[list[int]]:
        """Propagación unitaria; devuelve la cláusula en conflicto o ``None``."""
        while self._qhead < len(self._trail):
            falso = -self._trail[self._qhead]
            self._qhead += 1
            self.stats.propagations += 1
            vigiladas = self._watches[falso]
            conservar: list[list[int]] = []
            i = 0
            while i < len(vigiladas):
                c = vigiladas[i]
                i += 1
                if c[0] == falso:
                    c[0], c[1] = c[1], c[0]
                if self._lit_value(c[0]) is True:
                    conservar.append(c)
                    continue
                for k in range(2, len(c)):
                    if self._lit_value(c[k]) is not False:
                        c[1], c[k] = c[k], c[1]
                        self._watches[c[1]].append(c)
                        break
                else:
                    conservar.append(c)
                    if self._lit_value(c[0]) is False:
                        conservar.extend(vigiladas[i:])
                        self._watches[falso] = conservar
                        self._qhead = len(self._trail)
                        return c
                    self._enqueue(c[0], c)
            self._watches[falso] = conservar
        return None

    def _analyze(self, conflicto: list[int]) -> tuple[list[int], int]:
        """Primer punto de implicación única; devuelve (cláusula, nivel de retroceso)."""
        vistos: set[int] = set()
        aprendida: list[int] = [0]
        pendientes = 0
        nivel_actual = self._decision_level()
        p: Optional[int] = None
        idx = len(self._trail) - 1
        razon: Optional[list[int]] = conflicto

        while True:
            assert razon is not None
            for q in razon if p is None else razon[1:]:
                v = abs(q)
                if v in vistos or self._level[v] == 0:
                    continue
                vistos.add(v)
                self._bump(v)
                if self._level[v] == nivel_actual:
                    pendientes += 1
                else:
                    aprendida.append(q)
            while abs(self._trail[idx]) not in vistos:
                idx -= 1
            p = self._trail[idx]
            idx -= 1
            razon = self._reason[abs(p)]
            vistos.discard(abs(p))
            pendientes -= 1
            if pendientes == 0:
                break

        aprendida[0] = -p
        if len(aprendida) == 1:
            return aprendida, 0
        mayor = max(range(1, len(aprendida)), key=lambda j: self._level[abs(aprendida[j])])
        aprendida[1], aprendida[mayor] = aprendida[mayor], aprendida[1]
        return aprendida, self._level[abs(aprendida[1])]

    def _analyze_final(self, p: int) -> frozenset[int]:
        """Suposiciones de las que depende la falsedad de ``p`` (``p`` incluida)."""
        nucleo = {p}
        if self._decision_level() == 0 or self._level[abs(p)] == 0:
            return frozenset(nucleo)
        vistos = {abs(p)}
        for i in range(len(self._trail) - 1, self._trail_lim[0] - 1, -1):
            x = self._trail[i]
            v = abs(x)
            if v not in vistos:
                continue
            razon = self._reason[v]
            if razon is None:
                nucleo.add(x)
            else:
                vistos.update(abs(q) for q in razon[1:] if self._level[abs(q)] > 0)
            vistos.discard(v)
        return frozenset(nucleo)

    def _cancel_until(self, nivel: int) -> None:
        if self._decision_level() <= nivel:
            return
        inicio = self._trail_lim[nivel]
        for lit in self._trail[inicio:]:
            v = abs(lit)
            self._phase[v] = lit > 0
            self._values[v] = None
            self._reason[v] = None
            heapq.heappush(self._heap, (-self._activity[v], v))
        del self._trail[inicio:]
        del self._trail_lim[nivel:]
        self._qhead = len(self._trail)

    def _bump(self, v: int) -> None:
        self._activity[v] += self._inc
        if self._activity[v] > ACTIVITY_RESCALE:
            self._activity = [a / ACTIVITY_RESCALE for a in self._activity]
            self._inc /= ACTIVITY_RESCALE
            self._heap = [(-self._activity[u], u) for u in range(1, self.num_vars + 1)
                          if self._values[u] is None]
            heapq.heapify(self._heap)
        elif self._values[v] is None:
            heapq.heappush(self._heap, (-self._activity[v], v))

    def _pick_branch(self) -> Optional[int]:
        while self._heap:
            _, v = heapq.heappop(self._heap)
            if self._values[v] is None:
                return v
        # Entradas perdidas por re-escalado: barrido lineal
        return next((v for v in range(1, self.num_vars + 1) if self._values[v] is None), None)


def minimize_core(solver: Solver, core: Iterable[int]) -> frozenset[int]:
    """Núcleo mínimo por inclusión: quitar cualquier elemento lo vuelve SAT.

    Prueba cada suposición en orden; si sin ella sigue UNSAT, la descarta
    y recorta las pendientes al nuevo núcleo devuelto por el solucionador.
    """
    confirmadas: list[int] = []
    pendientes = sorted(core, key=abs)
    while pendientes:
        candidata = pendientes.pop(0)
        resultado = solver.solve(confirmadas + pendientes)
        if resultado.satisfiable:
            confirmadas.append(candidata)
        else:
            pendientes = [p for p in pendientes if p in resultado.core]
    logger.debug("Núcleo minimizado: %d suposiciones.", len(confirmadas))
    return frozenset(confirmadas)


@dataclass
class DimacsCnf:
    num_vars: int
    clauses: list[list[int]] = field(default_factory=list)
    clause_group: list[int] = field(default_factory=list)
    groups: dict[int, str] = field(default_factory=dict)


_GRUPO_RE = re.compile(r"^c group (\d+)\s*(.*)$")


def parse_dimacs(text: str) -> DimacsCnf:
    """Lee un CNF DIMACS; ``c group <id> ...`` asigna las cláusulas siguientes.

    Raises:
        RmlError: cabecera ausente o literales inválidos.
    """
    cnf: Optional[DimacsCnf] = None
    grupo = 0
    actual: list[int] = []
    for numero, linea in enumerate(text.splitlines(), start=1):
        linea = linea.strip()
        if not linea:
            continue
        if linea.startswith("c"):
            m = _GRUPO_RE.match(linea)
            if m and cnf is not None:
                grupo = int(m.group(1))
                cnf.groups[grupo] = m.group(2)
            continue
        if linea.startswith("p"):
            partes = linea.split()
            if len(partes) != 4 or partes[1] != "cnf":
                raise RmlError("Cabecera DIMACS inválida", {"linea": numero})
            cnf = DimacsCnf(int(partes[2]))
            continue
        if cnf is None:
            raise RmlError("Cláusula antes de la cabecera 'p cnf'", {"linea": numero})
        try:
            literales = [int(x) for x in linea.split()]
        except ValueError as exc:
            raise RmlError("Literal no entero", {"linea": numero}) from exc
        for lit in literales:
            if lit == 0:
                cnf.clauses.append(actual)
                cnf.clause_group.append(grupo)
                actual = []
            else:
                actual.append(lit)
    if cnf is None:
        raise RmlError("Falta la cabecera 'p cnf'")
    if actual:
        cnf.clauses.append(actual)
        cnf.clause_group.append(grupo)
    return cnf
