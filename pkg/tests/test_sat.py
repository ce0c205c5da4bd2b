"""Pruebas del solucionador CDCL, los núcleos y la lectura DIMACS."""

import itertools
import random

import pytest

from exceptions import RmlError
from sat import Solver, luby, minimize_core, parse_dimacs
from tests.ayudantes import satisface


def _solver(clausulas, n):
    s = Solver()
    s.ensure_vars(n)
    for c in clausulas:
        s.add_clause(c)
    return s


def _fuerza_bruta(clausulas, n):
    for bits in itertools.product([False, True], repeat=n):
        if satisface(clausulas, (None,) + bits):
            return True
    return False


def _palomas(palomas, huecos):
    var = lambda p, h: p * huecos + h + 1  # noqa: E731
    clausulas = [[var(p, h) for h in range(huecos)] for p in range(palomas)]
    for h in range(huecos):
        for p, q in itertools.combinations(range(palomas), 2):
            clausulas.append([-var(p, h), -var(q, h)])
    return clausulas, palomas * huecos


class TestLuby:
    def test_secuencia(self):
        assert [luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


class TestSolverBasico:
    """Casos pequeños con respuesta conocida."""

    def test_sin_clausulas(self):
        assert _solver([], 3).solve().satisfiable

    def test_unitarias(self):
        r = _solver([[1], [-2], [2, 3]], 3).solve()
        assert r.satisfiable
        assert r.value(1) and not r.value(2) and r.value(3)

    def test_clausula_vacia(self):
        s = _solver([[]], 1)
        assert not s.ok
        assert not s.solve().satisfiable

    def test_contradiccion_unitaria(self):
        assert not _solver([[1], [-1]], 1).solve().satisfiable

    def test_tautologia_ignorada(self):
        assert _solver([[1, -1], [-1]], 1).solve().satisfiable

    def test_literal_fuera_de_rango(self):
        s = Solver()
        s.ensure_vars(2)
        with pytest.raises(RmlError):
            s.add_clause([1, 3])

    @pytest.mark.parametrize("palomas,huecos", [(3, 2), (4, 3), (5, 4)])
    def test_palomas(self, palomas, huecos):
        clausulas, n = _palomas(palomas, huecos)
        assert not _solver(clausulas, n).solve().satisfiable

    def test_palomas_caben(self):
        clausulas, n = _palomas(4, 4)
        r = _solver(clausulas, n).solve()
        assert r.satisfiable
        assert satisface(clausulas, r.model)

    def test_fase_preferida(self):
        s = _solver([[1, 2]], 2)
        s.set_phase(1, True)
        s.set_phase(2, True)
        r = s.solve()
        assert r.value(1) and r.value(2)


class TestSolverAleatorio:
    """3-CNF aleatorio contra fuerza bruta."""

    @pytest.mark.parametrize("semilla", range(40))
    def test_coincide_con_fuerza_bruta(self, semilla):
        rng = random.Random(semilla)
        n = 9
        clausulas = [
            [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), 3)]
            for _ in range(int(4.26 * n))
        ]
        r = _solver(clausulas, n).solve()
        assert r.satisfiable == _fuerza_bruta(clausulas, n)
        if r.satisfiable:
            assert satisface(clausulas, r.model)

    def test_incremental(self, rng):
        n = 8
        s = _solver([], n)
        clausulas = []
        for _ in range(40):
            c = [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), 3)]
            clausulas.append(c)
            s.add_clause(c)
            r = s.solve()
            assert r.satisfiable == _fuerza_bruta(clausulas, n)
            if not r.satisfiable:
                break


class TestSuposiciones:
    """Suposiciones y núcleos."""

    def test_suposiciones_contradictorias(self):
        s = _solver([[-1, -2]], 2)
        r = s.solve([1, 2])
        assert not r.satisfiable
        assert r.core == {1, 2}
        assert s.solve([1]).satisfiable

    def test_nucleo_subconjunto_de_suposiciones(self):
        # a → x, b → ¬x; c es irrelevante
        s = _solver([[-1, 4], [-2, -4]], 4)
        r = s.solve([3, 1, 2])
        assert not r.satisfiable
        assert r.core <= {1, 2, 3}
        assert not s.solve(sorted(r.core)).satisfiable

    def test_suposicion_falsa_en_nivel_cero(self):
        s = _solver([[-1]], 2)
        r = s.solve([2, 1])
        assert not r.satisfiable
        assert r.core == {1}

    def test_solucion_respeta_suposiciones(self):
        s = _solver([[1, 2, 3]], 3)
        r = s.solve([-1, -2])
        assert r.satisfiable and r.value(3)


class TestMinimizeCore:
    """Núcleos mínimos por inclusión sobre problemas con grupos."""

    @pytest.mark.parametrize("semilla", range(50))
    def test_minimo(self, semilla):
        rng = random.Random(1000 + semilla)
        n, grupos = 6, 8
        s = Solver()
        s.ensure_vars(n)
        selectores = [s.new_var() for _ in range(grupos)]
        for sel in selectores:
            for _ in range(rng.randint(1, 4)):
                tam = rng.randint(1, 3)
                c = [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), tam)]
                s.add_clause(c + [-sel])
        # g1 y g2 se contradicen en v
        g1, g2 = rng.sample(selectores, 2)
        v = rng.randint(1, n)
        s.add_clause([v, -g1])
        s.add_clause([-v, -g2])

        r = s.solve(selectores)
        assert not r.satisfiable
        nucleo = minimize_core(s, r.core)
        assert nucleo <= set(selectores)
        assert not s.solve(sorted(nucleo)).satisfiable
        for x in nucleo:
            assert s.solve(sorted(nucleo - {x})).satisfiable


class TestParseDimacs:
    """Lectura de CNF con comentarios de grupo."""

    def test_grupos(self):
        texto = "c cabecera\np cnf 3 3\nc group 1 fact-conjunct m.rml:2:1\n1 -2 0\n3 0\nc group 2 property m.rml:9:1\n-1 0\n"
        cnf = parse_dimacs(texto)
        assert cnf.num_vars == 3
        assert cnf.clauses == [[1, -2], [3], [-1]]
        assert cnf.clause_group == [1, 1, 2]
        assert cnf.groups[2] == "property m.rml:9:1"

    def test_clausula_en_varias_lineas(self):
        cnf = parse_dimacs("p cnf 2 1\n1\n2 0\n")
        assert cnf.clauses == [[1, 2]]

    def test_sin_cabecera(self):
        with pytest.raises(RmlError):
            parse_dimacs("1 2 0\n")

    def test_literal_invalido(self):
        with pytest.raises(RmlError):
            parse_dimacs("p cnf 2 1\n1 x 0\n")
