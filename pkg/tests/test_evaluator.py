"""Pruebas del evaluador concreto, la instanciación y el oráculo de enumeración."""

import pytest

from evaluator import (
    check_instance,
    compatible_instantiations,
    enumerate_instances,
    eval_formula,
    eval_rel,
    guarded_instantiate,
    involved_atoms,
    strip_quantifiers,
)
from exceptions import EnumerationBudgetError, InternalError
from frontend import parse_model
from model import Atom, Instance
from tests.ayudantes import estado, formula, instancia


class TestEvalRel:
    """Valores de expresiones sobre la instancia sat del FSM."""

    def _rel(self, m, fuente, inst, b=None):
        b = b or {}
        f = formula(m, f"{fuente} = {fuente}", b)
        return eval_rel(f.left, inst, b)

    def test_join_con_signatura_one(self, fsm, fsm_sat):
        assert self._rel(fsm, "FSM.stop", fsm_sat).tuples == {(estado(3),)}

    def test_clausura_reflexiva_incluye_universo(self, fsm, fsm_sat):
        s = self._rel(fsm, "s.*transition", fsm_sat, {"s": estado(3)})
        assert s.tuples == {(estado(3),)}

    def test_clausura_transitiva(self, fsm, fsm_sat):
        alcanzables = self._rel(fsm, "FSM.start.^transition", fsm_sat)
        assert alcanzables.tuples == {(estado(1),), (estado(2),), (estado(3),)}

    def test_transpuesta(self, fsm, fsm_sat):
        previos = self._rel(fsm, "FSM.stop.~transition", fsm_sat)
        assert previos.tuples == {(estado(0),), (estado(2),)}

    def test_iden_sobre_atomos_presentes(self, grafo):
        inst = instancia({"N": [0, 1]})
        iden = self._rel(grafo, "iden", inst)
        assert iden.tuples == {(Atom("N", 0), Atom("N", 0)), (Atom("N", 1), Atom("N", 1))}

    def test_variable_sin_ligar(self, fsm, fsm_sat):
        f = formula(fsm, "all s: State | some s.transition")
        with pytest.raises(InternalError):
            eval_rel(f.body.expr, fsm_sat, {})


class TestEvalFormula:
    """Valores de verdad con el par fijo."""

    def test_propiedad(self, fsm, fsm_cex, fsm_sat):
        p = fsm.asserts["NoStopTransition"]
        assert not eval_formula(p, fsm_cex, {})
        assert eval_formula(p, fsm_sat, {})

    def test_implicacion_defectuosa_por_estado(self, fsm, fsm_cex, fsm_sat):
        cuerpo = fsm.conjunct(("ValidStartAndStop", 2)).formula.body
        assert eval_formula(cuerpo, fsm_cex, {"s": estado(1)})
        assert eval_formula(cuerpo, fsm_sat, {"s": estado(3)})

    def test_cuantificadores(self, fsm, fsm_cex):
        assert eval_formula(formula(fsm, "some s: State | s in s.^transition"), fsm_cex, {})
        assert not eval_formula(formula(fsm, "no s: State | some s.transition"), fsm_cex, {})
        assert eval_formula(formula(fsm, "all s: State | lone s.~transition & FSM.start"), fsm_cex, {})

    def test_multiplicidades(self, fsm, fsm_cex):
        assert eval_formula(formula(fsm, "one FSM.start"), fsm_cex, {})
        assert not eval_formula(formula(fsm, "lone State"), fsm_cex, {})
        assert eval_formula(formula(fsm, "no none"), fsm_cex, {})

    def test_predicado(self, fsm, fsm_cex, fsm_sat):
        assert eval_formula(formula(fsm, "Ciclo"), fsm_cex, {})
        assert not eval_formula(formula(fsm, "Ciclo"), fsm_sat, {})


class TestInvolvedAtoms:
    """Átomos involucrados en un nodo bajo una ligadura."""

    def test_hoja_relacional(self, fsm, fsm_cex):
        cuerpo = fsm.conjunct(("Reachability", 1)).formula.body
        assert involved_atoms(cuerpo.right, fsm_cex, {"s": estado(1)}) == {
            estado(1), estado(2), estado(3),
        }

    def test_incluye_variable_ligada(self, fsm, fsm_sat):
        cuerpo = fsm.conjunct(("ValidStartAndStop", 2)).formula.body
        # s.transition es vacío en State3 pero s está ligada
        assert estado(3) in involved_atoms(cuerpo.left, fsm_sat, {"s": estado(3)})

    def test_comparacion_une_ambos_lados(self, fsm, fsm_cex):
        cuerpo = fsm.conjunct(("ValidStartAndStop", 2)).formula.body
        atomos = involved_atoms(cuerpo.right, fsm_cex, {"s": estado(1)})
        assert atomos == {estado(1), estado(3)}

    def test_cuantificador_interno(self, fsm, fsm_cex):
        f = formula(fsm, "some t: s.transition | t in FSM.stop", {"s"})
        atomos = involved_atoms(f, fsm_cex, {"s": estado(0)})
        # cota {State1, State3}; FSM.stop vale {State3}
        assert atomos == {estado(0), estado(1), estado(3)}

    def test_cota_vacia(self, fsm, fsm_sat):
        f = formula(fsm, "all t: s.transition | t.transition in FSM.start", {"s"})
        assert involved_atoms(f, fsm_sat, {"s": estado(3)}) == {estado(3), estado(0)}


class TestInstanciacion:
    """Despojo de cuantificadores e instanciación con guardas."""

    def test_prefijo_universal(self, fsm):
        prefijo = strip_quantifiers(fsm.conjunct(("OneStartAndStop", 0)).formula)
        assert [v for v, _, _ in prefijo.variables] == ["start1", "start2"]
        assert prefijo.universal

    def test_atomo_incompatible_se_descarta(self, fsm):
        c = fsm.conjunct(("ValidStartAndStop", 2))
        assert guarded_instantiate(c, (Atom("FSM", 0),), fsm) is None

    def test_numero_de_atomos_distinto(self, fsm):
        c = fsm.conjunct(("ValidStartAndStop", 2))
        with pytest.raises(InternalError):
            guarded_instantiate(c, (estado(0), estado(1)), fsm)

    def test_combinaciones_compatibles(self, fsm):
        c = fsm.conjunct(("OneStartAndStop", 1))
        atomos = {Atom("FSM", 0), estado(1), estado(3)}
        ligaduras = [i.binding for i in compatible_instantiations(c, atomos, fsm)]
        assert len(ligaduras) == 4
        assert all(a.sig == "State" for b in ligaduras for a in b.values())

    def test_guardas(self, fsm, fsm_sat):
        c = fsm.conjunct(("OneStartAndStop", 1))
        (dentro,) = compatible_instantiations(c, {estado(3)}, fsm)
        assert dentro.guards_hold(fsm_sat)
        (fuera,) = compatible_instantiations(c, {estado(1)}, fsm)
        assert not fuera.guards_hold(fsm_sat)


class TestCheckInstance:
    def test_fixtures_validas(self, fsm, fsm_cex, fsm_sat):
        assert check_instance(fsm, fsm_cex) == []
        assert check_instance(fsm, fsm_sat) == []

    def test_hecho_violado(self, fsm, fsm_sat):
        sin_stop = Instance(fsm_sat.sig_contents, {**fsm_sat.field_contents, "stop": frozenset()})
        problemas = check_instance(fsm, sin_stop)
        assert any("OneStartAndStop[2]" in p for p in problemas)

    def test_multiplicidad_de_signatura(self, fsm, fsm_sat):
        dos = Instance({**fsm_sat.sig_contents, "FSM": frozenset({Atom("FSM", 0), Atom("FSM", 1)})},
                       fsm_sat.field_contents)
        assert any("multiplicidad one" in p for p in check_instance(fsm, dos))


class TestEnumerate:
    """Oráculo de enumeración exhaustiva."""

    def test_cuenta_sin_hechos(self, grafo):
        # Subconjuntos de N y, por cada uno, subconjuntos de N×N presentes
        esperado = sum(
            n_sub * 2 ** (k * k) for k, n_sub in ((0, 1), (1, 2), (2, 1))
        )
        assert len(enumerate_instances(grafo, 2)) == esperado

    def test_filtro(self, grafo):
        simetricas = enumerate_instances(grafo, 2, formula(grafo, "e = ~e"))
        assert len(simetricas) == 1 + 2 * 2 + 2 ** 3
        assert all(inst.relation("e") == {(b, a) for a, b in inst.relation("e")} for inst in simetricas)

    def test_lone_sig(self):
        m = parse_model("lone sig A {}\n")
        assert len(enumerate_instances(m, 3)) == 4

    def test_presupuesto(self, fsm):
        with pytest.raises(EnumerationBudgetError) as exc:
            enumerate_instances(fsm, 5)
        assert exc.value.context["variables"] > 24
