"""Pruebas del lexer, el parser y la resolución de nombres."""

import pytest

from config import DEFAULT_SCOPE
from exceptions import FrontendError
from frontend import TokenKind, parse_formula, parse_model, parse_rel, tokenize
from model import (
    BinaryFormula,
    BinaryRel,
    CmpOp,
    CommandKind,
    Compare,
    LogicOp,
    MultKind,
    MultTest,
    Multiplicity,
    PredRef,
    Quant,
    QuantKind,
    RelKind,
    RelName,
    RelOp,
    VarRef,
    pretty,
)
from tests.ayudantes import formula


class TestTokenize:
    """Lexer con comentarios y operadores de máxima coincidencia."""

    def test_comentarios_descartados(self):
        tokens = tokenize("sig A {} // comentario\n")
        assert [t.text for t in tokens] == ["sig", "A", "{", "}"]

    def test_operadores_compuestos(self):
        textos = [t.text for t in tokenize("a !in b => c <=> d -> e && f || g != h")]
        assert textos == ["a", "!in", "b", "=>", "c", "<=>", "d", "->", "e", "&&", "f", "||", "g", "!=", "h"]

    def test_clases_de_token(self):
        tokens = tokenize("check X for 5")
        assert [t.kind for t in tokens] == [
            TokenKind.KEYWORD, TokenKind.IDENT, TokenKind.KEYWORD, TokenKind.INTEGER,
        ]

    def test_ubicacion_base_uno(self):
        tokens = tokenize("sig A {\n  r: set A\n}", "m.rml")
        r = next(t for t in tokens if t.text == "r")
        assert (r.span.start_line, r.span.start_col) == (2, 3)

    def test_salto_tras_operador_continua_la_linea(self):
        tokens = tokenize("a =>\n b\nc")
        assert [t.text for t in tokens] == ["a", "=>", "b", "\n", "c"]

    def test_caracter_invalido(self):
        with pytest.raises(FrontendError) as exc:
            tokenize("sig A { } $ #")
        assert len(exc.value.diagnostics) == 2
        assert exc.value.diagnostics[0].span.start_col == 11


class TestParseFormula:
    """Precedencias y formas de las fórmulas."""

    def test_implicacion_asocia_a_la_derecha(self):
        f = parse_formula("a => b => c")
        assert isinstance(f, BinaryFormula) and f.op is LogicOp.IMPLIES
        assert isinstance(f.right, BinaryFormula) and f.right.op is LogicOp.IMPLIES

    def test_conjuncion_liga_mas_que_disyuncion(self):
        f = parse_formula("a || b && c")
        assert f.op is LogicOp.OR
        assert f.right.op is LogicOp.AND

    @pytest.mark.parametrize(
        "fuente,esperada",
        [
            ("a + b & c", BinaryRel(RelOp.UNION, RelName("a"), BinaryRel(RelOp.INTERSECT, RelName("b"), RelName("c")))),
            ("a & b -> c", BinaryRel(RelOp.INTERSECT, RelName("a"), BinaryRel(RelOp.PRODUCT, RelName("b"), RelName("c")))),
            ("a -> b.c", BinaryRel(RelOp.PRODUCT, RelName("a"), BinaryRel(RelOp.JOIN, RelName("b"), RelName("c")))),
            ("a - b + c", BinaryRel(RelOp.UNION, BinaryRel(RelOp.DIFFERENCE, RelName("a"), RelName("b")), RelName("c"))),
        ],
    )
    def test_precedencia_relacional(self, fuente, esperada):
        e = parse_rel(fuente)
        assert e == esperada
        assert pretty(e) == fuente

    def test_comparaciones(self):
        assert parse_formula("a in b").op is CmpOp.IN
        assert parse_formula("a !in b").op is CmpOp.NOT_IN
        assert parse_formula("a not in b").op is CmpOp.NOT_IN
        assert parse_formula("a != b").op is CmpOp.NEQ

    def test_prueba_de_multiplicidad_frente_a_cuantificador(self):
        assert isinstance(parse_formula("no FSM.stop.transition"), MultTest)
        q = parse_formula("no s: State | some s.transition")
        assert isinstance(q, Quant) and q.kind is QuantKind.NO

    def test_no_con_varias_variables(self):
        q = parse_formula("no a, b: S | a = b")
        assert q.kind is QuantKind.ALL and q.var == "a"
        assert q.body.kind is QuantKind.NO and q.body.var == "b"

    def test_relacion_entre_parentesis_en_comparacion(self):
        f = parse_formula("(r + s).t in u")
        assert isinstance(f, Compare)
        assert pretty(f.left) == "(r + s).t"

    def test_nombre_suelto_es_predicado(self):
        assert isinstance(parse_formula("Ciclo"), PredRef)

    def test_texto_sobrante(self):
        with pytest.raises(FrontendError):
            parse_formula("a in b c")


class TestModeloFsm:
    """Resolución del modelo FSM incluido."""

    def test_declaraciones(self, fsm):
        assert [s.name for s in fsm.sigs] == ["FSM", "State"]
        assert fsm.sig("FSM").mult is Multiplicity.ONE
        assert [f.name for f in fsm.fields] == ["start", "stop", "transition"]
        assert fsm.field_decl("transition").owner == "State"

    def test_una_conjuncion_por_linea(self, fsm):
        assert [c.label for c in fsm.facts] == [
            "OneStartAndStop[0]", "OneStartAndStop[1]", "OneStartAndStop[2]",
            "ValidStartAndStop[0]", "ValidStartAndStop[1]", "ValidStartAndStop[2]",
            "Reachability[0]", "Reachability[1]",
        ]

    def test_ubicacion_de_las_conjunciones(self, fsm):
        defectuosa = fsm.conjunct(("ValidStartAndStop", 2))
        assert defectuosa.span.start_line == 19
        assert pretty(defectuosa.formula) == "all s: State | s.transition = none => s in FSM.stop"
        assert fsm.conjunct(("Reachability", 1)).span.start_line == 25

    def test_comandos(self, fsm):
        check, run = fsm.commands
        assert (check.kind, check.target, check.scope) == (CommandKind.CHECK, "NoStopTransition", 5)
        assert (run.kind, run.target, run.scope) == (CommandKind.RUN, "Ciclo", 3)

    def test_nombres_ligados(self, fsm):
        q = fsm.conjunct(("ValidStartAndStop", 1)).formula
        comparacion = q.body
        assert isinstance(comparacion.right.left, VarRef)
        assert isinstance(comparacion.left.left, RelName)
        assert comparacion.left.left.kind is RelKind.SIG

    def test_asercion(self, fsm):
        p = fsm.asserts["NoStopTransition"]
        assert isinstance(p, MultTest) and p.kind is MultKind.NO


class TestModelos:
    """Casos del frontend sobre modelos pequeños."""

    def test_alcance_por_defecto(self):
        m = parse_model("sig A {}\nassert X { some A }\ncheck X\n")
        assert m.commands[0].scope == DEFAULT_SCOPE

    def test_and_de_nivel_superior_separa_conjunciones(self):
        m = parse_model("sig A { r: set A }\nfact F { some A && no r }\n")
        assert len(m.facts) == 2

    def test_and_entre_parentesis_no_separa(self):
        m = parse_model("sig A { r: set A }\nfact F { (some A && no r) }\n")
        assert len(m.facts) == 1

    def test_hecho_anonimo(self):
        m = parse_model("sig A {}\nfact { some A }\n")
        assert m.facts[0].owner == "fact_0"

    def test_multiplicidad_de_campo_por_defecto(self):
        m = parse_model("sig A { r: A }\n")
        assert m.field_decl("r").mult is Multiplicity.SET

    def test_predicado_referido(self):
        m = parse_model("sig A { r: set A }\npred P { some r }\nfact { P }\n")
        ref = m.facts[0].formula
        assert isinstance(ref, PredRef) and ref.body is not None

    def test_formula_suelta_resuelta(self, fsm):
        f = formula(fsm, "all s: State | s in FSM.stop")
        assert isinstance(f.body.left, VarRef)


class TestErrores:
    """Diagnósticos acumulados con ubicación."""

    def test_nombre_desconocido(self):
        with pytest.raises(FrontendError) as exc:
            parse_model("sig A {}\nfact { some B }\n", "m.rml")
        (d,) = exc.value.diagnostics
        assert (d.span.file, d.span.start_line) == ("m.rml", 2)

    def test_errores_de_varias_declaraciones(self):
        fuente = "sig A {}\nfact { some A in }\nfact { B }\n"
        with pytest.raises(FrontendError) as exc:
            parse_model(fuente)
        assert len(exc.value.diagnostics) >= 1

    def test_aridades_distintas(self):
        with pytest.raises(FrontendError):
            parse_model("sig A { r: set A }\nfact { A = r }\n")

    def test_join_de_unarios(self):
        with pytest.raises(FrontendError):
            parse_model("sig A {}\nfact { some A.A }\n")

    def test_ciclo_de_predicados(self):
        with pytest.raises(FrontendError, match="Ciclo"):
            parse_model("sig A {}\npred P { Q }\npred Q { P }\n")

    def test_check_de_asercion_inexistente(self):
        with pytest.raises(FrontendError):
            parse_model("sig A {}\ncheck Nada for 2\n")

    def test_run_de_predicado_inexistente(self):
        with pytest.raises(FrontendError):
            parse_model("sig A {}\nrun Nada\n")

    def test_alcance_cero(self):
        with pytest.raises(FrontendError):
            parse_model("sig A {}\nassert X { some A }\ncheck X for 0\n")

    def test_signatura_duplicada(self):
        with pytest.raises(FrontendError, match="duplicada"):
            parse_model("sig A {}\nsig A {}\n")
