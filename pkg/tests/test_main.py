"""Pruebas de la CLI: órdenes, salidas y códigos de salida."""

import json

import pytest

from config import FIXTURES_DIR, MODELS_DIR
from main import EXIT_ENTRADA, EXIT_OK, EXIT_VIOLACION, main

FSM = str(MODELS_DIR / "fsm.rml")
FSM_FIXED = str(MODELS_DIR / "fsm_fixed.rml")
FSM_UNSAT = str(MODELS_DIR / "fsm_unsat.rml")
FIXTURE = [str(FIXTURES_DIR / "fsm_cex.json"), str(FIXTURES_DIR / "fsm_sat.json")]


@pytest.fixture
def escribir(tmp_path):
    def _escribir(nombre, texto):
        ruta = tmp_path / nombre
        ruta.write_text(texto, encoding="utf-8")
        return str(ruta)

    return _escribir


class TestParse:
    def test_texto(self, capsys):
        assert main(["parse", FSM]) == EXIT_OK
        out = capsys.readouterr().out
        assert "SIGNATURAS" in out and "COMANDOS" in out

    def test_json(self, capsys):
        assert main(["parse", FSM, "--json"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert [s["signatura"] for s in doc["signaturas"]] == ["FSM", "State"]
        assert len(doc["conjunciones"]) == 9

    def test_error_de_sintaxis(self, escribir, capsys):
        ruta = escribir("roto.rml", "sig A {\n  r: set\n}\n")
        assert main(["parse", ruta]) == EXIT_ENTRADA
        assert "roto.rml" in capsys.readouterr().err

    def test_archivo_inexistente(self, tmp_path):
        assert main(["parse", str(tmp_path / "nada.rml")]) == EXIT_ENTRADA


class TestCheck:
    """Búsqueda de contraejemplos."""

    def test_sin_contraejemplo(self, capsys):
        assert main(["check", FSM_FIXED, "--scope", "3"]) == EXIT_OK
        assert "Sin contraejemplo" in capsys.readouterr().out

    def test_contraejemplo_json(self, capsys):
        assert main(["check", FSM, "--scope", "3", "--json"]) == EXIT_VIOLACION
        doc = json.loads(capsys.readouterr().out)
        assert doc["status"] == "counterexample"
        assert doc["scope"] == 3
        assert doc["instance"]["sigs"]["FSM"] == ["FSM0"]

    def test_volcado_cnf(self, tmp_path):
        ruta = tmp_path / "fsm.cnf"
        main(["check", FSM, "--scope", "2", "--emit-cnf", str(ruta)])
        texto = ruta.read_text(encoding="utf-8")
        assert texto.startswith("p cnf ")
        assert "c group" in texto

    def test_varios_checks_sin_nombre(self, escribir):
        ruta = escribir("dos.rml", "sig A {}\nassert X { some A }\nassert Y { no A }\ncheck X\ncheck Y\n")
        assert main(["check", ruta]) == EXIT_ENTRADA
        assert main(["check", ruta, "--command", "Y"]) in (EXIT_OK, EXIT_VIOLACION)

    def test_alcance_invalido(self):
        assert main(["check", FSM, "--scope", "0"]) == EXIT_ENTRADA


class TestLocalize:
    """Localización completa desde la CLI."""

    def test_fixture_texto(self, capsys):
        assert main(["localize", FSM, "--fixture", *FIXTURE, "--top", "3"]) == EXIT_VIOLACION
        out = capsys.readouterr().out
        assert "s.transition = none => s in FSM.stop" in out
        assert "1.58" in out

    def test_fixture_json(self, capsys):
        assert main(["localize", FSM, "--fixture", *FIXTURE, "--json"]) == EXIT_VIOLACION
        doc = json.loads(capsys.readouterr().out)
        assert doc["status"] == "localized"
        assert doc["ranking"][0]["score"] == {"num": 19, "den": 12}
        assert doc["ranking"][0]["hint"] == "=>"

    def test_exportar_csv(self, tmp_path):
        ruta = tmp_path / "ranking.csv"
        assert main(["localize", FSM, "--fixture", *FIXTURE, "--salida", str(ruta)]) == EXIT_VIOLACION
        assert ruta.exists()

    def test_exportar_sufijo_invalido(self, tmp_path):
        ruta = tmp_path / "ranking.xlsx"
        assert main(["localize", FSM, "--fixture", *FIXTURE, "-o", str(ruta)]) == EXIT_ENTRADA

    def test_modelo_corregido(self, capsys):
        assert main(["localize", FSM_FIXED, "--scope", "3"]) == EXIT_OK
        assert "Sin contraejemplo" in capsys.readouterr().out

    def test_propiedad_inalcanzable(self, capsys):
        assert main(["localize", FSM_UNSAT, "--scope", "3", "--json"]) == EXIT_VIOLACION
        doc = json.loads(capsys.readouterr().out)
        assert doc["status"] == "unsat-conflicts"
        assert doc["core"] and doc["ranking"]

    def test_pares_invalidos(self):
        assert main(["localize", FSM, "--pairs", "0"]) == EXIT_ENTRADA

    def test_fixture_ilegible(self, escribir):
        roto = escribir("cex.json", "{ no es json")
        assert main(["localize", FSM, "--fixture", roto, FIXTURE[1]]) == EXIT_ENTRADA

    def test_fixture_invertida(self):
        assert main(["localize", FSM, "--fixture", FIXTURE[1], FIXTURE[0]]) == EXIT_ENTRADA


class TestInstances:
    """Enumeración de instancias de predicados."""

    def test_dos_instancias(self, capsys):
        assert main(["instances", FSM, "--pred", "Ciclo", "-n", "2"]) == EXIT_OK
        lineas = capsys.readouterr().out.strip().splitlines()
        assert len(lineas) == 2
        primera, segunda = map(json.loads, lineas)
        assert primera != segunda

    def test_comando_run_por_defecto(self, capsys):
        assert main(["instances", FSM]) == EXIT_OK
        assert len(capsys.readouterr().out.strip().splitlines()) == 1

    def test_cero(self, capsys):
        assert main(["instances", FSM, "-n", "0"]) == EXIT_OK
        assert capsys.readouterr().out == ""

    def test_sin_instancias(self, escribir, capsys):
        ruta = escribir("vacio.rml", "sig A {}\nfact { no A }\npred Hay { some A }\nrun Hay for 2\n")
        assert main(["instances", ruta]) == EXIT_VIOLACION
        assert "Núcleo insatisfacible" in capsys.readouterr().err

    def test_predicado_inexistente(self):
        assert main(["instances", FSM, "--pred", "Otro"]) == EXIT_ENTRADA
