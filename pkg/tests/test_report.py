"""Pruebas de tablas, JSON, texto y exportación del reporte."""

import codecs
import json
from fractions import Fraction

import pandas as pd
import pytest

from config import COLUMNAS_RANKING, CSV_ENCODING
from exceptions import ConfigError
from grounder import GroupKind, ground
from localizer import RankedReport, ReportStatus
from report import (
    core_dataframe,
    export_ranking,
    fraction_to_json,
    instance_dataframe,
    model_summary,
    ranking_dataframe,
    render_text,
    report_to_dict,
)


class TestRankingDataframe:
    """Tabla del ranking con puntajes redondeados."""

    def test_columnas_y_orden(self, reporte_fsm):
        df = ranking_dataframe(reporte_fsm)
        assert list(df.columns) == COLUMNAS_RANKING
        assert len(df) == len(reporte_fsm.ranking)
        assert df["rango"].tolist() == list(range(1, len(df) + 1))

    def test_primera_fila(self, reporte_fsm):
        fila = ranking_dataframe(reporte_fsm).iloc[0]
        assert fila["expresion"] == "s.transition = none => s in FSM.stop"
        assert fila["ubicacion"].endswith("fsm.rml:19:18")
        assert fila["puntaje"] == 1.58
        assert fila["booleano"] == 1.0
        assert fila["relacional"] == 0.58
        assert fila["pista"] == "=>"

    def test_top(self, reporte_fsm):
        assert len(ranking_dataframe(reporte_fsm, top=3)) == 3

    def test_reporte_vacio(self):
        df = ranking_dataframe(RankedReport(ReportStatus.LOCALIZED))
        assert df.empty
        assert list(df.columns) == COLUMNAS_RANKING


class TestTablasDelModelo:
    def test_resumen(self, fsm):
        tablas = model_summary(fsm)
        assert set(tablas) == {"signaturas", "campos", "conjunciones", "comandos"}
        assert tablas["signaturas"]["signatura"].tolist() == ["FSM", "State"]
        assert tablas["signaturas"]["multiplicidad"].tolist() == ["one", "set"]
        assert tablas["campos"]["campo"].tolist() == ["start", "stop", "transition"]
        assert len(tablas["conjunciones"]) == len(fsm.facts) + 1
        assert tablas["comandos"]["tipo"].tolist() == ["check", "run"]
        assert tablas["comandos"]["alcance"].tolist() == [5, 3]

    def test_instancia(self, fsm_cex):
        df = instance_dataframe(fsm_cex).set_index("relacion")
        assert df.loc["State", "cantidad"] == 4
        assert df.loc["transition", "cantidad"] == 5
        assert df.loc["transition", "tuplas"].startswith("State0->State1, State0->State3")
        assert df.loc["stop", "tuplas"] == "FSM0->State3"

    def test_nucleo(self, fsm):
        problema = ground(fsm, fsm.asserts["NoStopTransition"], True, 2)
        grupos = tuple(g for g in problema.groups.values() if g.kind is not GroupKind.DEFINITION)[:2]
        df = core_dataframe(grupos)
        assert list(df.columns) == ["grupo", "tipo", "descripcion", "ubicacion"]
        assert df["grupo"].tolist() == [g.id for g in grupos]
        assert df["tipo"].tolist() == [g.kind.value for g in grupos]


class TestJson:
    """Documento JSON con racionales exactos."""

    def test_fraccion(self):
        assert fraction_to_json(Fraction(19, 12)) == {"num": 19, "den": 12}
        assert fraction_to_json(Fraction(0)) == {"num": 0, "den": 1}

    def test_documento(self, reporte_fsm):
        doc = report_to_dict(reporte_fsm)
        assert doc["status"] == "localized"
        assert doc["command"] == "check NoStopTransition for 5"
        assert doc["pairs_used"] == 1
        assert doc["diff"] == {"relations": ["stop", "transition"], "atoms": ["State1", "State3"], "fallback": False}
        primero = doc["ranking"][0]
        assert primero["score"] == {"num": 19, "den": 12}
        assert primero["relational"] == {"num": 7, "den": 12}
        assert primero["conjunct"] == {"owner": "ValidStartAndStop", "index": 2}
        assert primero["span"]["start_line"] == 19
        assert doc["pairs"][0]["distance"] == 1
        assert doc["core"] == []
        assert json.loads(json.dumps(doc)) == doc

    def test_top_recorta_el_ranking(self, reporte_fsm):
        assert len(report_to_dict(reporte_fsm, top=2)["ranking"]) == 2


class TestRenderText:
    def test_ranking(self, reporte_fsm):
        texto = render_text(reporte_fsm)
        assert "check NoStopTransition for 5" in texto
        assert "Diff: relaciones {stop, transition}, átomos {State1, State3}" in texto
        assert "s.transition = none => s in FSM.stop" in texto
        assert "1.58" in texto

    def test_sin_contraejemplo(self):
        texto = render_text(RankedReport(ReportStatus.NO_COUNTEREXAMPLE, scope=3))
        assert "Sin contraejemplo" in texto
        assert "Diff" not in texto

    def test_ranking_vacio(self):
        assert "ranking vacío" in render_text(RankedReport(ReportStatus.LOCALIZED))


class TestExportRanking:
    """Exportación a CSV y Parquet."""

    def test_csv(self, reporte_fsm, tmp_path):
        ruta = export_ranking(ranking_dataframe(reporte_fsm), tmp_path / "sub" / "ranking.csv")
        assert ruta.read_bytes().startswith(codecs.BOM_UTF8)
        df = pd.read_csv(ruta, encoding=CSV_ENCODING)
        assert list(df.columns) == COLUMNAS_RANKING
        assert df["puntaje"].iloc[0] == 1.58

    def test_parquet(self, reporte_fsm, tmp_path):
        original = ranking_dataframe(reporte_fsm)
        ruta = export_ranking(original, tmp_path / "ranking.parquet")
        leido = pd.read_parquet(ruta)
        assert list(leido.columns) == COLUMNAS_RANKING
        assert leido["expresion"].tolist() == original["expresion"].tolist()
        assert leido["puntaje"].tolist() == original["puntaje"].tolist()

    def test_sufijo_no_soportado(self, reporte_fsm, tmp_path):
        with pytest.raises(ConfigError):
            export_ranking(ranking_dataframe(reporte_fsm), tmp_path / "ranking.txt")
