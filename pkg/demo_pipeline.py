"""
demo_pipeline.py — Demostración del localizador sin búsqueda SAT.

Recorre cada etapa con el modelo FSM incluido y el par fijo
(contraejemplo, instancia sat) de ``fixtures/``:
  1. Carga y resolución del modelo
  2. Validación de las instancias fijas
  3. Diff, selección de conjunciones y puntajes
  4. Exportación CSV del ranking

Útil como verificación rápida de la instalación: termina con código 0
si la implicación defectuosa queda en el primer lugar.
"""

import logging
import sys

import pandas as pd

from config import FIXTURES_DIR, MODELS_DIR, OUTPUT_DIR, setup_logging
from frontend import load_model
from localizer import localize, select_command
from main import cargar_instancia
from report import export_ranking, ranking_dataframe, render_text

logger = logging.getLogger(__name__)

EXPRESION_ESPERADA = "s.transition = none => s in FSM.stop"


def demo_modelo():
    """Carga el modelo FSM y lista sus conjunciones."""
    logger.info("=" * 70)
    logger.info("[1/3] ETAPA 1: MODELO — Parsing y resolución")
    logger.info("=" * 70)

    m = load_model(MODELS_DIR / "fsm.rml")
    for c in m.facts:
        logger.info("  • %-24s %s", c.label, c.span)
    return m


def demo_localizacion(m):
    """Localiza con el par fijo y muestra el ranking."""
    logger.info("=" * 70)
    logger.info("[2/3] ETAPA 2: LOCALIZACIÓN — Par fijo (cex, sat)")
    logger.info("=" * 70)

    cex = cargar_instancia(FIXTURES_DIR / "fsm_cex.json", m)
    sat = cargar_instancia(FIXTURES_DIR / "fsm_sat.json", m)
    reporte = localize(m, select_command(m), fixture=(cex, sat))
    print(render_text(reporte, top=6))
    return reporte


def demo_export(reporte):
    """Exporta el ranking a CSV y lo vuelve a leer."""
    logger.info("=" * 70)
    logger.info("[3/3] ETAPA 3: EXPORTACIÓN — Ranking en CSV")
    logger.info("=" * 70)

    ruta_csv = export_ranking(ranking_dataframe(reporte), OUTPUT_DIR / "demo_fsm_ranking.csv")
    df_leida = pd.read_csv(ruta_csv, encoding="utf-8-sig")
    print(f"\n✓ CSV leído de vuelta ({len(df_leida)} filas): {ruta_csv}")
    return ruta_csv


def main():
    """Ejecuta la demostración completa."""
    setup_logging()

    logger.info("╔" + "═" * 68 + "╗")
    logger.info("║ DEMO: Localización de fallas en el modelo FSM (par fijo)           ║")
    logger.info("╚" + "═" * 68 + "╝")

    try:
        m = demo_modelo()
        reporte = demo_localizacion(m)
        demo_export(reporte)

        primero = reporte.ranking[0] if reporte.ranking else None
        if primero is None or primero.text != EXPRESION_ESPERADA:
            logger.error("El primer lugar no es la implicación esperada: %s", primero)
            return 1

        logger.info("=" * 70)
        logger.info("✓ DEMO COMPLETADA: primer lugar '%s' (%.2f, pista %s)",
                    primero.text, float(primero.total), primero.operator_hint)
        logger.info("=" * 70)
        return 0

    except Exception as exc:
        logger.exception("Error en demostración: %s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
