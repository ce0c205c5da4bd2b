"""
report.py — Tablas y documentos de salida del localizador.

Responsabilidades:
  1. Convertir el ranking, las instancias y el resumen del modelo en
     ``DataFrame`` de pandas (columnas canónicas en español).
  2. Serializar un ``RankedReport`` a JSON con racionales exactos
     ``{"num", "den"}``.
  3. Renderizar el texto de la CLI (puntajes con 2 decimales).
  4. Exportar el ranking a CSV o Parquet.

Principios:
  • Inmutabilidad: las funciones construyen tablas nuevas, nunca modifican
    el reporte.
  • El texto y el JSON salen de los mismos ``Fraction``; sólo cambia el
    redondeo al imprimir.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import pandas as pd

from config import (
    COLUMNAS_RANKING,
    CSV_ENCODING,
    CSV_SEPARATOR,
    PARQUET_ENGINE,
    SCORE_DECIMALS,
    SUFIJOS_EXPORTACION,
)
from exceptions import ConfigError
from grounder import ClauseGroup
from localizer import Diff, RankedReport, ReportStatus, ScoredNode
from model import Instance, Model, instance_to_dict, pretty

logger = logging.getLogger(__name__)


# ════════════════════════════════════════════════════════════
# 1. TABLAS
# ════════════════════════════════════════════════════════════


def _redondear(f: Fraction) -> float:
    return round(float(f), SCORE_DECIMALS)


def ranking_dataframe(report: RankedReport, top: Optional[int] = None) -> pd.DataFrame:
    """Tabla del ranking, una fila por nodo, en el orden del reporte.

    Args:
        report: Reporte ya ordenado.
        top:    Máximo de filas (``None`` = todas).
    """
    nodos = report.ranking if top is None else report.ranking[:top]
    filas = [
        {
            "rango": i,
            "expresion": n.text,
            "ubicacion": str(n.span),
            "puntaje": _redondear(n.total),
            "booleano": _redondear(n.boolean_score),
            "relacional": _redondear(n.relational_score),
            "pista": n.operator_hint or "",
        }
        for i, n in enumerate(nodos, start=1)
    ]
    return pd.DataFrame(filas, columns=COLUMNAS_RANKING)


def instance_dataframe(inst: Instance) -> pd.DataFrame:
    """Una fila por relación con sus tuplas en notación ``A->B``."""
    filas = []
    for nombre in inst.relation_names():
        tuplas = sorted(inst.relation(nombre))
        filas.append(
            {
                "relacion": nombre,
                "tuplas": ", ".join("->".join(a.name for a in t) for t in tuplas),
                "cantidad": len(tuplas),
            }
        )
    return pd.DataFrame(filas, columns=["relacion", "tuplas", "cantidad"])


def model_summary(m: Model) -> dict[str, pd.DataFrame]:
    """Tablas de signaturas, campos, conjunciones y comandos del modelo."""
    sigs = pd.DataFrame(
        [
            {"signatura": s.name, "multiplicidad": s.mult.value, "campos": len(s.fields)}
            for s in m.sigs
        ],
        columns=["signatura", "multiplicidad", "campos"],
    )
    campos = pd.DataFrame(
        [
            {"campo": f.name, "dueno": f.owner, "destino": f.target, "multiplicidad": f.mult.value}
            for f in m.fields
        ],
        columns=["campo", "dueno", "destino", "multiplicidad"],
    )
    conjunciones = pd.DataFrame(
        [
            {"conjuncion": c.label, "ubicacion": str(c.span), "expresion": pretty(c.formula)}
            for c in m.all_conjuncts()
        ],
        columns=["conjuncion", "ubicacion", "expresion"],
    )
    comandos = pd.DataFrame(
        [
            {"tipo": c.kind.value, "objetivo": c.target, "alcance": c.scope}
            for c in m.commands
        ],
        columns=["tipo", "objetivo", "alcance"],
    )
    logger.info(
        "Resumen del modelo: %d signaturas, %d campos, %d conjunciones, %d comandos.",
        len(sigs), len(campos), len(conjunciones), len(comandos),
    )
    return {"signaturas": sigs, "campos": campos, "conjunciones": conjunciones, "comandos": comandos}


def core_dataframe(core: tuple[ClauseGroup, ...]) -> pd.DataFrame:
    return pd.DataFrame(
        [{"grupo": g.id, "tipo": g.kind.value, "descripcion": g.label, "ubicacion": str(g.span)} for g in core],
        columns=["grupo", "tipo", "descripcion", "ubicacion"],
    )


# ════════════════════════════════════════════════════════════
# 2. JSON
# ════════════════════════════════════════════════════════════


def fraction_to_json(f: Fraction) -> dict[str, int]:
    return {"num": f.numerator, "den": f.denominator}


def _nodo_a_dict(n: ScoredNode) -> dict[str, Any]:
    return {
        "expr": n.text,
        "span": n.span.to_dict(),
        "score": fraction_to_json(n.total),
        "boolean": fraction_to_json(n.boolean_score),
        "relational": fraction_to_json(n.relational_score),
        "hint": n.operator_hint,
        "kind": n.kind.value,
        "conjunct": {"owner": n.conjunct[0], "index": n.conjunct[1]},
    }


def _diff_a_dict(d: Optional[Diff]) -> dict[str, Any]:
    if d is None:
        return {"relations": [], "atoms": [], "fallback": False}
    return {
        "relations": sorted(d.relations),
        "atoms": [a.name for a in sorted(d.atoms)],
        "fallback": d.fallback,
    }


def report_to_dict(report: RankedReport, top: Optional[int] = None) -> dict[str, Any]:
    """Documento JSON del reporte; ``top`` recorta el ranking como en el texto."""
    nodos = report.ranking if top is None else report.ranking[:top]
    return {
        "status": report.status.value,
        "command": str(report.command) if report.command else None,
        "scope": report.scope,
        "pairs_used": report.pairs_used,
        "diff": _diff_a_dict(report.diff),
        "ranking": [_nodo_a_dict(n) for n in nodos],
        "pairs": [
            {"cex": instance_to_dict(p.cex), "sat": instance_to_dict(p.sat), "distance": p.distance}
            for p in report.pairs
        ],
        "core": [
            {"group": g.id, "kind": g.kind.value, "label": g.label, "span": g.span.to_dict()}
            for g in report.core
        ],
    }


# ════════════════════════════════════════════════════════════
# 3. TEXTO
# ════════════════════════════════════════════════════════════


def render_text(report: RankedReport, top: Optional[int] = None) -> str:
    """Texto de la CLI: encabezado, diff y tabla del ranking."""
    lineas = ["=" * 70]
    if report.command is not None:
        lineas.append(f"Comando: {report.command}  (alcance {report.scope})")

    if report.status is ReportStatus.NO_COUNTEREXAMPLE:
        lineas.append(f"Sin contraejemplo: la aserción se cumple a alcance {report.scope}.")
        lineas.append("=" * 70)
        return "\n".join(lineas)

    d = _diff_a_dict(report.diff)
    lineas.append(f"Estado: {report.status.value}  |  pares usados: {report.pairs_used}")
    lineas.append(
        f"Diff: relaciones {{{', '.join(d['relations'])}}}, átomos {{{', '.join(d['atoms'])}}}"
        + ("  [unión: sin diferencias comunes]" if d["fallback"] else "")
    )
    if report.status is ReportStatus.UNSAT_CONFLICTS:
        lineas.append(f"Núcleo insatisfacible de {len(report.core)} grupos; conflictos con la propiedad:")
    lineas.append("=" * 70)

    df = ranking_dataframe(report, top)
    if df.empty:
        lineas.append("(ranking vacío: ninguna conjunción menciona las relaciones del diff)")
    else:
        lineas.append(
            df.to_string(index=False, float_format=lambda x: f"{x:.{SCORE_DECIMALS}f}")
        )
    return "\n".join(lineas)


# ════════════════════════════════════════════════════════════
# 4. EXPORTACIÓN
# ════════════════════════════════════════════════════════════


def export_ranking(df: pd.DataFrame, ruta: Path) -> Path:
    """Guarda la tabla del ranking como ``.csv`` o ``.parquet``.

    Raises:
        ConfigError: sufijo no soportado.
    """
    ruta = Path(ruta)
    sufijo = ruta.suffix.lower()
    if sufijo not in SUFIJOS_EXPORTACION:
        raise ConfigError("Formato de exportación no soportado", {"ruta": str(ruta)})
    ruta.parent.mkdir(parents=True, exist_ok=True)
    if sufijo == ".csv":
        df.to_csv(ruta, index=False, sep=CSV_SEPARATOR, encoding=CSV_ENCODING)
    else:
        df.to_parquet(ruta, index=False, engine=PARQUET_ENGINE)
    logger.info("Ranking exportado a: %s (%d filas)", ruta, len(df))
    return ruta
