"""
config.py — Constantes de configuración centralizadas del localizador RML.

Contiene:
  • Rutas de modelos de ejemplo, fixtures, salidas y logs.
  • Valores por defecto del análisis acotado (alcance, pares, presupuesto).
  • Constantes del solucionador CDCL (decaimiento, reinicios).
  • Parámetros de exportación de rankings (CSV / Parquet).
  • Configuración de logging estructurado.

Se importa desde todos los demás módulos para evitar valores mágicos.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from exceptions import ConfigError

# ────────────────────────────────────────────────────────────
# 1. RUTAS Y DIRECTORIOS
# ────────────────────────────────────────────────────────────

BASE_DIR: Path = Path(__file__).resolve().parent
MODELS_DIR: Path = BASE_DIR / "models"
FIXTURES_DIR: Path = BASE_DIR / "fixtures"
OUTPUT_DIR: Path = BASE_DIR / "output"
LOG_DIR: Path = BASE_DIR / "logs"

# Crear directorios si no existen
OUTPUT_DIR.mkdir(exist_ok=True)
LOG_DIR.mkdir(exist_ok=True)

MODEL_SUFFIX: str = ".rml"

# ────────────────────────────────────────────────────────────
# 2. ANÁLISIS ACOTADO
# ────────────────────────────────────────────────────────────

DEFAULT_SCOPE: int = 3                                  # Alcance si el comando omite "for N"
DEFAULT_PAIRS: int = 5                                  # Pares (cex, sat) por localización
ENUM_MAX_VARS: int = 24                                 # Presupuesto del oráculo de enumeración

# ────────────────────────────────────────────────────────────
# 3. SOLUCIONADOR SAT
# ────────────────────────────────────────────────────────────

VAR_DECAY: float = 0.95                                 # Decaimiento de actividad VSIDS
ACTIVITY_RESCALE: float = 1e100                         # Umbral de re-escalado de actividades
RESTART_BASE: int = 100                                 # Conflictos por unidad de Luby

# ────────────────────────────────────────────────────────────
# 4. REPORTE Y EXPORTACIÓN
# ────────────────────────────────────────────────────────────

SCORE_DECIMALS: int = 2                                 # Precisión impresa de puntajes
CSV_SEPARATOR: str = ","
CSV_ENCODING: str = "utf-8-sig"                         # BOM para Excel en español
PARQUET_ENGINE: str = "pyarrow"

FORMATOS_SALIDA: tuple[str, ...] = ("text", "json")
SUFIJOS_EXPORTACION: tuple[str, ...] = (".csv", ".parquet")

# Columnas canónicas de la tabla de ranking
COLUMNAS_RANKING: list[str] = [
    "rango",
    "expresion",
    "ubicacion",
    "puntaje",
    "booleano",
    "relacional",
    "pista",
]

# ────────────────────────────────────────────────────────────
# 5. DATACLASS DE CONFIGURACIÓN DE EJECUCIÓN
# ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class RunConfig:
    """Parámetros de una invocación de la CLI.

    Attributes:
        entrada:     Ruta del modelo ``.rml``.
        comando:     Nombre de la aserción/predicado del comando a usar.
        pares:       Máximo de pares (cex, sat) a generar.
        alcance:     Alcance que reemplaza al del comando.
        formato:     ``text`` o ``json``.
        top:         Filas del ranking a mostrar (``None`` = todas).
        fixture:     Rutas (cex, sat) que sustituyen al ciclo de resolución.
        emit_cnf:    Ruta donde volcar el CNF en DIMACS.
        salida:      Ruta de exportación del ranking (``.csv`` / ``.parquet``).
        pred:        Predicado objetivo de ``instances``.
        cantidad:    Instancias a emitir en ``instances``.
    """

    entrada: Path
    comando: Optional[str] = None
    pares: int = DEFAULT_PAIRS
    alcance: Optional[int] = None
    formato: str = "text"
    top: Optional[int] = None
    fixture: Optional[tuple[Path, Path]] = None
    emit_cnf: Optional[Path] = None
    salida: Optional[Path] = None
    pred: Optional[str] = None
    cantidad: int = 1

    def __post_init__(self) -> None:
        if self.pares < 1:
            raise ConfigError("--pairs debe ser ≥ 1", {"pares": self.pares})
        if self.alcance is not None and self.alcance < 1:
            raise ConfigError("--scope debe ser ≥ 1", {"alcance": self.alcance})
        if self.top is not None and self.top < 0:
            raise ConfigError("--top no puede ser negativo", {"top": self.top})
        if self.cantidad < 0:
            raise ConfigError("-n no puede ser negativo", {"cantidad": self.cantidad})
        if self.formato not in FORMATOS_SALIDA:
            raise ConfigError("Formato de salida desconocido", {"formato": self.formato})


# ────────────────────────────────────────────────────────────
# 6. CONFIGURACIÓN DE LOGGING ESTRUCTURADO
# ────────────────────────────────────────────────────────────

LOG_FORMAT: str = (
    "%(asctime)s | %(levelname)-8s | %(name)-20s | %(funcName)-25s | %(message)s"
)
LOG_DATE_FORMAT: str = "%Y-%m-%d %H:%M:%S"
LOG_FILE: Path = LOG_DIR / "rml_localizer.log"


def _nivel_log() -> int:
    return logging.DEBUG if os.getenv("RML_DEBUG", "0") == "1" else logging.INFO


def setup_logging() -> None:
    """Configura logging con salida a consola **y** a archivo rotativo.

    Se invoca una sola vez desde ``main.py`` en el punto de entrada.
    La consola escribe en ``stderr`` para no mezclar logs con el JSON
    que sale por ``stdout``.
    """
    from logging.handlers import RotatingFileHandler

    nivel = _nivel_log()
    root_logger = logging.getLogger()
    root_logger.setLevel(nivel)

    # Evitar handlers duplicados en re-imports
    if root_logger.handlers:
        return

    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(nivel)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    # Handler de archivo rotativo (5 MB, 5 backups)
    file_handler = RotatingFileHandler(
        LOG_FILE,
        maxBytes=5 * 1024 * 1024,
        backupCount=5,
        encoding="utf-8",
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)
    root_logger.addHandler(file_handler)
