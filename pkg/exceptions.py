"""
exceptions.py — Excepciones personalizadas del localizador de fallas RML.

Jerarquía:
  RmlError (base)
  ├── FrontendError           → Errores léxicos, sintácticos o de resolución.
  ├── ModelError              → Comando, aserción o predicado inexistente.
  ├── FixtureError            → Instancias de fixture inválidas o mal ubicadas.
  ├── ConfigError             → Valores de configuración fuera de rango.
  ├── EnumerationBudgetError  → El oráculo de enumeración rechaza el problema.
  ├── ResidualUnsatError      → M′ ∧ p sigue siendo insatisfacible.
  └── InternalError           → Violación de contrato (re-chequeos fallidos).

Cada excepción lleva un mensaje descriptivo y, opcionalmente, el
contexto (ruta del modelo, comando, núcleo residual, conteos) para
facilitar la depuración en los logs.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Optional, Sequence

if TYPE_CHECKING:
    from model import Diagnostic


class RmlError(Exception):
    """Excepción base para todos los errores del localizador.

    Args:
        message: Descripción legible del error.
        context: Diccionario opcional con datos de depuración
                 (ruta, comando, alcance, grupos del núcleo, etc.).
    """

    def __init__(self, message: str, context: Optional[dict[str, Any]] = None) -> None:
        self.context = context or {}
        super().__init__(message)

    def __str__(self) -> str:
        base = super().__str__()
        if self.context:
            ctx = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
            return f"{base} [{ctx}]"
        return base


class FrontendError(RmlError):
    """El texto fuente no pudo tokenizarse, parsearse o resolverse.

    ``diagnostics`` contiene todos los diagnósticos acumulados, cada uno
    con su ``SourceSpan`` dentro del archivo de entrada.
    """

    def __init__(
        self,
        message: str,
        diagnostics: Sequence["Diagnostic"] = (),
        context: Optional[dict[str, Any]] = None,
    ) -> None:
        self.diagnostics = tuple(diagnostics)
        super().__init__(message, context)

    def __str__(self) -> str:
        lineas = [super().__str__()]
        lineas.extend(f"  {d}" for d in self.diagnostics)
        return "\n".join(lineas)


class ModelError(RmlError):
    """El modelo es válido pero no tiene lo que la orden pide.

    Por ejemplo: no hay comando ``check``, hay varios y no se indicó
    ``--command``, o ``--pred`` nombra un predicado inexistente.
    """


class FixtureError(RmlError):
    """Una instancia de fixture no es una instancia válida del modelo.

    Incluye en ``context`` el archivo y la lista de violaciones.
    """


class ConfigError(RmlError):
    """Parámetro de ejecución fuera de rango (pares, alcance, top, salida)."""


class EnumerationBudgetError(RmlError):
    """El oráculo de enumeración excede el presupuesto de variables.

    ``context["variables"]`` trae el número de variables relacionales.
    """


class ResidualUnsatError(RmlError):
    """Tras quitar el núcleo, M′ ∧ p sigue siendo insatisfacible.

    ``context["nucleo_residual"]`` nombra los grupos del nuevo núcleo.
    """


class InternalError(RmlError):
    """Violación de contrato interna: un re-chequeo no se cumplió.

    No es un error del usuario; indica un defecto del programa.
    """
