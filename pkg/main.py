"""
main.py — CLI del localizador de fallas para modelos relacionales ``.rml``.

Subcomandos:

  1. ``parse``      → Tablas de signaturas, campos, conjunciones y comandos.
  2. ``check``      → Busca un contraejemplo de la aserción del comando.
  3. ``localize``   → Ranking de expresiones sospechosas (o conflictos del
                      núcleo si la propiedad es inalcanzable).
  4. ``instances``  → Instancias de un predicado, una por línea JSON.

Códigos de salida: 0 sin violación, 1 violación encontrada/localizada,
2 error de entrada, 3 error interno.

Uso:
  python main.py localize models/fsm.rml
  python main.py localize models/fsm.rml --fixture fixtures/fsm_cex.json fixtures/fsm_sat.json
  python main.py check models/fsm_fixed.rml --scope 3
  python main.py instances models/fsm.rml --pred Ciclo -n 3
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Optional, Sequence

from config import DEFAULT_PAIRS, DEFAULT_SCOPE, RunConfig, setup_logging
from exceptions import (
    ConfigError,
    FixtureError,
    FrontendError,
    InternalError,
    ModelError,
    ResidualUnsatError,
    RmlError,
)

if TYPE_CHECKING:
    from model import Instance, Model

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLACION = 1
EXIT_ENTRADA = 2
EXIT_INTERNO = 3


# ════════════════════════════════════════════════════════════
# 1. ARGUMENTOS DE LÍNEA DE COMANDOS
# ════════════════════════════════════════════════════════════


def construir_parser_args() -> argparse.ArgumentParser:
    """Construye el parser de argumentos con un subparser por orden."""
    parser = argparse.ArgumentParser(
        description="Localizador de fallas para especificaciones relacionales acotadas.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Ejemplos:
  # Ranking de expresiones sospechosas con 5 pares
  python main.py localize models/fsm.rml

  # Reproducción determinista con instancias fijas
  python main.py localize models/fsm.rml \\
      --fixture fixtures/fsm_cex.json fixtures/fsm_sat.json

  # Reporte JSON y exportación del ranking
  python main.py localize models/fsm.rml --json --salida output/ranking.parquet

  # Logging detallado
  RML_DEBUG=1 python main.py check models/fsm.rml
        """,
    )
    parser.add_argument("--debug", action="store_true", help="Activar logging nivel DEBUG.")
    sub = parser.add_subparsers(dest="orden", required=True)

    def comun(p: argparse.ArgumentParser) -> None:
        p.add_argument("entrada", type=Path, help="Modelo .rml de entrada.")
        p.add_argument("--scope", type=int, default=None, help="Alcance que reemplaza al del comando.")
        p.add_argument("--json", action="store_true", help="Salida JSON en stdout.")
        p.add_argument("--debug", action="store_true", default=argparse.SUPPRESS,
                       help="Activar logging nivel DEBUG.")

    p_parse = sub.add_parser("parse", help="Resumen del modelo.")
    p_parse.add_argument("entrada", type=Path, help="Modelo .rml de entrada.")
    p_parse.add_argument("--json", action="store_true", help="Salida JSON en stdout.")

    p_check = sub.add_parser("check", help="Buscar un contraejemplo.")
    comun(p_check)
    p_check.add_argument("--command", default=None, help="Aserción del comando check a usar.")
    p_check.add_argument("--emit-cnf", type=Path, default=None, help="Volcar el CNF en DIMACS.")

    p_loc = sub.add_parser("localize", help="Localizar la falla.")
    comun(p_loc)
    p_loc.add_argument("--command", default=None, help="Aserción del comando check a usar.")
    p_loc.add_argument("--pairs", type=int, default=DEFAULT_PAIRS,
                       help=f"Máximo de pares (cex, sat) (default: {DEFAULT_PAIRS}).")
    p_loc.add_argument("--top", type=int, default=None, help="Filas del ranking a mostrar.")
    p_loc.add_argument("--fixture", nargs=2, type=Path, metavar=("CEX", "SAT"), default=None,
                       help="Instancias JSON que reemplazan la búsqueda.")
    p_loc.add_argument("--emit-cnf", type=Path, default=None, help="Volcar el CNF en DIMACS.")
    p_loc.add_argument("--salida", "-o", type=Path, default=None,
                       help="Exportar el ranking (.csv o .parquet).")

    p_inst = sub.add_parser("instances", help="Enumerar instancias de un predicado.")
    comun(p_inst)
    p_inst.add_argument("--pred", default=None, help="Predicado objetivo (default: el del comando run).")
    p_inst.add_argument("-n", "--count", type=int, default=1, help="Instancias a emitir (default: 1).")

    return parser


def args_a_config(args: argparse.Namespace) -> RunConfig:
    """Convierte los argumentos CLI a un ``RunConfig`` validado."""
    return RunConfig(
        entrada=args.entrada,
        comando=getattr(args, "command", None),
        pares=getattr(args, "pairs", DEFAULT_PAIRS),
        alcance=getattr(args, "scope", None),
        formato="json" if args.json else "text",
        top=getattr(args, "top", None),
        fixture=tuple(args.fixture) if getattr(args, "fixture", None) else None,
        emit_cnf=getattr(args, "emit_cnf", None),
        salida=getattr(args, "salida", None),
        pred=getattr(args, "pred", None),
        cantidad=getattr(args, "count", 1),
    )


# ════════════════════════════════════════════════════════════
# 2. ÓRDENES
# ════════════════════════════════════════════════════════════


def _imprimir_json(doc: object) -> None:
    print(json.dumps(doc, ensure_ascii=False, indent=2))


def cmd_parse(cfg: RunConfig) -> int:
    from frontend import load_model
    from report import model_summary

    m = load_model(cfg.entrada)
    tablas = model_summary(m)
    if cfg.formato == "json":
        _imprimir_json({nombre: df.to_dict(orient="records") for nombre, df in tablas.items()})
        return EXIT_OK
    for nombre, df in tablas.items():
        print("\n" + "=" * 70)
        print(nombre.upper())
        print("=" * 70)
        print(df.to_string(index=False) if not df.empty else "(vacío)")
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    """Resuelve M ∧ ¬p; exit 1 con el contraejemplo, 0 si no hay."""
    from frontend import load_model
    from grounder import decode, ground, load_plain, write_dimacs
    from localizer import select_command
    from model import instance_to_dict
    from report import instance_dataframe
    from sat import Solver

    m = load_model(cfg.entrada)
    comando = select_command(m, cfg.comando)
    alcance = cfg.alcance or comando.scope
    problema = ground(m, m.asserts[comando.target], True, alcance)
    if cfg.emit_cnf:
        write_dimacs(problema, cfg.emit_cnf)

    solver = Solver()
    load_plain(problema, solver)
    resultado = solver.solve()
    logger.debug("Estadísticas del solucionador: %s", solver.stats)

    if not resultado.satisfiable:
        if cfg.formato == "json":
            _imprimir_json({"status": "no-counterexample", "command": str(comando), "scope": alcance})
        else:
            print(f"Sin contraejemplo: '{comando.target}' se cumple a alcance {alcance}.")
        return EXIT_OK

    cex = decode(resultado.model, problema.var_map, problema.bounds)
    if cfg.formato == "json":
        _imprimir_json({"status": "counterexample", "command": str(comando), "scope": alcance,
                        "instance": instance_to_dict(cex)})
    else:
        print("=" * 70)
        print(f"CONTRAEJEMPLO de {comando}")
        print("=" * 70)
        print(instance_dataframe(cex).to_string(index=False))
    return EXIT_VIOLACION


def cargar_instancia(ruta: Path, m: "Model") -> "Instance":
    """Lee una instancia JSON de fixture y la decodifica contra ``m``.

    Raises:
        FixtureError: archivo ilegible, JSON inválido o instancia mal formada.
    """
    from model import instance_from_dict

    try:
        datos = json.loads(Path(ruta).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureError(f"No se pudo leer la instancia: {exc}", {"archivo": str(ruta)}) from exc
    try:
        return instance_from_dict(datos, m)
    except FixtureError as exc:
        exc.context.setdefault("archivo", str(ruta))
        raise


def cmd_localize(cfg: RunConfig) -> int:
    """Localiza la falla; exit 1 si hay reporte, 0 si la aserción se cumple."""
    from frontend import load_model
    from grounder import ground, write_dimacs
    from localizer import ReportStatus, localize, select_command
    from report import export_ranking, ranking_dataframe, render_text, report_to_dict

    m = load_model(cfg.entrada)
    comando = select_command(m, cfg.comando)
    if cfg.emit_cnf:
        write_dimacs(ground(m, m.asserts[comando.target], True, cfg.alcance or comando.scope), cfg.emit_cnf)

    fixture = None
    if cfg.fixture:
        fixture = (cargar_instancia(cfg.fixture[0], m), cargar_instancia(cfg.fixture[1], m))

    logger.info("=" * 70)
    logger.info("LOCALIZACIÓN — %s (pares=%d)", comando, cfg.pares)
    logger.info("=" * 70)

    reporte = localize(m, comando, cfg.alcance, cfg.pares, fixture)

    if cfg.salida:
        export_ranking(ranking_dataframe(reporte), cfg.salida)
    if cfg.formato == "json":
        _imprimir_json(report_to_dict(reporte, cfg.top))
    else:
        print(render_text(reporte, cfg.top))

    if reporte.status is ReportStatus.NO_COUNTEREXAMPLE:
        return EXIT_OK
    return EXIT_VIOLACION


def cmd_instances(cfg: RunConfig) -> int:
    """Emite hasta N instancias distintas del predicado, bloqueando cada una."""
    from frontend import load_model
    from grounder import decode, ground, load_into, load_plain
    from localizer import select_command
    from maxsat import soft_from_instance
    from model import CommandKind, instance_to_dict
    from report import core_dataframe
    from sat import Solver, minimize_core

    m = load_model(cfg.entrada)
    if cfg.pred is not None:
        if cfg.pred not in m.preds:
            raise ModelError(f"Predicado inexistente: '{cfg.pred}'", {"archivo": m.file})
        nombre = cfg.pred
        alcance = cfg.alcance or next(
            (c.scope for c in m.commands if c.kind is CommandKind.RUN and c.target == nombre),
            None,
        )
    else:
        comando = select_command(m, None, CommandKind.RUN)
        nombre, alcance = comando.target, cfg.alcance or comando.scope
    if alcance is None:
        alcance = DEFAULT_SCOPE

    if cfg.cantidad == 0:
        return EXIT_OK

    problema = ground(m, m.pred_body(nombre), False, alcance)
    solver = Solver()
    load_plain(problema, solver)
    emitidas = 0
    while emitidas < cfg.cantidad:
        resultado = solver.solve()
        if not resultado.satisfiable:
            break
        inst = decode(resultado.model, problema.var_map, problema.bounds)
        print(json.dumps(instance_to_dict(inst), ensure_ascii=False))
        emitidas += 1
        solver.add_clause([-l for l in soft_from_instance(inst, problema.var_map)])

    logger.info("%d instancias emitidas de '%s' a alcance %d.", emitidas, nombre, alcance)
    if emitidas:
        return EXIT_OK

    nucleo_solver = Solver()
    selectores = load_into(problema, nucleo_solver)
    res = nucleo_solver.solve(sorted(selectores.values()))
    por_selector = {s: g for g, s in selectores.items()}
    nucleo = tuple(
        problema.groups[por_selector[s]] for s in sorted(minimize_core(nucleo_solver, res.core))
    )
    print(f"Sin instancias de '{nombre}' a alcance {alcance}. Núcleo insatisfacible:", file=sys.stderr)
    print(core_dataframe(nucleo).to_string(index=False), file=sys.stderr)
    return EXIT_VIOLACION


ORDENES: dict[str, Callable[[RunConfig], int]] = {
    "parse": cmd_parse,
    "check": cmd_check,
    "localize": cmd_localize,
    "instances": cmd_instances,
}


# ════════════════════════════════════════════════════════════
# 3. PUNTO DE ENTRADA
# ════════════════════════════════════════════════════════════


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Punto de entrada principal.

    Returns:
        Código de salida del programa.
    """
    parser = construir_parser_args()
    args = parser.parse_args(argv)

    if args.debug:
        os.environ["RML_DEBUG"] = "1"
    setup_logging()

    try:
        cfg = args_a_config(args)
        logger.info("Localizador RML iniciado — orden=%s, entrada=%s", args.orden, cfg.entrada)
        return ORDENES[args.orden](cfg)

    except FrontendError as exc:
        logger.error("Error en el modelo: %s", exc.args[0])
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_ENTRADA

    except (ModelError, FixtureError, ConfigError) as exc:
        logger.error("Entrada inválida: %s", exc)
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_ENTRADA

    except OSError as exc:
        logger.error("No se pudo leer la entrada: %s", exc)
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_ENTRADA

    except (ResidualUnsatError, InternalError) as exc:
        logger.error("Error interno: %s", exc)
        print(f"❌ Error interno: {exc}", file=sys.stderr)
        return EXIT_INTERNO

    except RmlError as exc:
        logger.error("Error del localizador: %s", exc)
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_INTERNO

    except Exception as exc:
        logger.exception("Error inesperado: %s", exc)
        print(f"❌ Error inesperado: {exc}", file=sys.stderr)
        return EXIT_INTERNO


if __name__ == "__main__":
    sys.exit(main())
