"""Fixtures compartidas: modelos de ejemplo, instancias fijas y ayudantes."""

import random

import pytest

from config import FIXTURES_DIR, MODELS_DIR
from evaluator import enumerate_instances
from frontend import load_model, parse_model
from localizer import localize, select_command
from main import cargar_instancia


@pytest.fixture(scope="session")
def fsm():
    return load_model(MODELS_DIR / "fsm.rml")


@pytest.fixture(scope="session")
def fsm_unsat():
    return load_model(MODELS_DIR / "fsm_unsat.rml")


@pytest.fixture(scope="session")
def fsm_fixed():
    return load_model(MODELS_DIR / "fsm_fixed.rml")


@pytest.fixture(scope="session")
def fsm_cex(fsm):
    return cargar_instancia(FIXTURES_DIR / "fsm_cex.json", fsm)


@pytest.fixture(scope="session")
def fsm_sat(fsm):
    return cargar_instancia(FIXTURES_DIR / "fsm_sat.json", fsm)


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture(scope="session")
def grafo():
    """Modelo mínimo de un solo campo binario, sin hechos."""
    return parse_model("sig N { e: set N }\nassert Trivial { some N }\ncheck Trivial for 3\n", "grafo.rml")


@pytest.fixture(scope="session")
def reporte_fsm(fsm, fsm_cex, fsm_sat):
    """Reporte del modelo FSM con el par (cex, sat) de fixtures."""
    return localize(fsm, select_command(fsm), fixture=(fsm_cex, fsm_sat))


@pytest.fixture(scope="session")
def instancias_fsm_3(fsm):
    """Todas las instancias del modelo FSM a alcance 3 (oráculo compartido)."""
    return enumerate_instances(fsm, 3)
