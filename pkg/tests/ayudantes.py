"""Ayudantes de prueba sin estado."""

from frontend import parse_formula, resolve_formula
from grounder import decode
from model import Atom, Instance
from sat import Solver


def formula(m, fuente, variables=()):
    """Parsea y resuelve una fórmula suelta contra ``m``; ``variables`` quedan libres."""
    return resolve_formula(m, parse_formula(fuente), frozenset(variables))


def estado(i):
    return Atom("State", i)


def instancia(sigs, campos=None):
    """Instancia a partir de nombres: ``{"N": [0, 1]}``, ``{"e": [(0, 1)]}``.

    Los campos asumen dueño y destino en la única signatura dada.
    """
    (nombre_sig,) = sigs
    atomos = {i: Atom(nombre_sig, i) for i in sigs[nombre_sig]}
    return Instance(
        {nombre_sig: frozenset(atomos.values())},
        {c: frozenset((atomos[a], atomos[b]) for a, b in ts) for c, ts in (campos or {}).items()},
    )


def soluciones(problema):
    """Todas las instancias del problema aterrizado, bloqueando cada una."""
    solver = Solver()
    solver.ensure_vars(problema.num_vars)
    for c in problema.clauses:
        solver.add_clause(c)
    encontradas = []
    while True:
        r = solver.solve()
        if not r.satisfiable:
            return encontradas
        encontradas.append(decode(r.model, problema.var_map, problema.bounds))
        solver.add_clause(
            [-v if r.model[v] else v for v in problema.var_map.variables()]
        )


def satisface(clausulas, asignacion):
    """``asignacion[v]`` con índice 0 sin uso."""
    return all(any(asignacion[abs(l)] == (l > 0) for l in c) for c in clausulas)


HECHOS_ALEATORIOS = (
    "no n: N | n in n.e",
    "all n: N | lone n.f",
    "some e",
    "e in ~e",
    "no e & f",
    "all n: N | n in N.e => some n.f",
    "lone N - N.e",
    "f.f in f",
)

PROPIEDADES_ALEATORIAS = (
    "no e & iden",
    "e = ~e",
    "some N",
    "N in N.*e",
    "all n: N | some n.e",
    "one N.f",
    "e.e in e",
    "no f",
)


def modelo_aleatorio(rng):
    """Texto ``.rml`` de una signatura con dos campos, hechos y aserción al azar.

    A alcance 2 el modelo tiene 10 variables relacionales.
    """
    m1, m2 = (rng.choice(["set", "lone", "one", "some"]) for _ in range(2))
    hechos = rng.sample(HECHOS_ALEATORIOS, rng.randint(0, 3))
    cuerpo = "".join(f"  {h}\n" for h in hechos)
    return (
        f"sig N {{ e: {m1} N, f: {m2} N }}\n"
        f"fact Azar {{\n{cuerpo}}}\n"
        f"assert Prop {{ {rng.choice(PROPIEDADES_ALEATORIAS)} }}\n"
        "check Prop for 2\n"
    )


def distancia(a, b):
    """Tuplas presentes en exactamente una de las dos instancias."""
    nombres = set(a.relation_names()) | set(b.relation_names())
    return sum(len(a.relation(n) ^ b.relation(n)) for n in nombres)
