from __future__ import annotations

import random
import time
from contextlib import contextmanager

from hypothesis import HealthCheck, settings

from ainf.bar import transport_structure
from ainf.graded import ChainComplex, compose
from ainf.linalg import invert_map
from ainf.randgen import (inclusion_homotopy_data, perturb, random_automorphism,
                          random_homotopy_data, random_map, random_structure,
                          random_weak_morphism_components)
from ainf.transfer import transfer_structure

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def structure_and_morphism(seed: int, max_dim: int = 4, max_arity: int = 4):
    """Random structure ``S`` and a weak isomorphism ``S -> T``."""
    rng = random.Random(seed)
    S = random_structure(rng, max_dim, max_arity)
    comps = random_weak_morphism_components(rng, S.bar_space, S.bar_space, max_arity)
    T, F = transport_structure(S, comps)
    return rng, S, T, F


def lift_instance(seed: int, max_dim: int = 4, max_arity: int = 4):
    """``(Theta, psi, h)`` with ``psi - θ_1 = d'h + hd``."""
    rng, S, T, Theta = structure_and_morphism(seed, max_dim, max_arity)
    h = random_map(rng, S.space, T.space, 1, 1, 0.5)
    psi = Theta.linear + compose(T.d, h) + compose(h, S.d)
    return Theta, psi, h


def two_transfers(seed: int, max_dim: int = 4, max_arity: int = 4):
    """Transfers of one structure along two homotopy data that share ``f1``
    but have independent ``g1`` and ``h``."""
    rng = random.Random(seed)
    S = random_structure(rng, max_dim, max_arity)
    hd1 = random_homotopy_data(rng, S.complex)
    hd2 = perturb(rng, hd1, move_f1=False)
    for _ in range(20):
        if (hd2.g1, hd2.h) != (hd1.g1, hd1.h):
            break
        hd2 = perturb(rng, hd1, move_f1=False)
    nu1 = transfer_structure(S, hd1, max_arity=max_arity)
    nu2 = transfer_structure(S, hd2, max_arity=max_arity)
    return S, hd1, hd2, nu1, nu2


def inclusion_instance(seed: int, max_dim: int = 4, max_arity: int = 4):
    """``(S, target complex, ι, π)`` with ``π ι = id`` and ``ι`` a chain map
    into an enlargement by contractible pairs, in a random basis."""
    rng = random.Random(seed)
    S = random_structure(rng, max_dim, max_arity)
    hd = inclusion_homotopy_data(rng, S.complex, rng.randint(1, 2))
    P = random_automorphism(rng, hd.target.space)
    Pinv = invert_map(P)
    target = ChainComplex(hd.target.space, compose(P, compose(hd.target.d, Pinv)))
    return S, target, compose(P, hd.f1), compose(hd.g1, Pinv)


# -- acceptance summary --------------------------------------------------------

CRITERIA: dict = {}


@contextmanager
def criterion(number: int, title: str):
    """Record one acceptance line: PASS when the block finishes, FAIL with
    the exception otherwise.  ``detail`` collects what was measured."""
    detail: dict = {}
    start = time.perf_counter()
    try:
        yield detail
    except BaseException as exc:
        CRITERIA[number] = (title, False, f"{type(exc).__name__}: {exc}".splitlines()[0][:160])
        raise
    else:
        secs = time.perf_counter() - start
        text = ", ".join(f"{k}={v}" for k, v in detail.items())
        CRITERIA[number] = (title, True, f"{text}, {secs:.1f}s" if text else f"{secs:.1f}s")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        title, ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
