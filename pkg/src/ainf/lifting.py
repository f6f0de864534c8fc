"""Lifting homotopic chain maps and building isotopies.

The lift runs the obstruction induction for a coalgebra map ``H`` into the
cylinder ``A' ⊗ N(I)``: ``H`` starts at the chain map ``h̃`` built from
the homotopy, and at arity ``m`` the new component is
``H¹_m = Ĵ ∘ Θ¹_m + λ̂ ∘ c_m(H)``.  The correction ``λ̂ ∘ c_m(H)`` already lies
in the kernel of composition with ``Ê0`` (``λ`` lands in the ``φ1`` part,
which ``ε0`` kills), so no linear solve is needed; a kernel-restricted solve
is kept as a fallback and its failure is reported as a bug.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bar import (AInfStructure, WeakMorphism, compose_morphisms, dgmorph_check,
                  invert_weak_iso, strict_morphism, twist_structure)
from .errors import (DgMorphismCheckFailed, HomotopyIdentityFails, KernelSolveFailed,
                     NotQuasiIso, SpaceMismatch)
from .graded import GradedMap, HomotopyData, compose, identity
from .interval import (IntervalModel, cylinder_contraction, evaluation_map,
                       homotopy_to_cylinder, interval_NI, tensor_with_dga, unit_map)
from .linalg import invert_map, is_quasi_isomorphism
from .obstruction import HomComplex, solve_boundary
from .transfer import extend_f, extend_g, retract_to_homology, transfer_structure


def _bar(m: GradedMap, V, W, degree=None) -> GradedMap:
    """Unary map moved to shifted spaces (same matrix)."""
    return GradedMap(V, W, m.degree if degree is None else degree, m.entries, check=False)


@dataclass
class LiftTrace:
    """Everything produced by one run of the lifting induction."""

    result: WeakMorphism                  # Ψ = E1 ∘ H
    cylinder: AInfStructure               # A' ⊗ N(I)
    homotopy: WeakMorphism                # H into the cylinder
    shadow_ok: list = field(default_factory=list)    # (E0 ∘ H)¹_k = Θ¹_k after stage m
    fallback_stages: list = field(default_factory=list)


def lift_trace(Theta: WeakMorphism, psi: GradedMap, h: GradedMap,
               J: IntervalModel | None = None) -> LiftTrace:
    S, T = Theta.source, Theta.target
    A, B = S.space, T.space
    J = J or interval_NI()
    if psi.source != A or psi.target != B or h.source != A or h.target != B:
        raise SpaceMismatch(f"{A.name}->{B.name}", f"{psi.source.name}->{psi.target.name}",
                            "lift inputs")
    theta1 = Theta.linear
    if psi - theta1 != compose(T.d, h) + compose(h, S.d):
        raise HomotopyIdentityFails("psi - theta_1 != d'h + hd")
    cyl = tensor_with_dga(T, J)
    V, W, C = S.bar_space, T.bar_space, cyl.bar_space
    N = Theta.max_arity
    E0 = _bar(evaluation_map(B, J, 0), C, W)
    E1 = _bar(evaluation_map(B, J, 1), C, W)
    Jm = _bar(unit_map(B, J), W, C)
    lam = _bar(cylinder_contraction(T.complex, J), C, C)
    htilde = homotopy_to_cylinder(theta1, psi, h, S.d, T.d, J)
    comps = {1: _bar(htilde, V, C)}
    M = HomComplex(S, cyl, N)
    trace_ok, fallback = [], []
    nb = J.space.dim
    p0 = J.space.index("phi0")
    kernel_targets = [i for i in range(C.dim) if i % nb != p0]
    shadow = compose(E0, comps[1]) == Theta.component(1)
    trace_ok.append(shadow)
    for m in range(2, N + 1):
        c = M.obstruction_cocycle(m, comps, check=False)
        base = compose(Jm, Theta.component(m))
        K = compose(lam, c)
        cand = base + K
        if M.dbar(cand) != c.scale(-1) or not compose(E0, K).is_zero():
            rhs = (c + M.dbar(base)).scale(-1)
            Kt = solve_boundary(V, S.bar[1], C, cyl.bar[1], m, 0, rhs.entries, kernel_targets)
            if Kt is None:
                raise KernelSolveFailed(f"no kernel correction at arity {m}")
            cand = base + Kt
            fallback.append(m)
        if not cand.is_zero():
            comps[m] = cand
        trace_ok.append(all(compose(E0, comps.get(k, GradedMap(V, C, 0, {}, k)))
                            == Theta.component(k) for k in range(1, m + 1)))
    H = WeakMorphism(S, cyl, comps, N)
    Psi = WeakMorphism(S, T, {k: compose(E1, F) for k, F in comps.items()}, N)
    return LiftTrace(Psi, cyl, H, trace_ok, fallback)


def lift_homotopic_chain_map(Theta: WeakMorphism, psi: GradedMap, h: GradedMap,
                             J: IntervalModel | None = None) -> WeakMorphism:
    """A weak morphism with linear part ``psi``, given ``Theta`` and a homotopy
    ``psi - θ_1 = d'h + hd``."""
    return lift_trace(Theta, psi, h, J).result


# -- isotopies -----------------------------------------------------------------


@dataclass
class IsotopyResult:
    isotopy: WeakMorphism          # (A', ν) → (A', μ')
    transferred: AInfStructure     # ν
    g: WeakMorphism                # extension of g1
    theta: WeakMorphism            # F ∘ g


def isotopy_trace(S: AInfStructure, hd: HomotopyData, Sprime: AInfStructure,
                  F: WeakMorphism, nu: AInfStructure | None = None) -> IsotopyResult:
    if hd.l is None:
        raise HomotopyIdentityFails("an isotopy needs the target homotopy l")
    if F.linear != hd.f1:
        raise SpaceMismatch("f1", "F_1", "F must extend the given f1")
    nu = nu or transfer_structure(S, hd, max_arity=min(S.max_arity, Sprime.max_arity))
    g = extend_g(S, hd, nu, check=False)
    Theta = compose_morphisms(F, g)
    phi = lift_homotopic_chain_map(Theta, identity(Sprime.space), hd.l.scale(-1))
    return IsotopyResult(phi, nu, g, Theta)


def construct_isotopy(S: AInfStructure, hd: HomotopyData, Sprime: AInfStructure,
                      F: WeakMorphism) -> WeakMorphism:
    """Isotopy ``(A', ν) → (A', μ')`` from the transfer ``ν`` of ``S`` along
    ``hd`` to ``Sprime``, given a weak morphism ``F : S → Sprime`` extending
    ``hd.f1``.  Requires the two-sided data (``hd.l``)."""
    return isotopy_trace(S, hd, Sprime, F).isotopy


def converse_isotopy_to_extension(phi: WeakMorphism, f: WeakMorphism) -> WeakMorphism:
    """``φ ∘ 𝐟`` for an isotopy ``φ`` and an extension ``𝐟`` of ``f1``."""
    if not phi.is_isotopy():
        raise ValueError("phi must have identity linear part")
    return compose_morphisms(phi, f)


def retwist(T: AInfStructure, phi1: GradedMap) -> AInfStructure:
    """``μ''_n = φ1^{-1} ∘ μ'_n ∘ φ1^{⊗n}`` so that ``φ1`` becomes a strict
    isomorphism ``(A', μ'') → (A', μ')``; ``φ1`` must commute with ``d'``."""
    if compose(phi1, T.d) != compose(T.d, phi1):
        raise HomotopyIdentityFails("phi1 is not a chain map")
    twisted = twist_structure(T, invert_map(phi1))
    return AInfStructure(T.complex, twisted.mu, T.max_arity)


def weak_iso_variant(S: AInfStructure, hd: HomotopyData, Sprime: AInfStructure,
                     phi1: GradedMap, F: WeakMorphism) -> WeakMorphism:
    """Weak isomorphism ``(A', ν) → (A', μ')`` with linear part ``phi1`` given
    ``F`` extending ``phi1 ∘ f1``."""
    if F.linear != compose(phi1, hd.f1):
        raise SpaceMismatch("phi1 f1", "F_1", "F must extend phi1 ∘ f1")
    twisted = retwist(Sprime, phi1)
    inv = invert_map(phi1)
    to_twisted = strict_morphism(Sprime, twisted, inv)
    untwist = strict_morphism(twisted, Sprime, phi1)
    F2 = compose_morphisms(to_twisted, F)
    iso = construct_isotopy(S, hd, twisted, F2)
    return compose_morphisms(untwist, iso)


# -- quasi-inverses ------------------------------------------------------------


@dataclass
class QuasiInverseResult:
    beta: WeakMorphism
    source_homology: AInfStructure
    target_homology: AInfStructure
    p: WeakMorphism
    q: WeakMorphism
    p_prime: WeakMorphism
    alpha_o: WeakMorphism
    alpha_o_inverse: WeakMorphism


def quasi_inverse_trace(alpha: WeakMorphism) -> QuasiInverseResult:
    B, Bp = alpha.source, alpha.target
    if not is_quasi_isomorphism(alpha.linear, B.complex, Bp.complex):
        raise NotQuasiIso("linear part does not induce an isomorphism on homology")
    N = alpha.max_arity
    _, hd = retract_to_homology(B.complex)
    _, hdp = retract_to_homology(Bp.complex)
    omega_o = transfer_structure(B, hd, max_arity=N)
    omega_po = transfer_structure(Bp, hdp, max_arity=N)
    p = extend_f(B, hd, omega_o)
    q = extend_g(B, hd, omega_o)
    pp = extend_f(Bp, hdp, omega_po)
    alpha_o = compose_morphisms(pp, compose_morphisms(alpha, q))
    alpha_o_inv = invert_weak_iso(alpha_o)
    beta = compose_morphisms(q, compose_morphisms(alpha_o_inv, pp))
    return QuasiInverseResult(beta, omega_o, omega_po, p, q, pp, alpha_o, alpha_o_inv)


def quasi_inverse(alpha: WeakMorphism) -> WeakMorphism:
    """A weak morphism ``β : (B', ω') → (B, ω)`` whose linear part is a
    quasi-isomorphism, via transfer to homology on both sides."""
    return quasi_inverse_trace(alpha).beta


def require_morphism(F: WeakMorphism, what: str):
    report = dgmorph_check(F, limit=5)
    if not report.ok:
        raise DgMorphismCheckFailed(f"{what} is not a weak morphism", report.residuals)
    return F
