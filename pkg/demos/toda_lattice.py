"""
The periodic Toda lattice from its Casimirs
===========================================

Build the three-particle Toda bracket from the two Casimirs
``b1 + b2 + b3`` and ``a1 a2 a3`` and a 2-form ``σ``.
"""

from casimir_poisson import (
    AlmostSymplectic, Chart, EvenProblem, bracket_table, build_phi, build_poisson,
    darboux_form, psi_inverse, fixture,
)

ch = Chart(["a1", "a2", "a3", "b1", "b2", "b3"])
omega0 = darboux_form(ch, [("a1", "b1"), ("a2", "b2"), ("a3", "b3")])
S = AlmostSymplectic(omega0)
print(S.lambda0)

# the σ of the worked fixture
sigma = fixture("toda(3)").problem.tensors["sigma"]
print("sigma =", sigma)

prob = EvenProblem(S, [ch.parse("b1 + b2 + b3"), ch.parse("a1*a2*a3")], sigma)
print("k =", prob.k, " f =", prob.f, " g =", prob.g)

# Φ is a 4-form; Ψ⁻¹ turns it back into the bivector
phi = build_phi(prob)
print(psi_inverse(S.volume, phi) == prob.bivector())

cand = build_poisson(prob)
for a, b, v in bracket_table(cand.bivector):
    print(f"{{{a}, {b}}} = {v}")
print(cand.checks)
