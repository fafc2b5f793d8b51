"""
Dirac and nonholonomic brackets
===============================

Second-class constraints give a Poisson bracket. Linear nonholonomic
constraints give an almost Poisson one, which can fail Jacobi.
"""

from casimir_poisson import (
    AlmostSymplectic, Chart, DiracData, NonholonomicData, darboux_form, dirac_bivector,
    dirac_sigma, jacobi_violations, nonholonomic_bivector, nonholonomic_sigma,
)

ch = Chart(["q1", "q2", "q3", "p1", "p2", "p3"])
S = AlmostSymplectic(darboux_form(ch, [("q1", "p1"), ("q2", "p2"), ("q3", "p3")]))

data = DiracData(S, [ch.parse("q3 + q1^2"), ch.parse("p3*(1 + q1^2) + p2")])
L = dirac_bivector(data)
print(L)
print("g =", S.contract(dirac_sigma(data)).coefficient(), " k =", data.k)
print("jacobi failures:", jacobi_violations(L))

# free particle, H = |p|^2/2
H = ch.parse("(p1^2 + p2^2 + p3^2)/2")
for row in (["0", "0", "1"], ["0", "-q1", "1"]):
    nh = NonholonomicData(ch, ["q1", "q2", "q3"], ["p1", "p2", "p3"], H, [[ch.parse(c) for c in row]])
    L = nonholonomic_bivector(nh)
    bad = [tuple(ch.coords[i] for i in t) for t in jacobi_violations(L)]
    print(row, "C =", nh.C[0][0], " failing triples:", bad)
    print("  condition holds:", nh.structure.check_complementary(nonholonomic_sigma(nh)))
