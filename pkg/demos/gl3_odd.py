"""
Odd dimension: a bracket on gl(3)
=================================

Nine coordinates, three Casimirs, an almost cosymplectic pair and the
suspension to ten dimensions.
"""

from casimir_poisson import OddProblem, bracket, bracket_odd, build_poisson_odd, check_sigma_tau, fixture, suspend
from casimir_poisson.runner import build_structure

p = fixture("gl3").problem
S = build_structure(p)
print(S)
print(S.identities())

prob = OddProblem(S, p.lists["casimirs"], p.tensors["sigma"], p.tensors["tau"])
print("k =", prob.k)
print("f =", prob.f)
print("g =", prob.g)

cand = build_poisson_odd(prob)
print(len(cand.table()), "nonzero brackets")
for a, b, v in cand.table():
    print(f"  {{{a}, {b}}} = {v}")
print(cand.notes)

rep = check_sigma_tau(prob, suspended=True)
print("complete system:", rep.complete)
print("reduced form:   ", rep.equations)  # the first one fails here
print("jacobi:", rep.poisson, " suspended condition:", rep.suspended)

# same bracket from the even problem on M × R
ev = suspend(prob)
x1, y1 = (ev.chart.coord(c) for c in ("x1", "y1"))
print(bracket(ev, x1, y1), "=", bracket_odd(prob, p.chart.coord("x1"), p.chart.coord("y1")))
