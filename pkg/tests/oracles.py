"""Independent dense oracles, written with plain sympy matrices.

Nothing here imports the package. ``python tests/oracles.py`` rewrites
``tests/data/oracles.json``; the test suite only reads the frozen file and
checks that these functions still reproduce it.
"""

from __future__ import annotations

import itertools
import json
import pathlib

import sympy as sp

FROZEN = pathlib.Path(__file__).parent / "data" / "oracles.json"


def expr_str(e):
    return str(sp.expand(sp.cancel(e))).replace("**", "^")


def table_of(L, names):
    out = []
    for i, j in itertools.combinations(range(len(names)), 2):
        v = sp.expand(sp.cancel(L[i, j]))
        if v != 0:
            out.append([names[i], names[j], expr_str(v)])
    return out


def antisym(m, entries):
    """Antisymmetric matrix from ``{(i, j): value}``, summing repeats."""
    L = sp.zeros(m, m)
    for (i, j), v in entries:
        L[i, j] += v
        L[j, i] -= v
    return L


def jacobi_failures(L, xs):
    m = len(xs)
    bad = []
    for i, j, k in itertools.combinations(range(m), 3):
        s = 0
        for l in range(m):
            s += L[i, l] * sp.diff(L[j, k], xs[l]) + L[j, l] * sp.diff(L[k, i], xs[l]) + L[k, l] * sp.diff(L[i, j], xs[l])
        if sp.simplify(s) != 0:
            bad.append([str(xs[i]), str(xs[j]), str(xs[k])])
    return bad


def grad(h, xs):
    return sp.Matrix([sp.diff(h, x) for x in xs])


def bracket(L, h1, h2, xs):
    return sp.expand((grad(h1, xs).T * L * grad(h2, xs))[0, 0])


# -- lattices -----------------------------------------------------------------


def lattice_symbols(n):
    a = sp.symbols(" ".join(f"a{i}" for i in range(1, n + 1)))
    b = sp.symbols(" ".join(f"b{i}" for i in range(1, n + 1)))
    return list(a), list(b)


def toda(n):
    """``Σ a_i ∂a_i∧(∂b_i - ∂b_{i+1})`` as a matrix in ``(a, b)`` order."""
    a, b = lattice_symbols(n)
    entries = []
    for i in range(n):
        entries.append(((i, n + i), a[i]))
        entries.append(((i, n + (i + 1) % n), -a[i]))
    return antisym(2 * n, entries), a + b


def volterra(n):
    """``Σ a_j a_{j+1} ∂a_j∧∂a_{j+1} + ∂b_j∧∂b_{j+1}`` (periodic)."""
    a, b = lattice_symbols(n)
    entries = []
    for j in range(n):
        k = (j + 1) % n
        entries.append(((j, k), a[j] * a[k]))
        entries.append(((n + j, n + k), 1))
    return antisym(2 * n, entries), a + b


def darboux_lambda(n):
    """``Σ ∂a_i∧∂b_i``."""
    return antisym(2 * n, [((i, n + i), 1) for i in range(n)])


def lattice_factor(n):
    """``<dC1∧dC2, Λ0>`` with ``C1 = Σ b``, ``C2 = Π a``."""
    a, b = lattice_symbols(n)
    xs = a + b
    L0 = darboux_lambda(n)
    return bracket(L0, sum(b), sp.prod(a), xs)


# -- gl(3) ----------------------------------------------------------------------

GL3 = sp.symbols("x1 x2 x3 y1 y2 y3 z1 z2 z3")


def gl3_bivector():
    """``Λ0^#(σ) + Λ0^#(τ)∧E0`` from dense component formulas."""
    L, L0, E0, _ = _gl3_parts()
    return L, L0, E0


def _gl3_parts():
    x1, x2, x3, y1, y2, y3, z1, z2, z3 = GL3
    ix = {str(s): i for i, s in enumerate(GL3)}
    L0 = antisym(9, [((ix["x1"], ix["y1"]), 1), ((ix["x2"], ix["y2"]), 1), ((ix["x3"], ix["y3"]), 1), ((ix["z1"], ix["z2"]), 1)])
    E0 = sp.zeros(9, 1)
    E0[ix["z3"]] = 1
    sigma_terms = [
        (-z1, "x1", "x2"), (-z2, "x2", "x3"), (z3, "x1", "x3"), (-y1, "x1", "y1"), (y1, "x1", "y2"),
        (-y2, "x2", "y2"), (y2, "x2", "y3"), (-y3, "x3", "y3"), (y3, "x3", "y1"), (-z2, "y1", "z1"),
        (-z1, "y1", "z2"), (z2, "y2", "z1"), (z1, "y3", "z2"),
    ]
    S = antisym(9, [((ix[a], ix[b]), c) for c, a, b in sigma_terms])
    tau = sp.zeros(9, 1)
    tau[ix["y2"]], tau[ix["y3"]] = -z3, z3
    # Λ0^#(dx^a) = Σ_j L0[a, j] ∂_j, extended multiplicatively
    H = sp.zeros(9, 9)
    for j in range(9):
        for k in range(9):
            H[j, k] = sum(S[a, b] * L0[a, j] * L0[b, k] for a in range(9) for b in range(9))
    Y = sp.zeros(9, 1)
    for j in range(9):
        Y[j] = sum(tau[a] * L0[a, j] for a in range(9))
    L = H + Y * E0.T - E0 * Y.T
    return L.applyfunc(sp.expand), L0, E0, S


def gl3_factor():
    """``<dC1∧dC2∧dC3, E0∧Λ0>`` by full index contraction."""
    x1, x2, x3, y1, y2, y3, z1, z2, z3 = GL3
    C = [x1 + x2 + x3, y1 * z2 + y2 * z3 + y3 * z1, z1 * z2 * z3]
    _, L0, E0 = gl3_bivector()
    g = [grad(c, GL3) for c in C]

    def T(i, j, k):
        return E0[i] * L0[j, k] - E0[j] * L0[i, k] + E0[k] * L0[i, j]

    total = 0
    for i, j, k in itertools.product(range(9), repeat=3):
        if g[0][i] != 0 and g[1][j] != 0 and g[2][k] != 0:
            total += g[0][i] * g[1][j] * g[2][k] * T(i, j, k)
    return sp.expand(total)


def gl3_g():
    """``i_{Λ0}σ = -<σ, Λ0> = -Σ_{i<j} σ_ij Λ0^{ij}``."""
    _, L0, _, S = _gl3_parts()
    return sp.expand(-sum(S[i, j] * L0[i, j] for i, j in itertools.combinations(range(9), 2)))


# -- R^3 Jacobian ---------------------------------------------------------------


def r3_jacobian(f_text="x**2 + y**2 + z**2"):
    """``{h1, h2} = det(∇h1, ∇h2, ∇f)`` by symbolic differentiation."""
    x, y, z = xs = sp.symbols("x y z")
    f = sp.sympify(f_text)
    out = {}
    for h1, h2 in ((x, y), (x, z), (y, z)):
        M = sp.Matrix([list(grad(h1, xs)), list(grad(h2, xs)), list(grad(f, xs))])
        out[f"{h1},{h2}"] = expr_str(M.det())
    return out


# -- Dirac ----------------------------------------------------------------------


def dirac(dim, constraints=None):
    """Classical ``{F, G} - {F, f_i} C^{ij} {f_j, G}`` on Darboux ``(q, p)``."""
    n = dim // 2
    qs = sp.symbols(" ".join(f"q{i}" for i in range(1, n + 1)))
    ps = sp.symbols(" ".join(f"p{i}" for i in range(1, n + 1)))
    xs = list(qs) + list(ps)
    L0 = antisym(dim, [((i, n + i), 1) for i in range(n)])
    fs = [sp.sympify(c, locals={str(s): s for s in xs}) for c in constraints] if constraints else [qs[-1], ps[-1]]
    G = sp.Matrix(len(fs), len(fs), lambda i, j: bracket(L0, fs[i], fs[j], xs))
    Ci = G.inv()
    L = sp.zeros(dim, dim)
    for a in range(dim):
        for b in range(dim):
            v = bracket(L0, xs[a], xs[b], xs)
            for i in range(len(fs)):
                for j in range(len(fs)):
                    v -= bracket(L0, xs[a], fs[i], xs) * Ci[i, j] * bracket(L0, fs[j], xs[b], xs)
            L[a, b] = sp.simplify(v)
    return L, xs


# -- nonholonomic -------------------------------------------------------------------


def nonholonomic(zeta_row):
    """Dense ``Λ_nh`` for the free particle on R^3 with one constraint.

    ``ω0 = Σ dp∧dq`` so ``{q_i, p_j}_0 = -δ_ij``.
    """
    q = sp.symbols("q1 q2 q3")
    p = sp.symbols("p1 p2 p3")
    xs = list(q) + list(p)
    L0 = antisym(6, [((i, 3 + i), -1) for i in range(3)])
    H = (p[0] ** 2 + p[1] ** 2 + p[2] ** 2) / 2
    z = [sp.sympify(c, locals={str(s): s for s in q}) for c in zeta_row]
    fz = sum(z[s] * sp.diff(H, p[s]) for s in range(3))
    C = sp.expand(sum(z[s] * sp.diff(H, p[s], p[t]) * z[t] for s in range(3) for t in range(3)))
    Cinv = 1 / C
    # Λ0^#(df)_j = Σ_i ∂_i f L0[i, j]
    Xf = sp.Matrix([sum(sp.diff(fz, xs[i]) * L0[i, j] for i in range(6)) for j in range(6)])
    Z = sp.Matrix([0, 0, 0] + z)
    L = L0 + Cinv * (Xf * Z.T - Z * Xf.T)
    L = L.applyfunc(sp.simplify)
    return L, xs, fz, C


def nonholonomic_summary(zeta_row):
    L, xs, fz, C = nonholonomic(zeta_row)
    z = [sp.sympify(c, locals={"q1": xs[0], "q2": xs[1], "q3": xs[2]}) for c in zeta_row]
    zeta_vec = sp.Matrix(z + [0, 0, 0])
    kernel_df = all(sp.simplify(v) == 0 for v in (grad(fz, xs).T * L))
    kernel_zeta = all(sp.simplify(v) == 0 for v in (zeta_vec.T * L))
    return {
        "table": table_of(L, [str(s) for s in xs]),
        "jacobi_failures": jacobi_failures(L, xs),
        "kernel": kernel_df and kernel_zeta,
        "f_constraint": expr_str(fz),
        "C": expr_str(C),
    }


def compute():
    out = {}
    for n in (3, 4):
        L, xs = toda(n)
        out[f"toda{n}"] = {
            "table": table_of(L, [str(s) for s in xs]),
            "f": expr_str(lattice_factor(n)),
            "rank": int(L.rank()),
            "jacobi_failures": jacobi_failures(L, xs),
        }
    for n in (3, 4, 5):
        L, xs = volterra(n)
        out[f"volterra{n}"] = {
            "table": table_of(L, [str(s) for s in xs]),
            "f": expr_str(lattice_factor(n)),
            "rank": int(L.rank()),
            "jacobi_failures": jacobi_failures(L, xs),
        }
    L, _, _ = gl3_bivector()
    out["gl3"] = {
        "table": table_of(L, [str(s) for s in GL3]),
        "f": expr_str(gl3_factor()),
        "g": expr_str(gl3_g()),
        "rank": int(L.rank()),
        "jacobi_failures": jacobi_failures(L, list(GL3)),
    }
    out["r3_jacobian"] = r3_jacobian()
    for dim in (4, 6):
        L, xs = dirac(dim)
        out[f"dirac{dim}"] = {"table": table_of(L, [str(s) for s in xs]), "jacobi_failures": jacobi_failures(L, xs)}
    L, xs = dirac(6, ["q3 + q1**2", "p3*(1 + q1**2) + p2"])
    out["dirac6_curved"] = {"table": table_of(L, [str(s) for s in xs]), "jacobi_failures": jacobi_failures(L, xs)}
    out["holonomic"] = nonholonomic_summary(["0", "0", "1"])
    out["nonholonomic"] = nonholonomic_summary(["0", "-q1", "1"])
    return out


def load():
    return json.loads(FROZEN.read_text(encoding="utf-8"))


if __name__ == "__main__":
    FROZEN.parent.mkdir(exist_ok=True)
    FROZEN.write_text(json.dumps(compute(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {FROZEN}")
