"""Almost symplectic structures and their star calculus.

An :class:`AlmostSymplectic` wraps a nondegenerate 2-form ``ω0`` (closed
or not) and derives the bivector ``Λ0`` with ``Λ0^# = (ω0^♭)⁻¹``, where
``ω0^♭(X) = -i_X ω0``. The volume form is ``Ω = ω0^n / n!``.

The star operator is ``∗φ = (-1)^{p(p-1)/2} i_{Λ0^#(φ)} Ω`` and the
codifferential is ``δ = ∗ d ∗``.
"""

from __future__ import annotations

from fractions import Fraction

from .exterior_calculus import (
    Form,
    Multivector,
    exterior_derivative,
    interior_by_multivector,
    wedge,
    wedge_power,
)
from .linalg import det, inverse
from .scalar_field import ChartMismatchError
from .volume_duality import SharpMap, VolumeStructure

__all__ = [
    "AlmostSymplectic",
    "DegenerateFormError",
    "darboux_form",
    "form_matrix",
]


class DegenerateFormError(ValueError):
    """Raised when a 2-form that must be nondegenerate is not."""


def _sign(p):
    return -1 if (p * (p - 1) // 2) % 2 else 1


def form_matrix(omega):
    """The antisymmetric matrix ``W_ij = ω(∂i, ∂j)`` of a 2-form."""
    chart = omega.chart
    m = chart.dim
    W = [[chart.zero] * m for _ in range(m)]
    for (i, j), c in omega.terms.items():
        W[i][j] = c
        W[j][i] = -c
    return W


def darboux_form(chart, pairs):
    """``Σ dx_a ∧ dx_b`` over the coordinate name pairs ``(a, b)``."""
    return Form.from_terms(chart, [(1, (a, b)) for a, b in pairs])


class AlmostSymplectic:
    """A nondegenerate 2-form on an even-dimensional chart.

    Parameters
    ----------
    omega0 : Form
        Grade-2 form whose coefficient matrix is invertible over the
        rational-function field.

    Attributes
    ----------
    n : int
        Half the dimension.
    lambda0 : Multivector
        The inverse bivector, with coefficient matrix ``-W⁻¹``.
    Omega, OmegaDual
        ``ω0^n / n!`` and its dual top multivector.
    """

    def __init__(self, omega0):
        if omega0.grade != 2 or not isinstance(omega0, Form):
            raise ValueError("omega0 must be a 2-form")
        chart = omega0.chart
        if chart.dim % 2:
            raise ValueError(f"almost symplectic structures need an even dimension, got {chart.dim}")
        W = form_matrix(omega0)
        d = det(W, chart)
        if not d:
            raise DegenerateFormError(f"omega0 is degenerate: det(omega0) = {d}")
        Winv = inverse(W, chart)
        m = chart.dim
        terms = {}
        for i in range(m):
            for j in range(i + 1, m):
                if Winv[i][j]:
                    terms[(i, j)] = -Winv[i][j]
        self.chart = chart
        self.n = m // 2
        self.omega0 = omega0
        self.determinant = d
        self.lambda0 = Multivector._from_clean(chart, 2, terms)
        self.volume = VolumeStructure(wedge_power(omega0, self.n, divide_factorial=True))
        self.Omega = self.volume.Omega
        self.OmegaDual = self.volume.OmegaDual
        self._sharp = SharpMap(self.lambda0)
        self._flat_images = {(): Form.scalar(chart.one)}
        for i in range(m):
            self._flat_images[(i,)] = Form._from_clean(
                chart, 1, {(j,): -W[i][j] for j in range(m) if W[i][j]}
            )

    def __repr__(self):
        return f"AlmostSymplectic({self.omega0})"

    # -- the two isomorphisms -------------------------------------------

    def sharp(self, zeta):
        """``Λ0^#(ζ)``, multiplicative over the wedge product."""
        return self._sharp(zeta)

    def _flat_basis(self, key):
        hit = self._flat_images.get(key)
        if hit is None:
            hit = wedge(self._flat_images[key[:1]], self._flat_basis(key[1:]))
            self._flat_images[key] = hit
        return hit

    def sharp_inverse(self, P):
        """The form ``σ`` with ``Λ0^#(σ) = P``."""
        if not isinstance(P, Multivector):
            raise TypeError("sharp_inverse acts on multivectors")
        if P.chart != self.chart:
            raise ChartMismatchError(f"{P.chart!r} vs {self.chart!r}")
        total = Form.zero(self.chart, P.grade)
        for key, coeff in P.terms.items():
            total = total + self._flat_basis(key) * coeff
        return total

    def hamiltonian_vector(self, h):
        """``X_h = Λ0^#(dh)``."""
        return self.sharp(exterior_derivative(Form.scalar(h)))

    # -- star calculus ---------------------------------------------------

    def star(self, phi):
        """``∗φ = (-1)^{p(p-1)/2} i_{Λ0^#(φ)} Ω``."""
        out = interior_by_multivector(self.sharp(phi), self.Omega)
        return out if _sign(phi.grade) > 0 else -out

    def codifferential(self, phi):
        """``δφ = ∗ d ∗ φ``; the zero function on functions."""
        if phi.grade == 0:
            return Form.zero(self.chart, 0)
        return self.star(exterior_derivative(self.star(phi)))

    def contract(self, phi, times=1):
        """``i_{Λ0}`` applied ``times`` times."""
        for _ in range(times):
            phi = interior_by_multivector(self.lambda0, phi)
        return phi

    def is_effective(self, psi):
        """``i_{Λ0} ψ = 0``."""
        return psi.grade < 2 or self.contract(psi).is_zero()

    def omega_power(self, s):
        """``ω0^s / s!``."""
        return wedge_power(self.omega0, s, divide_factorial=True)

    def lepage_decompose(self, phi):
        """Effective forms ``[ψ_p, ψ_{p-2}, …]`` with ``φ = Σ_s ψ_{p-2s} ∧ ω0^s/s!``.

        On an effective ``r``-form ``i_{Λ0}(ψ ∧ ω0^s/s!) =
        -(n-r-s+1) ψ ∧ ω0^{s-1}/(s-1)!``, so ``i_{Λ0}^S`` of the remainder
        isolates its lowest component.
        """
        p = phi.grade
        if p > self.n:
            raise ValueError(f"Lepage decomposition needs grade <= {self.n}, got {p}")
        parts = {}
        rest = phi
        for S in range(p // 2, -1, -1):
            r = p - 2 * S
            factor = Fraction(1)
            for t in range(1, S + 1):
                factor *= -(self.n - r - t + 1)
            psi = self.contract(rest, S) * (1 / factor)
            parts[r] = psi
            if S:
                rest = rest - wedge(psi, self.omega_power(S))
        return [parts[p - 2 * s] for s in range(p // 2 + 1)]

    @staticmethod
    def lepage_grades(p):
        return [p - 2 * s for s in range(p // 2 + 1)]

    def lepage_reconstruct(self, parts):
        total = None
        for s, psi in enumerate(parts):
            term = wedge(psi, self.omega_power(s))
            total = term if total is None else total + term
        return total

    def complementary_defect(self, sigma):
        """``2σ∧δσ - δ(σ∧σ)``."""
        if sigma.grade != 2:
            raise ValueError("the complementary condition is for 2-forms")
        return wedge(sigma, self.codifferential(sigma)) * 2 - self.codifferential(wedge(sigma, sigma))

    def check_complementary(self, sigma):
        """True iff ``2σ∧δσ = δ(σ∧σ)``, i.e. ``Λ0^#(σ)`` is Poisson."""
        return self.complementary_defect(sigma).is_zero()
