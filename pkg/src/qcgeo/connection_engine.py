"""Torsion, curvature, Bianchi residuals, Ricci, tensorial derivatives.

All computations happen in the left-invariant trivialisation: a
connection is a constant-coefficient 1-form with values in a named
subalgebra, the model's reference connection (omega = 0) has torsion de
and curvature equal to the model's base curvature (zero for genuine Lie
groups), and the exterior covariant derivative of a constant tensorial
form alpha is D alpha = d alpha + sum_i e^i ^ (A_i . alpha).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lie_input import CoframeModel, d
from .linalg import LinAlgError
from .model_spaces import (
    CONNECTION_SIG,
    CURVATURE_SIG,
    TORSION_SIG,
    AlgebraBasis,
    standard_forms,
)
from .tensor import (
    Tensor,
    alternate_matrix,
    basis_form,
    contract_form_value,
    form_sig,
    lie_act,
    mat_bracket,
    mat_to_tensor,
    tensor_mul,
    trace_value,
    wedge,
)


@dataclass
class ConnectionForm:
    """Constant connection: omega = sum_i e^i (x) A_i with A_i in the algebra."""

    model: CoframeModel
    algebra: AlgebraBasis
    coeff: Tensor  # signature T* (x) T* (x) T

    def __post_init__(self):
        if self.coeff.sig != CONNECTION_SIG:
            raise LinAlgError(f"connection coefficient signature {self.coeff.sig}")
        if self.algebra is not None:
            for i, m in self.matrices().items():
                if not self.algebra.contains_matrix(m):
                    raise LinAlgError(
                        f"connection value at e^{i} is outside algebra {self.algebra.name!r}"
                    )

    def matrices(self) -> dict:
        """The A_i as gl dicts keyed by the coframe index i."""
        out: dict = {}
        for key, v in self.coeff.c.items():
            i = key[0][0]
            out.setdefault(i, {})[(key[1][0], key[2][0])] = v
        return out

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def __add__(self, other: "ConnectionForm") -> "ConnectionForm":
        alg = self.algebra if other.algebra is self.algebra else None
        return ConnectionForm(self.model, alg, self.coeff + other.coeff)

    def __sub__(self, other: "ConnectionForm") -> "ConnectionForm":
        alg = self.algebra if other.algebra is self.algebra else None
        return ConnectionForm(self.model, alg, self.coeff - other.coeff)


def zero_connection(model: CoframeModel, algebra=None) -> ConnectionForm:
    return ConnectionForm(model, algebra, Tensor(CONNECTION_SIG, model.n))


@dataclass
class CurvatureTensor:
    """Exact curvature 2-form with values in gl(T)."""

    model: CoframeModel
    omega: ConnectionForm
    tensor: Tensor  # signature Lambda^2 T* (x) T* (x) T

    def bigrade_part(self, p: int, q: int) -> Tensor:
        return self.tensor.bigrade_part(p, q)

    def trace_form(self) -> Tensor:
        """tr Omega as an exact 2-form."""
        return trace_value(self.tensor)

    def is_zero(self) -> bool:
        return self.tensor.is_zero()


def torsion(omega: ConnectionForm) -> Tensor:
    """Theta = de + alternation(omega); equals de for omega = 0."""
    return omega.model.de_tensor() + alternate_matrix(omega.coeff)


def curvature(omega: ConnectionForm) -> CurvatureTensor:
    """Omega_base + sum_i de^i (x) A_i + sum_{i<j} e^{ij} (x) [A_i, A_j]."""
    model = omega.model
    out = model.base_curvature_tensor().copy()
    mats = omega.matrices()
    for i, m in mats.items():
        for c, (j, k) in model.d_table.get(i, ()):
            for (r, cc), v in m.items():
                out.add_term(((j, k), (r,), (cc,)), c * v)
    idxs = sorted(mats)
    for a in range(len(idxs)):
        for b in range(a + 1, len(idxs)):
            i, j = idxs[a], idxs[b]
            for (r, cc), v in mat_bracket(mats[i], mats[j]).items():
                out.add_term(((i, j), (r,), (cc,)), v)
    return CurvatureTensor(model, omega, out)


def connection_wedge_act(omega: ConnectionForm, t: Tensor, groups="values") -> Tensor:
    """sum_i e^i ^ (A_i . t): the algebraic part of D."""
    n = omega.model.n
    deg = t.form_degree()
    out = Tensor(form_sig(deg + 1, *(t.sig[1:] if deg else t.sig)), n)
    for i, m in omega.matrices().items():
        acted = lie_act(m, t, groups=groups)
        ei = basis_form(n, i)
        for key, v in acted.c.items():
            form = key[0] if deg else ()
            rest = key[1:] if deg else key
            out.add_term(((i,) + form,) + rest, v)
    return out


def covariant_derivative(omega: ConnectionForm, t: Tensor) -> Tensor:
    """D t = d t + sum_i e^i ^ (A_i . t_values) for constant tensorial t."""
    return d(t, omega.model) + connection_wedge_act(omega, t, groups="values")


def bianchi_residuals(omega: ConnectionForm):
    """(D Theta - Omega ^ theta, D Omega); exactly zero for any connection."""
    theta = torsion(omega)
    omega_t = curvature(omega)
    first = (
        d(theta, omega.model)
        + connection_wedge_act(omega, theta, groups="values")
        - alternate_matrix(omega_t.tensor)
    )
    second = d(omega_t.tensor, omega.model) + connection_wedge_act(
        omega, omega_t.tensor, groups="values"
    )
    return first, second


def ricci(omega: ConnectionForm, restrict_to_V: bool = True):
    """Horizontal Ricci: ric(X, Y) = sum_{a<=4n} <e^a, Omega(e_a, X) Y>.

    Returns (matrix Tensor, scalar trace).  The contraction index runs
    over 1..4n regardless of the flag; the flag restricts X, Y to V.
    """
    model = omega.model
    n = model.n
    n4 = 4 * n
    omega_t = curvature(omega).tensor
    hi = n4 if restrict_to_V else model.dim
    sig = (("d", "T", 1), ("d", "T", 1))
    ric = Tensor(sig, n)
    for key, v in omega_t.c.items():
        (i, j), (r,), (c,) = key
        # Omega(e_i, e_j) has value matrix entry (r -> c):
        # <e^a, Omega(e_a, X) Y> with a = contraction index
        # term alpha = e^{ij}: Omega(e_a, e_x) = v for (a,x)=(i,j), -v for (a,x)=(j,i)
        for (a, x, sgn) in ((i, j, 1), (j, i, -1)):
            if a > n4 or x > hi:
                continue
            # value acts on Y = e_r giving e_c; want <e^a, ...> so c == a
            if c == a and r <= hi:
                ric.add_term(((x,), (r,)), sgn * v)
    scalar = Fraction(0)
    for key, v in ric.c.items():
        if key[0] == key[1]:
            scalar += v
    return ric, scalar


# -- invariant tensorial forms and their derivatives ---------------------------

def sigma_form(n: int) -> Tensor:
    """w^123 (x) w_123 in Lambda^3 W* (x) Lambda^3(T/V)."""
    t = Tensor(form_sig(3, ("u", "W", 3)), n)
    base = 4 * n
    t.add_term(((base + 1, base + 2, base + 3), (base + 1, base + 2, base + 3)), Fraction(1))
    return t


def eta_form(n: int) -> Tensor:
    """sum_s w^s (x) w_s in T* (x) T/V."""
    t = Tensor(form_sig(1, ("u", "W", 1)), n)
    for s in range(1, 4):
        t.add_term(((4 * n + s,), (4 * n + s,)), Fraction(1))
    return t


def gamma_form(n: int) -> Tensor:
    """sum_s omega_s ^ w^123 (x) (w_s (x) w_123)."""
    mc = standard_forms(n)
    base = 4 * n
    t = Tensor(form_sig(5, ("u", "W", 1), ("u", "W", 3)), n)
    for s in range(3):
        for (form,), v in mc.omega[s].c.items():
            t.add_term(
                (form + (base + 1, base + 2, base + 3), (base + 1 + s,), (base + 1, base + 2, base + 3)),
                v,
            )
    return t


def tensorial_derivative(which: str, omega: ConnectionForm):
    """Bigraded parts of D alpha for alpha in {sigma, eta, gamma}."""
    n = omega.model.n
    alpha = {"sigma": sigma_form, "eta": eta_form, "gamma": gamma_form}[which](n)
    return covariant_derivative(omega, alpha).bigrade_split()


def theta_contract(alpha: Tensor, beta: Tensor) -> Tensor:
    """Tensorial interior product of a T-valued form into another form."""
    return contract_form_value(alpha, beta)


def random_connection(model: CoframeModel, rng, algebra: AlgebraBasis = None, density=0.3):
    """Random exact connection for property tests; values in the algebra if given."""
    n = model.n
    t = Tensor(CONNECTION_SIG, n)
    dim = model.dim
    if algebra is None:
        for i in range(1, dim + 1):
            for r in range(1, dim + 1):
                for c in range(1, dim + 1):
                    if rng.random() < density:
                        t.add_term(((i,), (r,), (c,)), Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
    else:
        for i in range(1, dim + 1):
            for m in algebra.mats:
                if rng.random() < density:
                    s = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                    if not s:
                        continue
                    for (r, c), v in m.items():
                        t.add_term(((i,), (r,), (c,)), s * v)
    return ConnectionForm(model, algebra, t)
