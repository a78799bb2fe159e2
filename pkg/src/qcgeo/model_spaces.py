"""Model tensors and the nested structure algebras inside gl(T).

Conventions (fixed once, used everywhere): indices 1..4n are horizontal,
4n+1..4n+3 vertical, w^s = e^{4n+s}.  The quaternionic block structure on
V = R^{4n} puts (e_{4j+1}, e_{4j+2}, e_{4j+3}, e_{4j+4}) in the j-th
quaternionic line, and

    omega_1 = sum_j e^{4j+1,4j+2} - e^{4j+3,4j+4}
    omega_2 = sum_j e^{4j+1,4j+3} + e^{4j+2,4j+4}
    omega_3 = sum_j e^{4j+1,4j+4} - e^{4j+2,4j+3}

(The highest-weight-vector module re-derives these from the complex
frame as an independent oracle.)

Matrix convention: a gl(T) element is a dict (i, j) -> coeff meaning
e_i |-> coeff * e_j; under the so(4n) identification a 2-form alpha acts
as v |-> v -| alpha.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .linalg import LinAlgError, SubspaceBasis, solve_columns, span
from .tensor import (
    MATRIX_SIG,
    Tensor,
    basis_form,
    basis_of,
    form_sig,
    form_to_matrix,
    lie_act,
    mat_bracket,
    mat_to_tensor,
    wedge,
)

TORSION_SIG = (("d", "T", 2), ("u", "T", 1))
CONNECTION_SIG = (("d", "T", 1), ("d", "T", 1), ("u", "T", 1))
CURVATURE_SIG = (("d", "T", 2), ("d", "T", 1), ("u", "T", 1))

ALGEBRA_NAMES = (
    "q",
    "b",
    "k",
    "g",
    "sp_n",
    "sp_1",
    "scalar_R",
    "EH",
    "hom_WV",
    "spn_sp1",
    "spn_sp1_soW",
    "gl_V",
    "so_W",
)


def omega_forms(n: int):
    """The three model 2-forms on V."""
    one = Fraction(1)
    pats = [
        ((1, 2, one), (3, 4, -one)),
        ((1, 3, one), (2, 4, one)),
        ((1, 4, one), (2, 3, -one)),
    ]
    out = []
    for pat in pats:
        t = Tensor(form_sig(2), n)
        for j in range(n):
            for a, b, c in pat:
                t.add_term(((4 * j + a, 4 * j + b),), c)
        out.append(t)
    return tuple(out)


@dataclass
class ModelConstants:
    """Fixed model tensors for a given size n."""

    n: int
    omega: tuple  # three 2-forms on V
    theta0: Tensor  # Lambda^2 V* (x) W piece sum omega_s (x) e_{4n+s}
    J: tuple  # three gl(V) matrices (dicts)
    w123: Tensor  # vertical volume form
    metric: dict  # identity bilinear form

    def omega_matrix(self, s: int) -> dict:
        return form_to_matrix(self.omega[s])


@lru_cache(maxsize=None)
def standard_forms(n: int) -> ModelConstants:
    if n < 1:
        raise ValueError("n must be >= 1")
    omegas = omega_forms(n)
    theta0 = Tensor(TORSION_SIG, n)
    for s, om in enumerate(omegas):
        for (formkey,), v in om.c.items():
            theta0.add_term((formkey, (4 * n + 1 + s,)), v)
    # J_s via omega_s(x, y) = <x, J_s y>: column b is sum_a omega_s(e_a, e_b) e_a
    J = []
    for om in omegas:
        m = {}
        for (form,), v in om.c.items():
            a, b = form
            m[(b, a)] = m.get((b, a), 0) + v  # J e_b has e_a component omega(e_a,e_b)
            m[(a, b)] = m.get((a, b), 0) - v
        J.append({k: v for k, v in m.items() if v})
    w123 = basis_form(n, 4 * n + 1, 4 * n + 2, 4 * n + 3)
    metric = {(i, i): Fraction(1) for i in range(1, 4 * n + 4)}
    return ModelConstants(n, omegas, theta0, tuple(J), w123, metric)


def interior_matrix_form(mc: ModelConstants, s: int):
    """v -> v -| omega_s as a gl element (the EH building block)."""
    out = {}
    for (form,), v in mc.omega[s].c.items():
        a, b = form
        out[(a, b)] = out.get((a, b), 0) + v
        out[(b, a)] = out.get((b, a), 0) - v
    return {k: v for k, v in out.items() if v}


def eh_generator(mc: ModelConstants, v_index: int) -> dict:
    """w^s (x) (e_v -| omega_s) summed over s, as a map W -> V.

    Sign: w_s |-> -(e_v -| omega_s)^sharp.  This is the reading under
    which the worked qc connections print literally (sphere correction
    -e^a (x) w^s (x) (e_a -| omega_s) has torsion Theta_0).
    """
    n = mc.n
    out = {}
    for s in range(3):
        row = {}
        for (form,), c in mc.omega[s].c.items():
            a, b = form
            if a == v_index:
                row[b] = row.get(b, 0) - c
            elif b == v_index:
                row[a] = row.get(a, 0) + c
        for b, c in row.items():
            if c:
                out[(4 * n + 1 + s, b)] = c
    return out


def sp1_generators(mc: ModelConstants):
    """The images of i, j, k under sp(1) -> gl(V) + gl(W).

    The generator tagged by omega_s acts on V as v -> v -| omega_s and on
    W by the so(3) matrices fixed by the module conventions
    (omega_1: w_2 -> -2 w_3, w_3 -> 2 w_2, and cyclic).
    """
    n = mc.n
    base = 4 * n
    w_actions = [
        {(base + 2, base + 3): Fraction(-2), (base + 3, base + 2): Fraction(2)},
        {(base + 3, base + 1): Fraction(-2), (base + 1, base + 3): Fraction(2)},
        {(base + 1, base + 2): Fraction(-2), (base + 2, base + 1): Fraction(2)},
    ]
    gens = []
    for s in range(3):
        m = dict(interior_matrix_form(mc, s))
        m.update(w_actions[s])
        gens.append(m)
    return gens


def scalar_generator(n: int) -> dict:
    """-id_V - 2 id_W, the scalar direction of b."""
    out = {}
    for i in range(1, 4 * n + 1):
        out[(i, i)] = Fraction(-1)
    for i in range(4 * n + 1, 4 * n + 4):
        out[(i, i)] = Fraction(-2)
    return out


@lru_cache(maxsize=None)
def sp_n_matrices(n: int):
    """Basis of sp(n) in gl(V): skew matrices commuting with all J_s."""
    mc = standard_forms(n)
    dim = 4 * n
    so_basis = []
    for a in range(1, dim + 1):
        for b in range(a + 1, dim + 1):
            so_basis.append({(a, b): Fraction(1), (b, a): Fraction(-1)})
    cols = []
    for i, A in enumerate(so_basis):
        merged = {}
        for s, J in enumerate(mc.J):
            for key, v in mat_bracket(A, J).items():
                merged[(s,) + key] = v
        cols.append((i, merged))
    _, kernel, _ = solve_columns(cols)
    out = []
    for combo in kernel:
        m = {}
        for i, c in combo.items():
            for key, v in so_basis[i].items():
                cur = m.get(key, 0) + c * v
                if cur:
                    m[key] = cur
                else:
                    m.pop(key, None)
        out.append(m)
    return out


def so_w_matrices(n: int):
    base = 4 * n
    out = []
    for r in range(1, 4):
        for t in range(r + 1, 4):
            out.append({(base + r, base + t): Fraction(1), (base + t, base + r): Fraction(-1)})
    return out


def hom_wv_matrices(n: int):
    out = []
    for s in range(1, 4):
        for a in range(1, 4 * n + 1):
            out.append({(4 * n + s, a): Fraction(1)})
    return out


def gl_v_matrices(n: int):
    return [{(i, j): Fraction(1)} for i in range(1, 4 * n + 1) for j in range(1, 4 * n + 1)]


def gl_w_matrices(n: int):
    base = 4 * n
    return [
        {(base + i, base + j): Fraction(1)}
        for i in range(1, 4)
        for j in range(1, 4)
    ]


@dataclass
class AlgebraBasis:
    """Named subalgebra of gl(T) with its exact basis."""

    name: str
    n: int
    mats: list  # list of dicts
    matrices: SubspaceBasis = field(default=None)

    def __post_init__(self):
        if self.matrices is None:
            self.matrices = span(
                [mat_to_tensor(m, self.n) for m in self.mats],
                ambient_sig=MATRIX_SIG,
                n=self.n,
            )
            if self.matrices.rank != len(self.mats):
                raise LinAlgError(f"algebra basis {self.name!r} is linearly dependent")

    @property
    def dim(self):
        return len(self.mats)

    def contains_matrix(self, m: dict) -> bool:
        return self.matrices.contains(mat_to_tensor(m, self.n))

    def verify_closed(self) -> bool:
        for i, a in enumerate(self.mats):
            for b in self.mats[i + 1:]:
                if not self.contains_matrix(mat_bracket(a, b)):
                    return False
        return True


@lru_cache(maxsize=None)
def algebra_basis(name: str, n: int) -> AlgebraBasis:
    if name not in ALGEBRA_NAMES:
        raise LinAlgError(f"unknown algebra name {name!r}")
    mc = standard_forms(n)
    sp1 = sp1_generators(mc)
    spn = sp_n_matrices(n)
    eh = [eh_generator(mc, a) for a in range(1, 4 * n + 1)]
    pieces = {
        "sp_n": spn,
        "sp_1": sp1,
        "scalar_R": [scalar_generator(n)],
        "EH": eh,
        "hom_WV": hom_wv_matrices(n),
        "spn_sp1": spn + sp1,
        "spn_sp1_soW": spn + sp1 + so_w_matrices(n),
        "g": spn + sp1 + eh,
        "k": spn + sp1 + [scalar_generator(n)] + eh,
        "b": spn + sp1 + [scalar_generator(n)] + hom_wv_matrices(n),
        "q": gl_v_matrices(n) + gl_w_matrices(n) + hom_wv_matrices(n),
        "gl_V": gl_v_matrices(n),
        "so_W": so_w_matrices(n),
    }
    return AlgebraBasis(name, n, pieces[name])


class PartialMap:
    """The alternation map on T* (x) alg, with image and kernel."""

    def __init__(self, algebra: AlgebraBasis):
        self.algebra = algebra
        self.n = algebra.n
        dim = 4 * self.n + 3
        self.domain = []  # (i, mat) pairs spanning T* (x) alg
        self.images = []
        for i in range(1, dim + 1):
            for m in algebra.mats:
                self.domain.append((i, m))
                self.images.append(partial_of(i, m, self.n))
        self._image_span = None
        self._kernel = None

    def apply(self, conn: Tensor) -> Tensor:
        """Alternation of a connection-form tensor (signature T*(x)gl)."""
        out = Tensor(TORSION_SIG, conn.n)
        for key, v in conn.c.items():
            out.add_term(((key[0][0], key[1][0]), key[2]), v)
        return out

    @property
    def image(self) -> SubspaceBasis:
        if self._image_span is None:
            self._image_span = span(self.images, ambient_sig=TORSION_SIG, n=self.n)
        return self._image_span

    @property
    def kernel(self) -> SubspaceBasis:
        if self._kernel is None:
            cols = [(i, img.c) for i, img in enumerate(self.images)]
            _, kernel, _ = solve_columns(cols)
            gens = []
            for combo in kernel:
                t = Tensor(CONNECTION_SIG, self.n)
                for i, c in combo.items():
                    e, m = self.domain[i]
                    for key, v in m.items():
                        t.add_term(((e,), (key[0],), (key[1],)), c * v)
                gens.append(t)
            self._kernel = span(gens, ambient_sig=CONNECTION_SIG, n=self.n)
        return self._kernel

    def domain_tensors(self):
        out = []
        for e, m in self.domain:
            t = Tensor(CONNECTION_SIG, self.n)
            for key, v in m.items():
                t.add_term(((e,), (key[0],), (key[1],)), v)
            out.append(t)
        return out

    def coker_dim(self) -> int:
        total = len(basis_of(TORSION_SIG, self.n))
        return total - self.image.rank


def partial_of(i: int, mat: dict, n: int) -> Tensor:
    """d-bar of e^i (x) mat as an element of Lambda^2 T* (x) T."""
    t = Tensor(TORSION_SIG, n)
    for (r, c), v in mat.items():
        t.add_term(((i, r), (c,)), v)
    return t


@lru_cache(maxsize=None)
def partial_map(name: str, n: int) -> PartialMap:
    return PartialMap(algebra_basis(name, n))


def connection_tensor(terms, n: int) -> Tensor:
    """Build a T* (x) gl(T) tensor from (form index, matrix) pairs."""
    t = Tensor(CONNECTION_SIG, n)
    for i, m in terms:
        for (r, c), v in m.items():
            t.add_term(((i,), (r,), (c,)), v)
    return t


@lru_cache(maxsize=None)
def etilde_subspace(n: int) -> SubspaceBasis:
    """span{xi . Theta_0 : xi in EH} inside Lambda^2 T* (x) T; rank 4n."""
    mc = standard_forms(n)
    gens = []
    for a in range(1, 4 * n + 1):
        gens.append(lie_act(eh_generator(mc, a), mc.theta0))
    sub = span(gens, ambient_sig=TORSION_SIG, n=n)
    if sub.rank != 4 * n:
        raise LinAlgError("EH action on Theta_0 degenerated; conventions broken")
    return sub


# -- torsion decomposition subspaces ------------------------------------------

@lru_cache(maxsize=None)
def sp_n_perp_matrices(n: int):
    """Orthocomplement of sp(n) in so(4n) for the trace form."""
    spn = sp_n_matrices(n)
    dim = 4 * n
    so_basis = []
    for a in range(1, dim + 1):
        for b in range(a + 1, dim + 1):
            so_basis.append({(a, b): Fraction(1), (b, a): Fraction(-1)})
    # <A,B> = tr(A^T B) = sum A_ij B_ij; solve orthogonality to all sp(n) gens
    cols = []
    for i, A in enumerate(so_basis):
        constraints = {}
        for si, S in enumerate(spn):
            val = 0
            for key, v in A.items():
                val += v * S.get(key, 0)
            if val:
                constraints[(si,)] = val
        cols.append((i, constraints))
    _, kernel, _ = solve_columns(cols)
    out = []
    for combo in kernel:
        m = {}
        for i, c in combo.items():
            for key, v in so_basis[i].items():
                cur = m.get(key, 0) + c * v
                if cur:
                    m[key] = cur
                else:
                    m.pop(key, None)
        out.append(m)
    return out


def s20w_matrices(n: int):
    """Trace-free symmetric gl(W) elements (the S^2_0 W directions)."""
    base = 4 * n
    out = []
    for r in range(1, 4):
        for t in range(r, 4):
            if r == t:
                continue
            out.append({(base + r, base + t): Fraction(1), (base + t, base + r): Fraction(1)})
    out.append({(base + 1, base + 1): Fraction(1), (base + 2, base + 2): Fraction(-1)})
    out.append({(base + 2, base + 2): Fraction(1), (base + 3, base + 3): Fraction(-1)})
    return out


@lru_cache(maxsize=None)
def w1_image(n: int) -> SubspaceBasis:
    """d-bar_1(W_1) with W_1 = V* (x) sp(n)^perp."""
    gens = []
    for a in range(1, 4 * n + 1):
        for m in sp_n_perp_matrices(n):
            gens.append(partial_of(a, m, n))
    return span(gens, ambient_sig=TORSION_SIG, n=n)


@lru_cache(maxsize=None)
def w2_image(n: int) -> SubspaceBasis:
    """d-bar_2(W_2) with W_2 = V* (x) S^2_0 W."""
    gens = []
    for a in range(1, 4 * n + 1):
        for m in s20w_matrices(n):
            gens.append(partial_of(a, m, n))
    return span(gens, ambient_sig=TORSION_SIG, n=n)


@lru_cache(maxsize=None)
def lambda2vw_subspace(n: int) -> SubspaceBasis:
    gens = []
    for a in range(1, 4 * n + 1):
        for b in range(a + 1, 4 * n + 1):
            for s in range(1, 4):
                t = Tensor(TORSION_SIG, n)
                t.add_term(((a, b), (4 * n + s,)), Fraction(1))
                gens.append(t)
    return span(gens, ambient_sig=TORSION_SIG, n=n)
