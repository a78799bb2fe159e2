"""Decision procedures and canonical constructions for qc geometry.

The pipeline certifies the qc conditions, solves the canonical-connection
normalisations as exact linear systems, and reports curvature membership,
Ricci, Einstein and flatness data.  Everything is exact; negative
classifications are results, not errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .connection_engine import (
    ConnectionForm,
    CurvatureTensor,
    curvature,
    ricci,
    torsion,
    zero_connection,
)
from .lie_input import CoframeModel, d, transform_model, validate_jacobi
from .linalg import (
    Eliminator,
    LinAlgError,
    SubspaceBasis,
    UnsolvableError,
    exact_solve,
    invariant_subspace,
    project_components,
    solve_columns,
    span,
)
from .model_spaces import (
    CONNECTION_SIG,
    CURVATURE_SIG,
    TORSION_SIG,
    algebra_basis,
    eh_generator,
    etilde_subspace,
    lambda2vw_subspace,
    partial_map,
    partial_of,
    s20w_matrices,
    sp1_generators,
    sp_n_matrices,
    standard_forms,
    w1_image,
    w2_image,
)
from .tensor import (
    Tensor,
    alternate_matrix,
    basis_form,
    form_sig,
    lie_act,
    mat_to_tensor,
    trace_value,
    wedge,
)


class PipelineError(ValueError):
    pass


# -- small dense exact matrix helpers -----------------------------------------

def _mat_mul(A, B):
    m, k, n = len(A), len(B), len(B[0])
    return [
        [sum((A[i][t] * B[t][j] for t in range(k)), Fraction(0)) for j in range(n)]
        for i in range(m)
    ]


def _mat_inverse(A):
    m = len(A)
    aug = [list(row) + [Fraction(1) if i == j else Fraction(0) for j in range(m)] for i, row in enumerate(A)]
    for col in range(m):
        piv = next((r for r in range(col, m) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pivval = aug[col][col]
        aug[col] = [x / pivval for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[m:] for row in aug]


def _leading_minors_positive(G):
    m = len(G)
    work = [row[:] for row in G]
    # fraction-free-ish elimination tracking leading principal minors
    prev = Fraction(1)
    for k in range(m):
        piv = work[k][k]
        minor = piv * prev
        if minor <= 0:
            return False
        for r in range(k + 1, m):
            f = work[r][k] / piv
            for c in range(k, m):
                work[r][c] -= f * work[k][c]
        prev *= piv
    return True


# -- qc certification -----------------------------------------------------------


def _gamma_matrix(form: Tensor, n: int):
    dim = 4 * n
    G = [[Fraction(0)] * dim for _ in range(dim)]
    for (key,), v in form.c.items():
        a, b = key
        if b > dim:
            continue
        G[a - 1][b - 1] = v
        G[b - 1][a - 1] = -v
    return G


def qc_check(model: CoframeModel) -> dict:
    """Adapted / orbit-compatibility certification.

    adapted: (de^{4n+s})^{2,0} = omega_s exactly.  orbit_compatible: the
    three vertical differentials define a compatible quaternion-Hermitian
    triple (exact J-relations and a rational Sylvester test).
    """
    mc = standard_forms(model.n)
    n = model.n
    gammas = [model.d_form(4 * n + s).bigrade_part(2, 0) for s in (1, 2, 3)]
    adapted = all(g == mc.omega[s] for s, g in enumerate(gammas))
    witness = None
    mats = [_gamma_matrix(g, n) for g in gammas]
    Gt = [[[row[i] for row in m] for i in range(len(m))] for m in mats]  # transposes
    invs = []
    orbit = True
    for s, m in enumerate(Gt):
        inv = _mat_inverse(m)
        if inv is None:
            orbit = False
            witness = f"gamma_{s + 1} degenerate"
            break
        invs.append(inv)
    J = None
    if orbit:
        # J_s = -gamma_{s+1}^{-1} gamma_{s+2} (cyclic), as maps V -> V;
        # the overall sign is pinned by the quaternion relation below
        J = [
            [[-x for x in row] for row in _mat_mul(invs[(s + 1) % 3], Gt[(s + 2) % 3])]
            for s in range(3)
        ]
        dim = 4 * n
        ident = [[Fraction(1) if i == j else Fraction(0) for j in range(dim)] for i in range(dim)]
        for s in range(3):
            sq = _mat_mul(J[s], J[s])
            if sq != [[-x for x in row] for row in ident]:
                orbit = False
                witness = f"J_{s + 1}^2 != -id"
                break
    if orbit:
        j1j2 = _mat_mul(J[0], J[1])
        if j1j2 != J[2]:
            orbit = False
            witness = "J_1 J_2 != J_3"
    if orbit:
        # g(x, y) = gamma_1(J_1 x, y): with omega(x, y) = <x, J y> this
        # recovers the metric, symmetric positive definite by Sylvester
        J1t = [[J[0][c][r] for c in range(4 * n)] for r in range(4 * n)]
        G = _mat_mul(J1t, mats[0])
        sym = all(G[i][j] == G[j][i] for i in range(len(G)) for j in range(len(G)))
        if not sym:
            orbit = False
            witness = "metric candidate not symmetric"
        elif not _leading_minors_positive(G):
            orbit = False
            witness = "metric candidate not positive definite"
    return {"adapted": adapted, "orbit_compatible": orbit, "witness": witness}


# -- sp(1) Casimir isotype machinery --------------------------------------------


def _sp1_casimir(t: Tensor, n: int) -> Tensor:
    out = Tensor(t.sig, t.n)
    for m in sp1_generators(standard_forms(n)):
        out = out + lie_act(m, lie_act(m, t))
    return out


@lru_cache(maxsize=None)
def _w2_casimir_data(n: int):
    """Verified sp(1)-Casimir eigenvalues (ES^3H, ES^5H) on d2(W_2)."""
    lam3, lam5 = Fraction(-15), Fraction(-35)
    for g in w2_image(n).generators:
        x = _sp1_casimir(g, n)
        y = _sp1_casimir(x, n) - (lam3 + lam5) * x + (lam3 * lam5) * g
        if not y.is_zero():
            raise PipelineError("sp(1) Casimir eigenvalues on W_2 are not (-15, -35)")
    return lam3, lam5


def casimir_split_w2(t: Tensor, n: int):
    """Split an element of d2(W_2) into (ES^3H, ES^5H) parts, exactly."""
    lam3, lam5 = _w2_casimir_data(n)
    if t.is_zero():
        return t, t
    ct = _sp1_casimir(t, n)
    part3 = (Fraction(1) / (lam3 - lam5)) * (ct - lam5 * t)
    part5 = t - part3
    return part3, part5


@lru_cache(maxsize=None)
def es5h_subspace(n: int) -> SubspaceBasis:
    gens = []
    for g in w2_image(n).generators:
        _, p5 = casimir_split_w2(g, n)
        gens.append(p5)
    return span(gens, ambient_sig=TORSION_SIG, n=n)


# -- torsion decomposition --------------------------------------------------------


@dataclass
class TorsionDecomposition:
    theta: Tensor
    theta_star: Tensor  # im d_B component
    theta_q: Tensor  # Lambda^2 V* (x) W component
    theta_1: Tensor  # d1(W_1) component
    theta_2: Tensor  # d2(W_2) component
    theta_minus1: Tensor  # (1,1) (x) W part of theta_star
    theta_2_es3h: Tensor
    theta_2_es5h: Tensor

    def recomposes(self) -> bool:
        return self.theta == self.theta_star + self.theta_q + self.theta_1 + self.theta_2


@lru_cache(maxsize=None)
def _b_decomposition_spaces(n: int):
    return (
        partial_map("b", n).image,
        lambda2vw_subspace(n),
        w1_image(n),
        w2_image(n),
    )


def torsion_decomposition(model: CoframeModel, omega: ConnectionForm = None) -> TorsionDecomposition:
    n = model.n
    if omega is None:
        omega = zero_connection(model)
    theta = torsion(omega)
    spaces = _b_decomposition_spaces(n)
    star, q, t1, t2 = project_components(theta, list(spaces))
    n4 = 4 * n
    minus1 = Tensor(TORSION_SIG, n)
    for key, v in star.bigrade_part(1, 1).c.items():
        if key[1][0] > n4:
            minus1.add_term(key, v)
    p3, p5 = casimir_split_w2(t2, n)
    return TorsionDecomposition(theta, star, q, t1, t2, minus1, p3, p5)


def integrability_check(model: CoframeModel) -> dict:
    dec = torsion_decomposition(model)
    es5 = dec.theta_2_es5h
    if model.n > 1 and not es5.is_zero():
        raise PipelineError("nonzero ES^5H torsion at n > 1 violates the reduction theorem")
    return {"integrable": es5.is_zero(), "es3h_part": dec.theta_2_es3h, "es5h_part": es5}


# -- the qc connection -------------------------------------------------------------


def _span_omega_component(form2: Tensor, n: int):
    """Coefficients of a 2-form along span{omega_1, omega_2, omega_3}."""
    mc = standard_forms(n)
    out = []
    for s in range(3):
        dot = Fraction(0)
        norm = Fraction(0)
        for key, v in mc.omega[s].c.items():
            dot += v * form2.c.get(key, 0)
            norm += v * v
        out.append(dot / norm)
    return out


def trace_omega_coeffs(omega_t: Tensor, n: int):
    return _span_omega_component(trace_value(omega_t).bigrade_part(2, 0), n)


def qc_connection(model: CoframeModel) -> ConnectionForm:
    """The unique K-connection with torsion Theta_0 and normalised trace."""
    n = model.n
    mc = standard_forms(n)
    pm = partial_map("k", n)
    target = mc.theta0 - model.de_tensor()
    try:
        sol = exact_solve(pm.apply, pm.domain_tensors(), target)
    except UnsolvableError as exc:
        raise PipelineError(
            "not an integrable qc structure: torsion equation has no K-solution"
        ) from exc
    kers = sol.kernel.generators
    kalg = algebra_basis("k", n)

    def coeffs_at(tvec):
        w = sol.particular.copy()
        for c, g in zip(tvec, kers):
            w = w + c * g
        conn = ConnectionForm(model, None, w)
        return conn, trace_omega_coeffs(curvature(conn).tensor, n)

    zero = [Fraction(0)] * len(kers)
    _, c0 = coeffs_at(zero)
    cols = []
    for j in range(len(kers)):
        unit = list(zero)
        unit[j] = Fraction(1)
        _, cj = coeffs_at(unit)
        cols.append([cj[s] - c0[s] for s in range(3)])
    # affinity check at the all-ones point
    ones = [Fraction(1)] * len(kers)
    _, call = coeffs_at(ones)
    for s in range(3):
        if call[s] != c0[s] + sum(col[s] for col in cols):
            raise PipelineError("trace normalisation is not affine; internal invariant violated")
    sol_t, kernel, resid = solve_columns(
        [(j, {(s,): cols[j][s] for s in range(3) if cols[j][s]}) for j in range(len(kers))],
        {(s,): -c0[s] for s in range(3) if c0[s]},
    )
    if sol_t is None or kernel:
        raise PipelineError("trace normalisation system is singular; internal invariant violated")
    tvec = [Fraction(0)] * len(kers)
    for j, c in sol_t.items():
        tvec[j] = c
    conn, cfinal = coeffs_at(tvec)
    if any(cfinal):
        raise PipelineError("trace normalisation failed to vanish")
    return ConnectionForm(model, kalg, conn.coeff)


# -- curvature module membership -----------------------------------------------


def _algebra_value_tensors(n: int, mats):
    return [mat_to_tensor(m, n) for m in mats]


def _block_basis(n: int, bigrades, mats):
    """Basis of sum over (p,q) of Lambda^{p,q} (x) span(mats) in curvature signature."""
    n4 = 4 * n
    dim = 4 * n + 3
    out = []
    import itertools

    for p, q in bigrades:
        horiz = list(itertools.combinations(range(1, n4 + 1), p))
        vert = list(itertools.combinations(range(n4 + 1, dim + 1), q))
        for h in horiz:
            for w in vert:
                for m in mats:
                    t = Tensor(CURVATURE_SIG, n)
                    for (r, c), v in m.items():
                        t.add_term((h + w, (r,), (c,)), v)
                    out.append(t)
    return out


@lru_cache(maxsize=None)
def curvature_spaces(n: int) -> dict:
    """R_1..R_4 and their trace-free variants, plus trivial isotypes."""
    mc = standard_forms(n)
    et = etilde_subspace(n)
    dim = 4 * n + 3
    s_gens = []
    for i in range(1, dim + 1):
        ei = basis_form(n, i)
        for g in et.generators:
            s_gens.append(wedge(ei, g))
    s_space = span(s_gens, ambient_sig=(("d", "T", 3), ("u", "T", 1)), n=n)

    spn_h = sp_n_matrices(n) + sp1_generators(mc) + [
        {(i, i): Fraction(-1) for i in range(1, 4 * n + 1)} | {(i, i): Fraction(-2) for i in range(4 * n + 1, dim + 1)}
    ]
    eh = [eh_generator(mc, a) for a in range(1, 4 * n + 1)]
    blocks = {
        "R1": _block_basis(n, [(2, 0)], spn_h),
        "R2": _block_basis(n, [(1, 1)], spn_h) + _block_basis(n, [(2, 0)], eh),
        "R3": _block_basis(n, [(0, 2)], spn_h) + _block_basis(n, [(1, 1)], eh),
        "R4": _block_basis(n, [(0, 2)], eh),
    }
    from .linalg import preimage_basis

    spaces = {}
    for name, basis in blocks.items():
        gens = preimage_basis(alternate_matrix, basis, s_space)
        spaces[name] = span(gens, ambient_sig=CURVATURE_SIG, n=n)

    def tracefree(sub):
        gens = []
        elim = Eliminator()
        # reduce the trace forms; keep combinations with zero trace
        cols = [(i, trace_value(g).c) for i, g in enumerate(sub.generators)]
        _, kernel, _ = solve_columns(cols)
        out = []
        for combo in kernel:
            t = Tensor(CURVATURE_SIG, n)
            for i, c in combo.items():
                t = t + c * sub.generators[i]
            if not t.is_zero():
                out.append(t)
        return span(out, ambient_sig=CURVATURE_SIG, n=n)

    spaces["R1_tilde"] = tracefree(spaces["R1"])
    spaces["R2_tilde"] = tracefree(spaces["R2"])
    spaces["R3_tilde"] = tracefree(spaces["R3"])
    action = sp_n_matrices(n) + sp1_generators(mc)
    for name in ("R1", "R3"):
        spaces[name + "_trivial"] = invariant_subspace(action, spaces[name], lambda m, t: lie_act(m, t))
    return spaces


@dataclass
class CurvatureMembership:
    components: dict  # name -> Tensor, over R1..R4
    in_r_sum: bool
    residual: Tensor
    r1_trivial_scalar: Fraction
    r3_trivial_scalar: Fraction
    r1_in_trivial: bool
    r3_in_trivial: bool
    tilde_memberships: dict


def curvature_module_membership(omega_t: CurvatureTensor) -> CurvatureMembership:
    n = omega_t.model.n
    spaces = curvature_spaces(n)
    decomposition = [spaces["R1"], spaces["R2"], spaces["R3"], spaces["R4"]]
    try:
        comps = project_components(omega_t.tensor, decomposition)
        in_sum = True
        residual = Tensor(CURVATURE_SIG, n)
    except UnsolvableError as exc:
        comps = [Tensor(CURVATURE_SIG, n)] * 4
        in_sum = False
        residual = exc.residual
    named = {f"R{i + 1}": comps[i] for i in range(4)}

    def trivial_scalar(name, comp):
        triv = spaces[name + "_trivial"]
        if triv.rank != 1:
            raise PipelineError(f"trivial isotype of {name} is not one-dimensional")
        gen = triv.generators[0]
        # normalise: first key (lexicographic) has positive coefficient
        k0 = min(gen.c)
        if gen.c[k0] < 0:
            gen = -1 * gen
        try:
            coeffs = span([gen], ambient_sig=CURVATURE_SIG, n=n).coefficients(comp)
            return coeffs.get(0, Fraction(0)), True
        except UnsolvableError:
            return Fraction(0), False

    s1, in1 = trivial_scalar("R1", named["R1"])
    s3, in3 = trivial_scalar("R3", named["R3"])
    tilde = {
        name: spaces[name + "_tilde"].contains(named[name]) for name in ("R1", "R2", "R3")
    }
    return CurvatureMembership(named, in_sum, residual, s1, s3, in1, in3, tilde)


# -- qcm connection ---------------------------------------------------------------


@dataclass
class QcmData:
    omega_qcm: ConnectionForm
    chi: Tensor  # T* (x) EH correction as a connection-signature tensor
    chi_V_matrix: list  # 4n x 4n rational matrix under EH = V*
    chi_W_matrix: list  # 3 x 4n rational matrix
    chi_V: Tensor
    chi_W: Tensor


def qcm_connection(model: CoframeModel) -> QcmData:
    """Unique Sp(n)Sp(1)-connection with torsion Theta_0 + d(chi_V) + d(chi_W)."""
    n = model.n
    mc = standard_forms(n)
    dim = model.dim
    galg = algebra_basis("spn_sp1", n)
    eh = [eh_generator(mc, a) for a in range(1, 4 * n + 1)]
    cols = []
    for i in range(1, dim + 1):
        for gi, m in enumerate(galg.mats):
            cols.append((("w", i, gi), partial_of(i, m, n).c))
    for i in range(1, dim + 1):
        for a, m in enumerate(eh):
            cols.append((("chi", i, a + 1), {k: -v for k, v in partial_of(i, m, n).c.items()}))
    target = mc.theta0 - model.de_tensor()
    sol, kernel, residual = solve_columns(cols, target.c)
    if kernel:
        raise PipelineError("qcm system has a kernel; d_G injectivity violated")
    if sol is None:
        raise UnsolvableError(
            "frame is not qcm-adapted", residual=Tensor(TORSION_SIG, n, residual)
        )
    wt = Tensor(CONNECTION_SIG, n)
    chit = Tensor(CONNECTION_SIG, n)
    chi_V = [[Fraction(0)] * (4 * n) for _ in range(4 * n)]
    chi_W = [[Fraction(0)] * (4 * n) for _ in range(3)]
    for label, c in sol.items():
        kind, i, j = label
        if kind == "w":
            for key, v in galg.mats[j].items():
                wt.add_term(((i,), (key[0],), (key[1],)), c * v)
        else:
            for key, v in eh[j - 1].items():
                chit.add_term(((i,), (key[0],), (key[1],)), c * v)
            if i <= 4 * n:
                chi_V[i - 1][j - 1] += c
            else:
                chi_W[i - 4 * n - 1][j - 1] += c
    for a in range(4 * n):
        for b in range(4 * n):
            if chi_V[a][b] != chi_V[b][a]:
                raise PipelineError("chi_V is not symmetric; internal invariant violated")
    n4 = 4 * n
    chiV_t = Tensor(CONNECTION_SIG, n)
    chiW_t = Tensor(CONNECTION_SIG, n)
    for key, v in chit.c.items():
        (chiV_t if key[0][0] <= n4 else chiW_t).add_term(key, v)
    return QcmData(
        ConnectionForm(model, galg, wt),
        chit,
        chi_V,
        chi_W,
        chiV_t,
        chiW_t,
    )


def eh_shift_matrix(model: CoframeModel, v_coeffs) -> list:
    """Frame change e^a -> e^a + [xi_v]-row entries for v = sum v_a e_a.

    These are the EH-structured complement shifts; they form an abelian
    group and act affinely on the qcm obstruction class.
    """
    n = model.n
    mc = standard_forms(n)
    dim = model.dim
    S = [[Fraction(1) if i == j else Fraction(0) for j in range(dim)] for i in range(dim)]
    for a, c in enumerate(v_coeffs, start=1):
        if not c:
            continue
        for (w_idx, b), val in eh_generator(mc, a).items():
            S[b - 1][w_idx - 1] += c * val
    return S


def adapt_complement(model: CoframeModel) -> CoframeModel:
    """One-shot linear complement correction making the qcm solve succeed.

    The correction ranges over the EH-structured frame shifts, whose
    action on the obstruction class in coker d_G is exactly affine; a
    failing post-condition is reported as an error, not retried.
    """
    n = model.n
    try:
        qcm_connection(model)
        return model
    except UnsolvableError:
        pass
    mc = standard_forms(n)
    pmg = partial_map("g", n)
    elim = Eliminator()
    for img in pmg.images:
        elim.add_column(img.c, None)

    def residual_class(m):
        return elim.residual((mc.theta0 - m.de_tensor()).c)

    def shifted(v_coeffs):
        return transform_model(model, eh_shift_matrix(model, v_coeffs))

    r0 = residual_class(model)
    zero = [Fraction(0)] * (4 * n)
    cols = []
    for a in range(4 * n):
        unit = list(zero)
        unit[a] = Fraction(1)
        r = residual_class(shifted(unit))
        diff = dict(r)
        for k, v in r0.items():
            cur = diff.get(k, 0) - v
            if cur:
                diff[k] = cur
            else:
                diff.pop(k, None)
        cols.append((a, diff))
    sol, _, res = solve_columns(cols, {k: -v for k, v in r0.items()})
    if sol is None:
        raise PipelineError("complement correction did not converge: obstruction outside reach")
    v = list(zero)
    for a, c in sol.items():
        v[a] = c
    corrected = shifted(v)
    corrected.name = model.name
    try:
        qcm_connection(corrected)
    except UnsolvableError as exc:
        raise PipelineError("complement correction did not converge") from exc
    return corrected


# -- Biquard and Duchemin connections ---------------------------------------------


def _value_filter(t: Tensor, n: int, part: str) -> Tensor:
    n4 = 4 * n
    out = Tensor(t.sig, t.n)
    for key, v in t.c.items():
        i = key[-1][0]
        if (part == "V") == (i <= n4):
            out.add_term(key, v)
    return out


@lru_cache(maxsize=None)
def _spn_sp1_perp_glV(n: int):
    """Orthocomplement of sp(n)+sp(1)|_V inside gl(V) for the trace form."""
    mc = standard_forms(n)
    inside = sp_n_matrices(n) + [
        {k: v for k, v in m.items() if k[0] <= 4 * n} for m in sp1_generators(mc)
    ]
    basis = [
        {(i, j): Fraction(1)}
        for i in range(1, 4 * n + 1)
        for j in range(1, 4 * n + 1)
    ]
    cols = []
    for bi, B in enumerate(basis):
        constraints = {}
        for si, S in enumerate(inside):
            val = sum(v * S.get(k, 0) for k, v in B.items())
            if val:
                constraints[(si,)] = val
        cols.append((bi, constraints))
    _, kernel, _ = solve_columns(cols)
    out = []
    for combo in kernel:
        m = {}
        for bi, c in combo.items():
            for k, v in basis[bi].items():
                cur = m.get(k, 0) + c * v
                if cur:
                    m[k] = cur
                else:
                    m.pop(k, None)
        out.append(m)
    return out


@lru_cache(maxsize=None)
def _biquard_constraint_space(n: int) -> SubspaceBasis:
    """d(W* (x) (sp(n)+sp(1))^perp) inside Lambda^2 T* (x) T."""
    gens = []
    for s in range(1, 4):
        for m in _spn_sp1_perp_glV(n):
            gens.append(partial_of(4 * n + s, m, n))
    return span(gens, ambient_sig=TORSION_SIG, n=n)


@lru_cache(maxsize=None)
def _w_s2v_subspace(n: int) -> SubspaceBasis:
    """W* (x) S^2 V embedded in Lambda^{1,1} (x) V."""
    gens = []
    for s in range(1, 4):
        for a in range(1, 4 * n + 1):
            for b in range(a, 4 * n + 1):
                t = Tensor(TORSION_SIG, n)
                t.add_term(((a, 4 * n + s), (b,)), Fraction(1))
                t.add_term(((b, 4 * n + s), (a,)), Fraction(1))
                gens.append(t)
    return span(gens, ambient_sig=TORSION_SIG, n=n)


@dataclass
class BiquardData:
    omega: ConnectionForm
    theta: Tensor
    theta_20: Tensor
    theta_11: Tensor
    theta_02: Tensor


def _solve_constrained_connection(model, algebra, constraint_blocks) -> ConnectionForm:
    """Solve for a connection whose torsion satisfies linear block constraints.

    constraint_blocks: list of (extractor, membership SubspaceBasis or None).
    Extractor maps a torsion tensor to the constrained part; None membership
    means the part must vanish.
    """
    n = model.n
    dim = model.dim
    cols = []
    for i in range(1, dim + 1):
        for gi, m in enumerate(algebra.mats):
            img = partial_of(i, m, n)
            merged = {}
            for bi, (extract, _) in enumerate(constraint_blocks):
                for key, v in extract(img).c.items():
                    merged[(bi,) + key] = v
            cols.append((("w", i, gi), merged))
    for bi, (_, memb) in enumerate(constraint_blocks):
        if memb is None:
            continue
        for si, sgen in enumerate(memb.generators):
            merged = {(bi,) + key: -v for key, v in sgen.c.items()}
            cols.append((("s", bi, si), merged))
    de = model.de_tensor()
    target = {}
    for bi, (extract, _) in enumerate(constraint_blocks):
        for key, v in extract(de).c.items():
            target[(bi,) + key] = -v
    sol, kernel, residual = solve_columns(cols, target)
    if sol is None:
        raise PipelineError("constrained torsion system unsolvable on this input")
    for combo in kernel:
        if any(lab[0] == "w" for lab in combo):
            raise PipelineError("constrained torsion system is not unique")
    wt = Tensor(CONNECTION_SIG, n)
    for label, c in sol.items():
        if label[0] != "w":
            continue
        _, i, gi = label
        for key, v in algebra.mats[gi].items():
            wt.add_term(((i,), (key[0],), (key[1],)), c * v)
    return ConnectionForm(model, algebra, wt)


def biquard_connection(model: CoframeModel) -> BiquardData:
    n = model.n
    galg = algebra_basis("spn_sp1", n)
    blocks = [
        (lambda t: _value_filter(t.bigrade_part(2, 0), n, "V"), None),
        (lambda t: _value_filter(t.bigrade_part(1, 1), n, "V"), _biquard_constraint_space(n)),
    ]
    conn = _solve_constrained_connection(model, galg, blocks)
    th = torsion(conn)
    return BiquardData(
        conn,
        th,
        th.bigrade_part(2, 0),
        th.bigrade_part(1, 1),
        th.bigrade_part(0, 2),
    )


def duchemin_connection(model: CoframeModel) -> BiquardData:
    n = model.n
    galg = algebra_basis("spn_sp1_soW", n)
    blocks = [
        (lambda t: _value_filter(t.bigrade_part(2, 0), n, "V"), None),
        (lambda t: _value_filter(t.bigrade_part(0, 2), n, "W"), None),
        (lambda t: _value_filter(t.bigrade_part(1, 1), n, "V"), _w_s2v_subspace(n)),
        (lambda t: _value_filter(t.bigrade_part(1, 1), n, "W"), es5h_subspace(n)),
    ]
    conn = _solve_constrained_connection(model, galg, blocks)
    th = torsion(conn)
    return BiquardData(
        conn,
        th,
        th.bigrade_part(2, 0),
        th.bigrade_part(1, 1),
        th.bigrade_part(0, 2),
    )


# -- Einstein / flatness report -----------------------------------------------------


def four_form_closed(model: CoframeModel) -> bool:
    mc = standard_forms(model.n)
    total = Tensor(form_sig(5), model.n)
    for s in range(3):
        total = total + d(wedge(mc.omega[s], mc.omega[s]), model)
    return total.is_zero()


def chi_v_scalar_part(qcm: QcmData, n: int):
    """(trace/4n, traceless matrix) of chi_V."""
    tr = sum(qcm.chi_V_matrix[a][a] for a in range(4 * n))
    lam = tr / Fraction(4 * n)
    traceless = [
        [qcm.chi_V_matrix[a][b] - (lam if a == b else 0) for b in range(4 * n)]
        for a in range(4 * n)
    ]
    return lam, traceless


def chi_w_zero(qcm: QcmData) -> bool:
    return all(not v for row in qcm.chi_W_matrix for v in row)


@dataclass
class GeometryReport:
    name: str
    n: int
    is_valid_lie_algebra: bool = False
    is_qc_adapted: bool = False
    is_qc_orbit: bool = False
    orbit_witness: str = None
    is_integrable: bool = False
    decomposition: TorsionDecomposition = None
    qc_conn: ConnectionForm = None
    qc_curvature: CurvatureTensor = None
    membership: CurvatureMembership = None
    qcm: QcmData = None
    ricci_matrix: Tensor = None
    scalar_curvature: Fraction = None
    traceless_ricci_zero: bool = None
    qc_einstein: bool = None
    fundamental_four_form_closed: bool = None
    chi_scalar: Fraction = None
    is_flat: bool = None
    biquard: BiquardData = None
    duchemin: BiquardData = None
    failure: str = None

    def json_dict(self) -> dict:
        def rat(x):
            return str(x) if x is not None else None

        def tensor_table(t):
            if t is None:
                return None
            return {
                "|".join(",".join(str(i) for i in grp) for grp in key): str(v)
                for key, v in sorted(t.c.items())
            }

        def matrix(rows):
            if rows is None:
                return None
            return [[str(v) for v in row] for row in rows]

        out = {
            "name": self.name,
            "n": self.n,
            "valid": self.is_valid_lie_algebra,
            "qc_adapted": self.is_qc_adapted,
            "qc_orbit": self.is_qc_orbit,
            "integrable": self.is_integrable,
            "qc_connection": tensor_table(self.qc_conn.coeff if self.qc_conn else None),
            "curvature_components": None,
            "chi_V": matrix(self.qcm.chi_V_matrix if self.qcm else None),
            "chi_W": matrix(self.qcm.chi_W_matrix if self.qcm else None),
            "ricci": None,
            "scalar_curvature": rat(self.scalar_curvature),
            "qc_einstein": self.qc_einstein,
            "four_form_closed": self.fundamental_four_form_closed,
            "flat": self.is_flat,
            "biquard_torsion": None,
        }
        if self.membership is not None:
            out["curvature_components"] = {
                key: tensor_table(tensor) for key, tensor in self.membership.components.items()
            }
        if self.ricci_matrix is not None:
            n4 = 4 * self.n
            rows = [[Fraction(0)] * n4 for _ in range(n4)]
            for key, v in self.ricci_matrix.c.items():
                rows[key[0][0] - 1][key[1][0] - 1] = v
            out["ricci"] = matrix(rows)
        if self.biquard is not None:
            out["biquard_torsion"] = {
                "t11": tensor_table(self.biquard.theta_11),
                "t02": tensor_table(self.biquard.theta_02),
            }
        return out


def analyze(model: CoframeModel) -> GeometryReport:
    """Full pipeline; negative classifications short-circuit with a partial report."""
    rep = GeometryReport(model.name, model.n)
    rep.is_valid_lie_algebra = not validate_jacobi(model)
    if not rep.is_valid_lie_algebra:
        rep.failure = "structure constants fail the consistency check"
        return rep
    check = qc_check(model)
    rep.is_qc_adapted = check["adapted"]
    rep.is_qc_orbit = check["orbit_compatible"]
    rep.orbit_witness = check["witness"]
    if not rep.is_qc_adapted:
        rep.failure = "coframe is not qc-adapted"
        return rep
    rep.decomposition = torsion_decomposition(model)
    integ = integrability_check(model)
    rep.is_integrable = integ["integrable"]
    if not rep.is_integrable:
        rep.failure = "qc structure is not integrable"
        return rep
    rep.qc_conn = qc_connection(model)
    rep.qc_curvature = curvature(rep.qc_conn)
    rep.membership = curvature_module_membership(rep.qc_curvature)
    rep.is_flat = rep.qc_curvature.is_zero()
    try:
        rep.qcm = qcm_connection(model)
    except UnsolvableError:
        rep.failure = "frame is not qcm-adapted (run adapt_complement)"
        return rep
    ric, scal = ricci(rep.qcm.omega_qcm)
    rep.ricci_matrix = ric
    rep.scalar_curvature = scal
    n4 = 4 * model.n
    lam = scal / Fraction(n4)
    traceless = ric.copy()
    for a in range(1, n4 + 1):
        traceless.add_term(((a,), (a,)), -lam)
    rep.traceless_ricci_zero = traceless.is_zero()
    chi_lam, chi_traceless = chi_v_scalar_part(rep.qcm, model.n)
    rep.chi_scalar = chi_lam
    chi_tl_zero = all(not v for row in chi_traceless for v in row)
    rep.qc_einstein = chi_tl_zero
    rep.fundamental_four_form_closed = four_form_closed(model)
    cond2 = chi_tl_zero and chi_w_zero(rep.qcm)
    if model.n > 1:
        flags = (rep.fundamental_four_form_closed, cond2, rep.traceless_ricci_zero, chi_tl_zero)
        if len(set(flags)) != 1:
            raise PipelineError(
                f"Einstein equivalence chain violated at n > 1: {flags}"
            )
    rep.biquard = biquard_connection(model)
    rep.duchemin = duchemin_connection(model)
    return rep
