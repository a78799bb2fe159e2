"""Sparse exact tensors over the adapted coframe of T = R^(4n+3).

A tensor signature is a tuple of slot groups ``(kind, space, arity)``:

* ``kind``  -- ``'d'`` (covector) or ``'u'`` (vector);
* ``space`` -- ``'T'`` (all indices), ``'V'`` (1..4n) or ``'W'`` (4n+1..4n+3);
* ``arity`` -- k >= 1; groups with arity > 1 are wedge groups, stored with
  strictly increasing indices and antisymmetry normalised at insertion.

Coefficient keys are tuples of per-group index tuples, 1-based.  Zero
coefficients are never stored.  ``space`` tags also fix how Lie-algebra
actions treat a slot: 'V'-down and 'W'-up slots are quotient modules
(T*/W* and T/V), so components pushed outside the range are dropped; the
other tagged slots are genuine submodules and must stay in range.

Coefficients may be Fractions or Gaussian rationals; all operations only
use field arithmetic and truthiness for zero tests.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

Group = tuple  # (kind, space, arity)
Sig = tuple  # tuple of Group

FORM1 = ("d", "T", 1)
UP1 = ("u", "T", 1)
MATRIX_SIG = (("d", "T", 1), ("u", "T", 1))


def form_sig(degree: int, *values: Group) -> Sig:
    """Signature of a degree-form with the given value groups."""
    if degree == 0:
        return tuple(values)
    return (("d", "T", degree),) + tuple(values)


def _sort_with_sign(indices):
    """Insertion sort returning (sorted tuple, parity sign) or (None, 0)."""
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i - 1] == idx[i]:
            return None, 0
    return tuple(idx), sign


class Tensor:
    """Immutable-by-discipline sparse tensor; do not mutate ``c`` externally."""

    __slots__ = ("sig", "n", "c")

    def __init__(self, sig: Sig, n: int, coeff=None):
        self.sig = tuple(tuple(g) for g in sig)
        self.n = n
        self.c = dict(coeff) if coeff else {}

    # -- construction ------------------------------------------------------
    def _range(self, space):
        if space == "V":
            return 1, 4 * self.n
        if space == "W":
            return 4 * self.n + 1, 4 * self.n + 3
        return 1, 4 * self.n + 3

    def add_term(self, key, coeff):
        """Accumulate one term; key groups may be unsorted within wedges."""
        if not coeff:
            return self
        norm = []
        sign = 1
        if len(key) != len(self.sig):
            raise ValueError(f"key {key} does not match signature {self.sig}")
        for (kind, space, arity), part in zip(self.sig, key):
            part = tuple(part)
            if len(part) != arity:
                raise ValueError(f"group {part} has wrong arity for {(kind, space, arity)}")
            lo, hi = self._range(space)
            for i in part:
                if not lo <= i <= hi:
                    raise ValueError(f"index {i} out of range [{lo},{hi}] for space {space}")
            if arity > 1:
                part, s = _sort_with_sign(part)
                if part is None:
                    return self
                sign *= s
            norm.append(part)
        k = tuple(norm)
        new = self.c.get(k, 0) + sign * coeff
        if new:
            self.c[k] = new
        else:
            self.c.pop(k, None)
        return self

    def copy(self) -> "Tensor":
        return Tensor(self.sig, self.n, self.c)

    # -- ring-module structure ----------------------------------------------
    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_same(other)
        out = self.copy()
        for k, v in other.c.items():
            new = out.c.get(k, 0) + v
            if new:
                out.c[k] = new
            else:
                out.c.pop(k, None)
        return out

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_same(other)
        out = self.copy()
        for k, v in other.c.items():
            new = out.c.get(k, 0) - v
            if new:
                out.c[k] = new
            else:
                out.c.pop(k, None)
        return out

    def __neg__(self) -> "Tensor":
        return Tensor(self.sig, self.n, {k: -v for k, v in self.c.items()})

    def scale(self, s) -> "Tensor":
        if not s:
            return Tensor(self.sig, self.n)
        return Tensor(self.sig, self.n, {k: s * v for k, v in self.c.items()})

    __rmul__ = scale
    __mul__ = scale

    def __eq__(self, other):
        return (
            isinstance(other, Tensor)
            and self.sig == other.sig
            and self.n == other.n
            and self.c == other.c
        )

    def __hash__(self):
        raise TypeError("Tensor is not hashable")

    def is_zero(self) -> bool:
        return not self.c

    def __repr__(self):
        if not self.c:
            return f"Tensor({self.sig}, 0)"
        terms = sorted(self.c.items())[:8]
        body = " + ".join(f"{v}*{k}" for k, v in terms)
        more = "" if len(self.c) <= 8 else f" (+{len(self.c) - 8} terms)"
        return f"Tensor[{body}{more}]"

    def _check_same(self, other):
        if self.sig != other.sig or self.n != other.n:
            raise ValueError(f"signature mismatch: {self.sig} (n={self.n}) vs {other.sig} (n={other.n})")

    # -- structural queries --------------------------------------------------
    def form_degree(self) -> int:
        """Arity of the leading covector group (0 if the tensor has none)."""
        if self.sig and self.sig[0][0] == "d" and self.sig[0][1] == "T":
            return self.sig[0][2]
        return 0

    def bigrade_split(self):
        """Split by (p,q) of the leading form group; {} input gives {}."""
        n4 = 4 * self.n
        out = {}
        for k, v in self.c.items():
            form = k[0] if self.sig and self.sig[0][0] == "d" and self.sig[0][1] == "T" else ()
            p = sum(1 for i in form if i <= n4)
            q = len(form) - p
            t = out.get((p, q))
            if t is None:
                t = out[(p, q)] = Tensor(self.sig, self.n)
            t.add_term(k, v)
        return out

    def bigrade_part(self, p: int, q: int) -> "Tensor":
        return self.bigrade_split().get((p, q), Tensor(self.sig, self.n))

    def value_part(self, space: str) -> "Tensor":
        """Component whose single value slot index lies in V (<=4n) or W."""
        if len(self.sig) < 2 or self.sig[-1][2] != 1:
            raise ValueError("value_part expects a trailing single value slot")
        n4 = 4 * self.n
        out = Tensor(self.sig, self.n)
        for k, v in self.c.items():
            i = k[-1][0]
            if (space == "V") == (i <= n4):
                out.add_term(k, v)
        return out


# -- basic constructors -----------------------------------------------------

def basis_form(n: int, *indices, coeff=Fraction(1)) -> Tensor:
    """e^{i1...ik} as a pure form."""
    t = Tensor(form_sig(len(indices)), n)
    t.add_term((tuple(indices),), coeff)
    return t


def basis_vector(n: int, i: int, coeff=Fraction(1)) -> Tensor:
    t = Tensor((("u", "T", 1),), n)
    t.add_term(((i,),), coeff)
    return t


def zero_like(sig: Sig, n: int) -> Tensor:
    return Tensor(sig, n)


def basis_of(sig: Sig, n: int):
    """All basis tensors of the signature, in lexicographic key order."""
    dim = 4 * n + 3
    ranges = []
    for kind, space, arity in sig:
        lo = 1 if space != "W" else 4 * n + 1
        hi = dim if space != "V" else 4 * n
        if arity == 1:
            ranges.append([(i,) for i in range(lo, hi + 1)])
        else:
            ranges.append(list(itertools.combinations(range(lo, hi + 1), arity)))
    out = []
    for key in itertools.product(*ranges):
        t = Tensor(sig, n)
        t.add_term(tuple(key), Fraction(1))
        out.append(t)
    return out


# -- multilinear operations ---------------------------------------------------

def wedge(a: Tensor, b: Tensor) -> Tensor:
    """Exterior product on the form parts; value groups concatenate a,b."""
    if a.n != b.n:
        raise ValueError("wedge: mismatched model size")
    ka = a.sig[0][2] if a.form_degree() else 0
    kb = b.sig[0][2] if b.form_degree() else 0
    if not ka or not kb:
        raise ValueError(f"wedge expects two forms, got signatures {a.sig} and {b.sig}")
    vals_a, vals_b = a.sig[1:], b.sig[1:]
    out = Tensor(form_sig(ka + kb, *(vals_a + vals_b)), a.n)
    for kx, vx in a.c.items():
        for ky, vy in b.c.items():
            out.add_term((kx[0] + ky[0],) + kx[1:] + ky[1:], vx * vy)
    return out


def tensor_mul(a: Tensor, b: Tensor) -> Tensor:
    """Plain tensor product (no wedge merging); groups concatenate."""
    if a.n != b.n:
        raise ValueError("tensor_mul: mismatched model size")
    out = Tensor(a.sig + b.sig, a.n)
    for kx, vx in a.c.items():
        for ky, vy in b.c.items():
            out.add_term(kx + ky, vx * vy)
    return out


def interior(v, a: Tensor) -> Tensor:
    """Interior product v -| a into the leading form group (Leibniz signs).

    ``v`` is a basis index or a Tensor with a single vector slot.
    Degree-0 input returns 0.
    """
    if a.form_degree() == 0:
        return Tensor(a.sig, a.n)
    if isinstance(v, Tensor):
        if len(v.sig) != 1 or v.sig[0][0] != "u" or v.sig[0][2] != 1:
            raise ValueError(f"interior expects a vector, got {v.sig}")
        comps = {k[0][0]: c for k, c in v.c.items()}
    else:
        comps = {int(v): Fraction(1)}
    k = a.sig[0][2]
    sig = form_sig(k - 1, *a.sig[1:]) if k > 1 else a.sig[1:]
    out = Tensor(sig, a.n)
    for key, coeff in a.c.items():
        form = key[0]
        for pos, idx in enumerate(form):
            vc = comps.get(idx)
            if not vc:
                continue
            rest = form[:pos] + form[pos + 1:]
            sgn = -1 if pos % 2 else 1
            newkey = ((rest,) if k > 1 else ()) + key[1:]
            out.add_term(newkey, sgn * vc * coeff)
    return out


def permute_groups(t: Tensor, perm) -> Tensor:
    """Reorder slot groups wholesale (no signs across groups)."""
    sig = tuple(t.sig[p] for p in perm)
    out = Tensor(sig, t.n)
    for k, v in t.c.items():
        out.add_term(tuple(k[p] for p in perm), v)
    return out


def retag(t: Tensor, sig: Sig) -> Tensor:
    """Reinterpret slots under a compatible signature (e.g. metric flat/sharp)."""
    out = Tensor(sig, t.n)
    for k, v in t.c.items():
        out.add_term(k, v)
    return out


def alternate_matrix(t: Tensor) -> Tensor:
    """Merge a (down, up) matrix pair after a k-form into the wedge group.

    Realises d-bar: e^K (x) (e^i (x) e_j) -> e^{Ki} (x) e_j, i.e. the maps
    called d1/d2/partial/delta depending on the leading degree.  Any value
    groups after the matrix pair are carried along.
    """
    if (
        len(t.sig) < 3
        or t.sig[0][0] != "d"
        or t.sig[0][1] != "T"
        or t.sig[1] != ("d", "T", 1)
        or t.sig[2][0] != "u"
        or t.sig[2][2] != 1
    ):
        raise ValueError(f"alternate_matrix: unsupported signature {t.sig}")
    k = t.sig[0][2]
    rest = t.sig[3:]
    out = Tensor(form_sig(k + 1, t.sig[2], *rest), t.n)
    for key, v in t.c.items():
        out.add_term((key[0] + key[1],) + key[2:], v)
    return out


def lie_act(mat, t: Tensor, groups: str = "all") -> Tensor:
    """Derivation action of a gl(T) element on a tensor.

    ``mat`` maps e_i -> sum_j mat[(i,j)] e_j; it may be a dict or a Tensor
    with signature (down, up).  ``groups`` is 'all' or 'values' (skip the
    leading form group).  Quotient slots ('W' up, 'V' down) project; sub-
    module slots ('V' up, 'W' down) raise if the action leaves the range.
    """
    A = mat.c if isinstance(mat, Tensor) else mat
    if isinstance(mat, Tensor):
        A = {(k[0][0], k[1][0]): v for k, v in mat.c.items()}
    rows: dict = {}
    cols: dict = {}
    for (i, j), v in A.items():
        rows.setdefault(i, []).append((j, v))
        cols.setdefault(j, []).append((i, v))
    out = Tensor(t.sig, t.n)
    start = 1 if (groups == "values" and t.form_degree()) else 0
    n4 = 4 * t.n
    for key, coeff in t.c.items():
        for gi in range(start, len(t.sig)):
            kind, space, _ = t.sig[gi]
            part = key[gi]
            for pos, idx in enumerate(part):
                if kind == "u":
                    for j, v in rows.get(idx, ()):
                        if space == "W" and j <= n4:
                            continue  # quotient T/V
                        if space == "V" and j > n4:
                            raise ValueError("action leaves the V submodule")
                        newpart = part[:pos] + (j,) + part[pos + 1:]
                        out.add_term(key[:gi] + (newpart,) + key[gi + 1:], v * coeff)
                else:
                    for i, v in cols.get(idx, ()):
                        if space == "V" and i > n4:
                            continue  # quotient T*/W*
                        if space == "W" and i <= n4:
                            raise ValueError("action leaves the W* submodule")
                        newpart = part[:pos] + (i,) + part[pos + 1:]
                        out.add_term(key[:gi] + (newpart,) + key[gi + 1:], -v * coeff)
    return out


def contract_form_value(alpha: Tensor, beta: Tensor) -> Tensor:
    """Tensorial interior product alpha -| beta for T-valued alpha.

    alpha is a k-form with one trailing vector slot; each value vector is
    contracted into beta's leading form group and the alpha form part is
    wedged on the left: (alpha -| beta) = alpha^i wedge (e_i -| beta).
    """
    if alpha.sig[-1][0] != "u" or alpha.sig[-1][2] != 1:
        raise ValueError("alpha must have a trailing vector value slot")
    ka = alpha.form_degree()
    kb = beta.form_degree()
    if kb == 0:
        return Tensor(form_sig(ka, *beta.sig), beta.n)
    sig = form_sig(ka + kb - 1, *beta.sig[1:])
    out = Tensor(sig, beta.n)
    for ka_key, va in alpha.c.items():
        forma = ka_key[0] if ka else ()
        i = ka_key[-1][0]
        for kb_key, vb in beta.c.items():
            formb = kb_key[0]
            for pos, idx in enumerate(formb):
                if idx != i:
                    continue
                sgn = -1 if pos % 2 else 1
                rest = formb[:pos] + formb[pos + 1:]
                out.add_term((forma + rest,) + kb_key[1:], sgn * va * vb)
    return out


def trace_value(t: Tensor) -> Tensor:
    """Contract a trailing (down, up) matrix value pair."""
    if len(t.sig) < 2 or t.sig[-2] != ("d", "T", 1) or t.sig[-1][0] != "u":
        raise ValueError(f"trace_value: expected trailing matrix pair in {t.sig}")
    out = Tensor(t.sig[:-2], t.n)
    for k, v in t.c.items():
        if k[-2][0] == k[-1][0]:
            key = k[:-2]
            cur = out.c.get(key, 0) + v
            if cur:
                out.c[key] = cur
            else:
                out.c.pop(key, None)
    return out


# -- matrices (gl(T) elements as plain dicts) ---------------------------------

def mat_from_tensor(t: Tensor) -> dict:
    return {(k[0][0], k[1][0]): v for k, v in t.c.items()}


def mat_to_tensor(A: dict, n: int) -> Tensor:
    t = Tensor(MATRIX_SIG, n)
    for (i, j), v in A.items():
        t.add_term(((i,), (j,)), v)
    return t


def mat_compose(A: dict, B: dict) -> dict:
    """Operator composition 'B first, then A' in the e^i(x)e_j layout."""
    rows_a: dict = {}
    for (i, j), v in A.items():
        rows_a.setdefault(i, []).append((j, v))
    out: dict = {}
    for (i, j), v in B.items():
        for k, w in rows_a.get(j, ()):
            key = (i, k)
            cur = out.get(key, 0) + v * w
            if cur:
                out[key] = cur
            else:
                out.pop(key, None)
    return out


def mat_bracket(A: dict, B: dict) -> dict:
    """Commutator of the associated operators, in the same layout."""
    out = mat_compose(A, B)
    for key, v in mat_compose(B, A).items():
        cur = out.get(key, 0) - v
        if cur:
            out[key] = cur
        else:
            out.pop(key, None)
    return out


def mat_apply(A: dict, i: int) -> dict:
    """Image of basis vector e_i as {j: coeff}."""
    return {j: v for (r, j), v in A.items() if r == i}


def form_to_matrix(alpha: Tensor) -> dict:
    """so(4n) identification: e^i ^ e^j -> e^i(x)e_j - e^j(x)e_i."""
    if alpha.sig != (("d", "T", 2),):
        raise ValueError("form_to_matrix expects a pure 2-form")
    out: dict = {}
    for (form,), v in alpha.c.items():
        i, j = form
        for key, c in (((i, j), v), ((j, i), -v)):
            cur = out.get(key, 0) + c
            if cur:
                out[key] = cur
            else:
                out.pop(key, None)
    return out
