"""Exact sparse linear algebra over tensor spaces.

Vectors are the coefficient dicts of tensors (keys are the canonical
multi-index tuples), so no separate basis enumeration is needed.  All
elimination is fraction-free only in spirit: coefficients are exact
field elements (Fraction or Gaussian), and pivots are normalised to 1.
"""

from __future__ import annotations

from fractions import Fraction

from .tensor import Tensor


class LinAlgError(ValueError):
    """Structural failure: mismatched spaces, dependent subspaces, etc."""


class UnsolvableError(LinAlgError):
    """Linear system has no solution; carries the exact residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def _addmul(vec: dict, other: dict, scale) -> None:
    for k, v in other.items():
        cur = vec.get(k, 0) + scale * v
        if cur:
            vec[k] = cur
        else:
            vec.pop(k, None)


class Eliminator:
    """Incremental Gaussian elimination with combination tracking.

    Columns are fed one at a time; each reduces against current pivots.
    A column that reduces to zero contributes its combination to the
    kernel.  Targets reduce the same way, yielding coefficients of a
    particular solution plus an exact residual.
    """

    def __init__(self):
        self.pivots = {}  # key -> (vector dict, combo dict)
        self.order = []  # pivot keys in insertion order

    def _reduce(self, vec: dict, combo: dict):
        while True:
            hits = [k for k in vec if k in self.pivots]
            if not hits:
                return vec, combo
            k = min(hits)
            pvec, pcombo = self.pivots[k]
            s = vec[k]
            _addmul(vec, pvec, -s)
            _addmul(combo, pcombo, -s)

    def add_column(self, vec: dict, label) -> bool:
        """Returns True if the column increased the rank."""
        vec, combo = self._reduce(dict(vec), {label: Fraction(1)})
        if not vec:
            return False
        key = min(vec)
        inv = 1 / vec[key]
        self.pivots[key] = (
            {k: inv * v for k, v in vec.items()},
            {k: inv * v for k, v in combo.items()},
        )
        self.order.append(key)
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def residual(self, vec: dict) -> dict:
        v, _ = self._reduce(dict(vec), {})
        return v

    def coefficients(self, vec: dict):
        """vec = sum coeff_label * column; raises if not in the span."""
        v, combo = self._reduce(dict(vec), {})
        if v:
            raise UnsolvableError("vector not in span", residual=v)
        return {k: -c for k, c in combo.items()}


def solve_columns(columns, target=None):
    """Solve sum x_i col_i = target.

    Returns (solution dict label->coeff or None, kernel list of combos,
    residual dict).  ``columns`` is a list of (label, dict) pairs.
    """
    elim = Eliminator()
    kernel = []
    for label, col in columns:
        vec, combo = elim._reduce(dict(col), {label: Fraction(1)})
        if not vec:
            kernel.append(combo)
            continue
        key = min(vec)
        inv = 1 / vec[key]
        elim.pivots[key] = (
            {k: inv * v for k, v in vec.items()},
            {k: inv * v for k, v in combo.items()},
        )
        elim.order.append(key)
    if target is None:
        return None, kernel, {}
    vec, combo = elim._reduce(dict(target), {})
    if vec:
        return None, kernel, vec
    return {k: -c for k, c in combo.items()}, kernel, {}


class SubspaceBasis:
    """Exact spanning set with membership and projection services."""

    def __init__(self, ambient_sig, n, generators):
        self.ambient = tuple(tuple(g) for g in ambient_sig)
        self.n = n
        self.generators = []
        self._elim = Eliminator()
        for g in generators:
            self.add(g)

    def add(self, t: Tensor) -> bool:
        if t.sig != self.ambient or t.n != self.n:
            raise LinAlgError(f"generator signature {t.sig} does not match ambient {self.ambient}")
        if self._elim.add_column(t.c, len(self.generators)):
            self.generators.append(t)
            return True
        return False

    @property
    def rank(self) -> int:
        return len(self.generators)

    def zero(self) -> Tensor:
        return Tensor(self.ambient, self.n)

    def contains(self, t: Tensor) -> bool:
        return not self._elim.residual(t.c)

    def residual(self, t: Tensor) -> Tensor:
        return Tensor(self.ambient, self.n, self._elim.residual(t.c))

    def coefficients(self, t: Tensor):
        """Coordinates of t in the stored generators (raises if outside)."""
        return self._elim.coefficients(t.c)

    def project_along(self, t: Tensor, complement: "SubspaceBasis") -> Tensor:
        """Component of t in self along the given complement."""
        comps = project_components(t, [self, complement])
        return comps[0]

    def intersect_filter(self, predicate):
        """Subspace spanned by generators satisfying a coefficient predicate."""
        return SubspaceBasis(self.ambient, self.n, [g for g in self.generators if predicate(g)])


def span(tensors, ambient_sig=None, n=None) -> SubspaceBasis:
    tensors = list(tensors)
    if not tensors and (ambient_sig is None or n is None):
        raise LinAlgError("empty span needs an explicit ambient signature")
    sig = ambient_sig if ambient_sig is not None else tensors[0].sig
    nn = n if n is not None else tensors[0].n
    return SubspaceBasis(sig, nn, tensors)


class AffineSolutionSet:
    """particular + span(kernel) solving a fixed linear system exactly."""

    def __init__(self, particular: Tensor, kernel: SubspaceBasis):
        self.particular = particular
        self.kernel = kernel

    def element(self, coeffs=None) -> Tensor:
        out = self.particular.copy()
        if coeffs:
            for c, g in zip(coeffs, self.kernel.generators):
                out = out + g.scale(c)
        return out


def exact_solve(op, domain_basis, target: Tensor) -> AffineSolutionSet:
    """Solve op(x) = target for x in span(domain_basis).

    ``op`` maps domain tensors to tensors of the target's signature.
    Raises UnsolvableError with the exact residual after projection onto
    the image when no solution exists.
    """
    cols = [(i, op(b).c) for i, b in enumerate(domain_basis)]
    sol, kernel_combos, residual = solve_columns(cols, target.c)
    if sol is None:
        raise UnsolvableError(
            "linear system unsolvable; residual outside the image",
            residual=Tensor(target.sig, target.n, residual),
        )
    if domain_basis:
        dsig, dn = domain_basis[0].sig, domain_basis[0].n
    else:
        dsig, dn = target.sig, target.n
    part = Tensor(dsig, dn)
    for i, c in sol.items():
        part = part + domain_basis[i].scale(c)
    kers = []
    for combo in kernel_combos:
        t = Tensor(dsig, dn)
        for i, c in combo.items():
            t = t + domain_basis[i].scale(c)
        kers.append(t)
    return AffineSolutionSet(part, SubspaceBasis(dsig, dn, kers))


def project_components(x: Tensor, decomposition) -> list:
    """Unique exact decomposition of x against independent subspaces."""
    cols = []
    for bi, sub in enumerate(decomposition):
        if sub.ambient != x.sig or sub.n != x.n:
            raise LinAlgError("decomposition ambient does not match input")
        for gi, g in enumerate(sub.generators):
            cols.append(((bi, gi), g.c))
    sol, kernel, residual = solve_columns(cols, x.c)
    if kernel:
        raise LinAlgError("subspaces are not independent")
    if sol is None:
        raise UnsolvableError(
            "input outside the span of the decomposition",
            residual=Tensor(x.sig, x.n, residual),
        )
    parts = [Tensor(x.sig, x.n) for _ in decomposition]
    for (bi, gi), c in sol.items():
        parts[bi] = parts[bi] + decomposition[bi].generators[gi].scale(c)
    return parts


def preimage_basis(op, domain_basis, target_subspace: SubspaceBasis):
    """Basis of {x in span(domain) : op(x) in target_subspace}.

    Solves op(x) - sum lambda_j s_j = 0 jointly and returns the x-parts.
    """
    cols = []
    for i, b in enumerate(domain_basis):
        cols.append((("x", i), op(b).c))
    for j, s in enumerate(target_subspace.generators):
        cols.append((("s", j), {k: -v for k, v in s.c.items()}))
    _, kernel, _ = solve_columns(cols)
    if not domain_basis:
        return []
    dsig, dn = domain_basis[0].sig, domain_basis[0].n
    out = SubspaceBasis(dsig, dn, [])
    for combo in kernel:
        t = Tensor(dsig, dn)
        for (tag, i), c in combo.items():
            if tag == "x":
                t = t + domain_basis[i].scale(c)
        if not t.is_zero():
            out.add(t)
    return out.generators


def invariant_subspace(action_mats, subspace: SubspaceBasis, act) -> SubspaceBasis:
    """Joint kernel of the given Lie algebra actions inside a subspace.

    ``act(mat, tensor)`` realises the action; invariants are elements
    annihilated by every matrix.
    """
    gens = subspace.generators
    if not gens:
        return subspace
    cols = []
    images = {}
    for i, g in enumerate(gens):
        merged = {}
        for mi, m in enumerate(action_mats):
            img = act(m, g)
            for k, v in img.c.items():
                merged[(mi,) + (k if isinstance(k, tuple) else (k,))] = v
        cols.append((i, merged))
    _, kernel, _ = solve_columns(cols)
    out = SubspaceBasis(subspace.ambient, subspace.n, [])
    for combo in kernel:
        t = Tensor(subspace.ambient, subspace.n)
        for i, c in combo.items():
            t = t + gens[i].scale(c)
        if not t.is_zero():
            out.add(t)
    return out
