"""Left-invariant coframe models: parsing, validation, exterior derivative.

A model stores the structure table de^i = sum c e^{jk}.  Homogeneous
models (sphere, hyperbolic) additionally carry the curvature of their
canonical connection as a constant gl(T)-valued 2-form: for those the
coframe table alone is not a Lie algebra (d^2 != 0), and the correct
well-formedness check is the first structure consistency

    d(de^i) = (Omega_base wedge theta)^i,      d(Omega_base) = 0,

which reduces to the Jacobi identity when the base curvature is absent.
The JSON schema is unchanged for plain Lie-group models; homogeneous
inputs use the optional "base_curvature" key.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .tensor import Tensor, alternate_matrix, form_sig

TORSION_SIG = (("d", "T", 2), ("u", "T", 1))
CURVATURE_SIG = (("d", "T", 2), ("d", "T", 1), ("u", "T", 1))

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class ModelError(ValueError):
    """Parse or validation failure, with a location when available."""

    def __init__(self, message, location=None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location


@dataclass
class CoframeModel:
    """Structure constants of a left-invariant coframe on R^(4n+3)."""

    name: str
    n: int
    d_table: dict  # i -> list of (Fraction, (j, k)) with j < k
    base_curvature: Tensor = None  # optional constant curvature offset

    @property
    def dim(self) -> int:
        return 4 * self.n + 3

    def d_form(self, i: int) -> Tensor:
        """de^i as an exact 2-form."""
        t = Tensor(form_sig(2), self.n)
        for c, (j, k) in self.d_table.get(i, ()):
            t.add_term(((j, k),), c)
        return t

    def de_tensor(self) -> Tensor:
        """sum_i de^i (x) e_i, the torsion of the reference connection."""
        t = Tensor(TORSION_SIG, self.n)
        for i in range(1, self.dim + 1):
            for c, (j, k) in self.d_table.get(i, ()):
                t.add_term(((j, k), (i,)), c)
        return t

    def base_curvature_tensor(self) -> Tensor:
        if self.base_curvature is not None:
            return self.base_curvature
        return Tensor(CURVATURE_SIG, self.n)


def parse_rational(text, location=None) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text.strip()):
        raise ModelError(f"malformed rational {text!r}", location)
    num, _, den = text.strip().partition("/")
    if den:
        if int(den) == 0:
            raise ModelError(f"malformed rational {text!r} (zero denominator)", location)
        return Fraction(int(num), int(den))
    return Fraction(int(num))


def parse_model(document) -> CoframeModel:
    """Parse a model from a JSON string, dict, or file-like object."""
    if hasattr(document, "read"):
        document = document.read()
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelError(f"not valid JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ModelError("top-level value must be an object")
    name = doc.get("name")
    if not isinstance(name, str):
        raise ModelError("missing or non-string 'name'")
    n = doc.get("n")
    if not isinstance(n, int) or n < 1:
        raise ModelError("'n' must be an integer >= 1")
    dim = 4 * n + 3
    d_table = {}
    for row_key, entries in (doc.get("d") or {}).items():
        loc = f"d[{row_key!r}]"
        try:
            i = int(row_key)
        except (TypeError, ValueError):
            raise ModelError("row key must be an integer string", loc)
        if not 1 <= i <= dim:
            raise ModelError(f"row index {i} out of range 1..{dim}", loc)
        seen = set()
        row = []
        for t, entry in enumerate(entries):
            eloc = f"{loc}[{t}]"
            if not isinstance(entry, dict) or "c" not in entry or "jk" not in entry:
                raise ModelError("entry must be an object with 'c' and 'jk'", eloc)
            c = parse_rational(entry["c"], eloc)
            jk = entry["jk"]
            if not (isinstance(jk, list) and len(jk) == 2 and all(isinstance(x, int) for x in jk)):
                raise ModelError("'jk' must be a pair of integers", eloc)
            j, k = jk
            if not (1 <= j < k <= dim):
                raise ModelError(f"indices {jk} must satisfy 1 <= j < k <= {dim}", eloc)
            if (j, k) in seen:
                raise ModelError(f"duplicate pair {jk}", eloc)
            seen.add((j, k))
            if c:
                row.append((c, (j, k)))
        if row:
            d_table[i] = sorted(row, key=lambda e: e[1])
    base = None
    if "base_curvature" in doc:
        base = Tensor(CURVATURE_SIG, n)
        for t, entry in enumerate(doc["base_curvature"]):
            eloc = f"base_curvature[{t}]"
            c = parse_rational(entry.get("c"), eloc)
            jk, ab = entry.get("jk"), entry.get("ab")
            for pair in (jk, ab):
                if not (isinstance(pair, list) and len(pair) == 2):
                    raise ModelError("'jk' and 'ab' must be index pairs", eloc)
            base.add_term((tuple(jk), (ab[0],), (ab[1],)), c)
    return CoframeModel(name, n, d_table, base)


def serialize_model(model: CoframeModel) -> str:
    doc = {"name": model.name, "n": model.n, "d": {}}
    for i in sorted(model.d_table):
        row = [
            {"c": str(c), "jk": [j, k]}
            for c, (j, k) in sorted(model.d_table[i], key=lambda e: e[1])
        ]
        if row:
            doc["d"][str(i)] = row
    if model.base_curvature is not None and not model.base_curvature.is_zero():
        items = []
        for key in sorted(model.base_curvature.c):
            (jk, (a,), (b,)) = key
            items.append({"c": str(model.base_curvature.c[key]), "jk": list(jk), "ab": [a, b]})
        doc["base_curvature"] = items
    return json.dumps(doc, indent=2, sort_keys=True)


def d(form: Tensor, model: CoframeModel) -> Tensor:
    """Left-invariant exterior derivative extended by the Leibniz rule.

    Acts on the leading form group only; value slots ride along.
    """
    k = form.form_degree()
    if k == 0:
        # constant coefficients: d of a degree-0 tensorial quantity vanishes
        return Tensor(form_sig(1, *form.sig), model.n)
    out = Tensor(form_sig(k + 1, *form.sig[1:]), model.n)
    for key, v in form.c.items():
        idxs = key[0]
        for pos, i in enumerate(idxs):
            sgn = -1 if pos % 2 else 1
            for c, (j, l) in model.d_table.get(i, ()):
                newform = idxs[:pos] + (j, l) + idxs[pos + 1:]
                out.add_term((newform,) + key[1:], sgn * c * v)
    return out


def curvature_wedge_theta(model: CoframeModel) -> Tensor:
    """(Omega_base wedge theta) as a Lambda^3 T* (x) T tensor."""
    return alternate_matrix(model.base_curvature_tensor())


def validate_jacobi(model: CoframeModel):
    """ok (empty list) or a list of (i, residual 3-form).

    For plain models this is d(de^i) = 0; with a base curvature it is the
    generalised first structure consistency, plus closedness of the base
    curvature itself (reported under i = 0).
    """
    failures = []
    anomaly = curvature_wedge_theta(model)
    by_row = {}
    for key, v in anomaly.c.items():
        by_row.setdefault(key[1][0], []).append((key[0], v))
    for i in range(1, model.dim + 1):
        res = d(model.d_form(i), model)
        for formkey, v in by_row.get(i, ()):
            res.add_term((formkey,), -v)
        if not res.is_zero():
            failures.append((i, res))
    if model.base_curvature is not None:
        dbase = d(model.base_curvature, model)
        if not dbase.is_zero():
            failures.append((0, dbase))
    return failures


def transform_model(model: CoframeModel, S) -> CoframeModel:
    """Exact coframe change e'^i = sum_j S[i][j] e^j (S an invertible matrix).

    Returns the model expressed in the primed coframe; the base curvature,
    if any, is rewritten covariantly.
    """
    from .linalg import solve_columns

    dim = model.dim
    # invert S exactly: columns of S^-1 solve S x = delta
    cols = [(j, {(i,): S[i - 1][j - 1] for i in range(1, dim + 1) if S[i - 1][j - 1]}) for j in range(1, dim + 1)]
    Sinv = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(1, dim + 1):
        sol, _, res = solve_columns(cols, {(i,): Fraction(1)})
        if sol is None:
            raise ModelError("coframe change is singular")
        for j, c in sol.items():
            Sinv[j - 1][i - 1] = c  # e^i = sum_j Sinv[j][i] ... see below

    def old_form_in_new(i):
        # e^i = sum_j (S^-1)_{ji}-style rewrite: e^i = sum_j inv[i][j] e'^j
        return [(Sinv[i - 1][j - 1], j) for j in range(1, dim + 1) if Sinv[i - 1][j - 1]]

    # e'^i = S e: de'^i = sum_j S_ij de^j, then rewrite all e^a in primed terms
    new_table = {}
    for i in range(1, dim + 1):
        acc = Tensor(form_sig(2), model.n)
        for j in range(1, dim + 1):
            s = S[i - 1][j - 1]
            if not s:
                continue
            for c, (a, b) in model.d_table.get(j, ()):
                for ca, pa in old_form_in_new(a):
                    for cb, pb in old_form_in_new(b):
                        if pa != pb:
                            acc.add_term(((pa, pb),), s * c * ca * cb)
        row = [(v, key[0]) for key, v in sorted(acc.c.items())]
        if row:
            new_table[i] = [(c, jk) for c, jk in row]
    base = None
    if model.base_curvature is not None:
        base = Tensor(CURVATURE_SIG, model.n)
        for (jk, (r,), (c,)), v in model.base_curvature.c.items():
            j, k = jk
            for cj, pj in old_form_in_new(j):
                for ck, pk in old_form_in_new(k):
                    if pj == pk:
                        continue
                    # e^r = sum_p (S^-1)_{rp} e'^p and e_c = sum_q S_{qc} e'_q
                    for p in range(1, dim + 1):
                        a = Sinv[r - 1][p - 1]
                        if not a:
                            continue
                        for q in range(1, dim + 1):
                            b = S[q - 1][c - 1]
                            if not b:
                                continue
                            base.add_term(((pj, pk), (p,), (q,)), v * cj * ck * a * b)
    return CoframeModel(model.name, model.n, new_table, base)
