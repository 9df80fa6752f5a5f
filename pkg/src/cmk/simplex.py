"""Dense revised primal simplex returning basic (vertex) optima.

Works over float64 or, when any input is a ``Fraction``, over exact rationals
stored in numpy object arrays.  Entering variables follow Dantzig's rule; during a
long run of degenerate pivots the solver switches to Bland's rule until the
objective moves again, which rules out cycling.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, InputError

FLOAT_TOL = 1e-9
REFACTOR_EVERY = 250
DEGENERATE_STREAK = 30


def _is_exact(*arrays) -> bool:
    for arr in arrays:
        if arr is None:
            continue
        for v in np.asarray(arr, dtype=object).ravel():
            if isinstance(v, Fraction):
                return True
    return False


def _as_array(data, exact, ndim):
    if data is None:
        return None
    if exact:
        arr = np.array(data, dtype=object)
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = Fraction(v)
        arr = out
    else:
        arr = np.array(data, dtype=float)
    if arr.ndim != ndim:
        if ndim == 2 and arr.size == 0:
            arr = arr.reshape(0, 0)
        else:
            raise InputError(f"expected a {ndim}-d array, got shape {arr.shape}")
    return arr


def exact_inverse(mat):
    """Gauss-Jordan inverse over Fractions; raises ValueError if singular."""
    n = mat.shape[0]
    aug = np.empty((n, 2 * n), dtype=object)
    aug[:, :n] = mat
    aug[:, n:] = Fraction(0)
    for i in range(n):
        aug[i, n + i] = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r, col] != 0), None)
        if piv is None:
            raise ValueError("singular basis")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        nzc = np.nonzero(aug[col])[0]
        aug[col, nzc] = aug[col, nzc] / aug[col, col]
        prow = aug[col, nzc]
        for r in np.nonzero(aug[:, col])[0]:
            if r != col:
                aug[r, nzc] = aug[r, nzc] - aug[r, col] * prow
    return aug[:, n:]


class Simplex:
    """Revised simplex on ``max c.x  s.t.  A x = b, x >= 0`` from a feasible basis.

    Columns can be appended between calls to :meth:`run`, which is how column
    generation drives it.
    """

    def __init__(self, A, b, c, basis: Sequence[int], exact: bool = False, tol: float = FLOAT_TOL):
        self.exact = exact
        self.tol = 0 if exact else tol
        self.rows = A.shape[0]
        self._A = A
        self.ncols = A.shape[1]
        self._c = c
        self.b = b
        self.blocked = np.zeros(self.ncols, dtype=bool)
        self.basis = list(basis)
        self.pivots = 0
        self._rows_nz = None
        self.refactor()

    @property
    def A(self):
        return self._A[:, :self.ncols]

    @property
    def c(self):
        return self._c[:self.ncols]

    def refactor(self):
        B = self.A[:, self.basis]
        if self.exact:
            self.Binv = exact_inverse(B)
        else:
            self.Binv = np.linalg.inv(B)
        self.xB = self.Binv @ self.b
        if not self.exact:
            self.xB[np.abs(self.xB) < 1e-12] = 0.0
        self._since_refactor = 0
        self._y = None

    def set_costs(self, c):
        self._c[:self.ncols] = c
        self._y = None

    def add_columns(self, cols, costs):
        """Append columns (shape rows x t) with objective coefficients ``costs``."""
        t = cols.shape[1]
        if t == 0:
            return
        need = self.ncols + t
        if need > self._A.shape[1]:
            cap = max(need, 2 * self._A.shape[1])
            A = np.zeros((self.rows, cap), dtype=self._A.dtype)
            c = np.zeros(cap, dtype=self._c.dtype)
            if self.exact:
                A[...] = Fraction(0)
                c[...] = Fraction(0)
            A[:, :self.ncols] = self.A
            c[:self.ncols] = self.c
            self._A, self._c = A, c
        self._A[:, self.ncols:need] = cols
        self._c[self.ncols:need] = costs
        self._rows_nz = None
        self.blocked = np.concatenate([self.blocked, np.zeros(t, dtype=bool)])
        self.ncols = need

    def duals(self):
        if self._y is None:
            cb = self.c[self.basis]
            nz = np.nonzero(cb)[0]
            self._y = cb[nz] @ self.Binv[nz] if nz.size else self.Binv[0] * 0
        return self._y

    def column_products(self, y):
        """``y @ A``; subclasses with sparse columns override this."""
        if not self.exact:
            return y @ self.A
        # object arithmetic is slow, so only nonzero entries are touched
        if self._rows_nz is None:
            A = self.A
            self._rows_nz = []
            for r in range(self.rows):
                cols = np.nonzero(A[r])[0]
                self._rows_nz.append((cols, A[r, cols]))
        out = np.empty(self.ncols, dtype=object)
        out[...] = Fraction(0)
        for r in np.nonzero(y)[0]:
            cols, vals = self._rows_nz[r]
            out[cols] += y[r] * vals
        return out

    def entering_column(self, q: int):
        """``B^-1 A_q`` using only the nonzero entries of column ``q``."""
        col = self.A[:, q]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            return self.Binv[:, 0] * 0
        return self.Binv[:, nz] @ col[nz]

    def objective(self):
        return self.c[self.basis] @ self.xB

    def primal(self):
        x = np.zeros(self.ncols, dtype=self._A.dtype)
        if self.exact:
            x[...] = Fraction(0)
        x[self.basis] = self.xB
        return x

    def reduced_costs(self):
        d = self.c - self.column_products(self.duals())
        d[self.basis] = 0
        d[self.blocked] = 0
        return d

    def pivot(self, r: int, q: int, u=None, dq=None):
        if u is None:
            u = self.entering_column(q)
        piv = u[r]
        row = self.Binv[r] / piv
        nz = np.nonzero(u)[0]  # entering columns are sparse; touch only affected rows
        if self.exact:
            rc = np.nonzero(row)[0]
            self.Binv[np.ix_(nz, rc)] -= np.outer(u[nz], row[rc])
        else:
            self.Binv[nz] -= np.outer(u[nz], row)
        self.Binv[r] = row
        xr = self.xB[r] / piv
        self.xB[nz] -= u[nz] * xr
        self.xB[r] = xr
        self.basis[r] = q
        self.pivots += 1
        if dq is not None and self._y is not None:
            self._y = self._y + dq * row
        else:
            self._y = None
        if not self.exact:
            self._since_refactor += 1
            if self._since_refactor >= REFACTOR_EVERY:
                self.refactor()
            else:
                self.xB[self.xB < 0] = 0.0

    def run(self, max_iter: int = 100000) -> str:
        """Pivot to optimality. Returns 'optimal' or 'unbounded'."""
        tol = self.tol
        bland = False
        streak = 0
        for _ in range(max_iter):
            d = self.reduced_costs()
            cand = np.nonzero(d > tol)[0]
            if cand.size == 0:
                return "optimal"
            if bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(d[cand].astype(float) if self.exact else d[cand])])
            u = self.entering_column(q)
            rows = np.nonzero(u > tol)[0]
            if rows.size == 0:
                return "unbounded"
            ratios = self.xB[rows] / u[rows]
            theta = min(ratios)
            if self.exact:
                ties = rows[ratios == theta]
            else:
                ties = rows[ratios <= theta + 1e-12]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, q, u, d[q])
            if theta <= tol:
                streak += 1
                if streak >= DEGENERATE_STREAK:
                    bland = True
            else:
                # Objective rose strictly, so no basis can repeat across this point.
                streak = 0
                bland = False
        raise ConvergenceError(f"simplex did not converge in {max_iter} pivots")


@dataclass
class DenseLp:
    """``max`` (or ``min``) ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``,
    ``0 <= x <= upper``.  ``upper`` entries of ``None`` mean unbounded."""

    c: Sequence
    A_ub: Optional[Sequence] = None
    b_ub: Optional[Sequence] = None
    A_eq: Optional[Sequence] = None
    b_eq: Optional[Sequence] = None
    upper: Optional[Sequence] = None
    maximize: bool = True


@dataclass
class VertexResult:
    status: str  # optimal | infeasible | unbounded
    x: Optional[np.ndarray] = None
    objective: object = None
    basis: Tuple[int, ...] = ()
    duals_ub: Optional[np.ndarray] = None
    duals_eq: Optional[np.ndarray] = None
    slack: Optional[np.ndarray] = field(default=None, repr=False)


class _StandardForm:
    def __init__(self, lp: DenseLp):
        exact = _is_exact(lp.c, lp.A_ub, lp.b_ub, lp.A_eq, lp.b_eq, lp.upper)
        zero = Fraction(0) if exact else 0.0
        one = Fraction(1) if exact else 1.0
        c = _as_array(lp.c, exact, 1)
        n = c.shape[0]

        def block(A, b):
            if A is None or len(A) == 0:
                return _as_array(np.zeros((0, n)), exact, 2), _as_array(np.zeros(0), exact, 1)
            A = _as_array(A, exact, 2)
            b = _as_array(b, exact, 1)
            if A.shape != (b.shape[0], n):
                raise InputError(f"constraint shape {A.shape} inconsistent with {n} variables")
            return A, b

        A_ub, b_ub = block(lp.A_ub, lp.b_ub)
        A_eq, b_eq = block(lp.A_eq, lp.b_eq)
        self.n_ub_given = A_ub.shape[0]
        if lp.upper is not None:
            if len(lp.upper) != n:
                raise InputError("upper bound vector has wrong length")
            rows, rhs = [], []
            for j, u in enumerate(lp.upper):
                if u is None:
                    continue
                r = [zero] * n
                r[j] = one
                rows.append(r)
                rhs.append(u)
            if rows:
                A_ub = np.vstack([A_ub, _as_array(rows, exact, 2)])
                b_ub = np.concatenate([b_ub, _as_array(rhs, exact, 1)])
        m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
        rows = m_ub + m_eq
        b = np.concatenate([b_ub, b_eq])
        sign = np.array([-1 if b[r] < 0 else 1 for r in range(rows)],
                        dtype=object if exact else float)
        needs_art = [r for r in range(rows) if r >= m_ub or sign[r] < 0]
        ncols = n + m_ub + len(needs_art)
        A = np.empty((rows, ncols), dtype=object if exact else float)
        A[...] = zero
        A[:m_ub, :n] = A_ub
        A[m_ub:, :n] = A_eq
        for r in range(m_ub):
            A[r, n + r] = one
        basis = [None] * rows
        for r in range(m_ub):
            basis[r] = n + r
        for t, r in enumerate(needs_art):
            A[r, n + m_ub + t] = one
            basis[r] = n + m_ub + t
        for r in range(rows):
            if sign[r] < 0:
                A[r, :n + m_ub] = -A[r, :n + m_ub]
                b[r] = -b[r]
        self.exact = exact
        self.n, self.m_ub, self.m_eq = n, m_ub, m_eq
        self.A, self.b = A, b
        self.sign = sign
        self.c_struct = c if lp.maximize else -c
        self.maximize = lp.maximize
        self.art = list(range(n + m_ub, ncols))
        self.start_basis = basis
        self.zero = zero

    def costs(self, phase):
        c = np.empty(self.A.shape[1], dtype=self.A.dtype)
        c[...] = self.zero
        if phase == 1:
            for j in self.art:
                c[j] = -1
        else:
            c[:self.n] = self.c_struct
        return c


def _finish(sf: _StandardForm, sx: Simplex) -> VertexResult:
    full = sx.primal()
    x = full[:sf.n]
    y = sx.duals() * sf.sign
    obj = sf.c_struct @ x
    if not sf.maximize:
        obj = -obj
        y = -y
    return VertexResult(
        status="optimal", x=x, objective=obj, basis=tuple(int(j) for j in sx.basis),
        duals_ub=y[:sf.n_ub_given], duals_eq=y[sf.m_ub:], slack=full[sf.n:sf.n + sf.m_ub])


def _warm(sf: _StandardForm, basis) -> Optional[Simplex]:
    basis = list(basis)
    if len(basis) != sf.A.shape[0] or len(set(basis)) != len(basis):
        return None
    if any(not 0 <= j < sf.A.shape[1] for j in basis):
        return None
    try:
        sx = Simplex(sf.A.copy(), sf.b, sf.costs(2), basis, exact=sf.exact)
    except (ValueError, np.linalg.LinAlgError):
        return None
    tol = 0 if sf.exact else 1e-9
    if any(v < -tol for v in sx.xB):
        return None
    for r, j in enumerate(sx.basis):
        if j in sf.art and sx.xB[r] > tol:
            return None
    return sx


def solve_vertex_lp(lp: DenseLp, basis: Optional[Sequence[int]] = None,
                    max_iter: int = 100000) -> VertexResult:
    """Optimal basic feasible solution of ``lp`` (two-phase simplex).

    ``basis`` may be a descriptor returned by a previous call on the same LP;
    when it is primal feasible, phase one is skipped.
    """
    sf = _StandardForm(lp)
    sx = _warm(sf, basis) if basis is not None else None
    if sx is None:
        sx = Simplex(sf.A.copy(), sf.b, sf.costs(1), sf.start_basis, exact=sf.exact)
        if sf.art:
            sx.run(max_iter)
            tol = 0 if sf.exact else 1e-7
            if sx.objective() < -tol:
                return VertexResult(status="infeasible")
            art = set(sf.art)
            for r in range(sf.A.shape[0]):
                if sx.basis[r] not in art:
                    continue
                row = sx.Binv[r] @ sx.A
                basic = set(sx.basis)
                for j in range(sf.n + sf.m_ub):
                    if j not in basic and abs(row[j]) > (0 if sf.exact else 1e-9):
                        sx.pivot(r, j)
                        break
        sx.set_costs(sf.costs(2))
    sx.blocked[sf.art] = True
    status = sx.run(max_iter)
    if status == "unbounded":
        return VertexResult(status="unbounded")
    return _finish(sf, sx)
