"""Search for the rate-maximising integer coefficient vector.

The optimum minimises ``f(a) = a^T G a`` over nonzero integer ``a`` with
``G = (1 + P||h||^2) I - P h h^T``. Two independent exact solvers are provided:

* :func:`exhaustive_search` enumerates every integer point inside the
  ellipsoid ``f(a) <= f_best`` (Schnorr-Euchner ordering over the Cholesky
  factor of ``G``, radius shrinking as better vectors are found), starting from
  the best unit vector. Nothing outside that ellipsoid can beat the incumbent,
  so the result is the global minimiser.
* :func:`candidate_search` evaluates ``round(alpha * h)`` on every interval of
  ``alpha`` delimited by the points where some ``|alpha * h_i|`` crosses a
  half-integer. For fixed ``alpha`` the componentwise rounding minimises
  ``alpha^2 + P||alpha h - a||^2``, so the optimum is among these vectors.

Ties are broken by ``(f ascending, ||a||^2 ascending, |entries| lexicographically
largest, then signed entries lexicographically largest)`` on sign-canonical
vectors, so ``e_1`` wins over ``e_2`` and negating ``h`` negates the winner.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import BudgetExceededError, DegenerateChannelError, as_channel, as_coefficients, as_power
from .rate import _f_scalar, rate_from_f

__all__ = [
    "DEFAULT_BUDGET",
    "AUTO_BUDGET",
    "SOLVERS",
    "SearchResult",
    "best_unit_vector",
    "candidate_search",
    "canonicalize",
    "exhaustive_search",
    "find_optimal",
    "is_unit_vector",
]

DEFAULT_BUDGET = 10**8
# exhaustive nodes tried by the "auto" policy before switching to candidate_search
AUTO_BUDGET = 20_000
SOLVERS = ("exhaustive", "candidate", "auto")

# relative slack under which two f values count as tied
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SearchResult:
    a_opt: np.ndarray
    f_value: float
    rate: float
    candidates_examined: int
    solver: str

    @property
    def is_unit(self) -> bool:
        return is_unit_vector(self.a_opt)

    def as_dict(self):
        return {
            "a_opt": [int(x) for x in self.a_opt],
            "f_value": self.f_value,
            "rate": self.rate,
            "candidates_examined": self.candidates_examined,
            "solver": self.solver,
            "is_unit": self.is_unit,
        }


def is_unit_vector(a) -> bool:
    """True iff exactly one entry is +-1 and the rest are 0."""
    a = np.asarray(a)
    nz = np.flatnonzero(a)
    return nz.size == 1 and abs(int(a[nz[0]])) == 1


def canonicalize(a, h=None) -> np.ndarray:
    """Sign-normalise ``a``: ``h.a > 0``, or first nonzero entry positive if ``h.a == 0``."""
    a = np.asarray(a, dtype=np.int64)
    if h is not None:
        ha = float(np.asarray(h, dtype=np.float64) @ a)
        if ha > 0:
            return a.copy()
        if ha < 0:
            return -a
    nz = np.flatnonzero(a)
    if nz.size and a[nz[0]] < 0:
        return -a
    return a.copy()


def _checked_channel(h) -> np.ndarray:
    h = as_channel(h)
    if not np.any(h):
        raise DegenerateChannelError("channel vector is all-zero")
    return h


def _tie_key(f, a):
    return (float(a @ a), tuple(-abs(int(x)) for x in a), tuple(-int(x) for x in a))


def _pick(fs, vectors):
    """Index of the winner among candidate vectors under the global tie-break."""
    fmin = min(fs)
    tol = fmin * _TIE_RTOL
    best = None
    for i, (f, a) in enumerate(zip(fs, vectors)):
        if f > fmin + tol:
            continue
        key = _tie_key(f, a)
        if best is None or key < best[0]:
            best = (key, i)
    return best[1]


def _result(h, P, a, examined, solver) -> SearchResult:
    a = canonicalize(a, h)
    f = _f_scalar(h, a, P)
    return SearchResult(a, f, rate_from_f(f, h, P), int(examined), solver)


def best_unit_vector(h, P) -> SearchResult:
    """The unit vector on the strongest channel entry (smallest index on ties)."""
    h = _checked_channel(h)
    P = as_power(P)
    i = int(np.argmax(np.abs(h)))
    a = np.zeros(h.size, dtype=np.int64)
    a[i] = 1
    return _result(h, P, a, h.size, "unit")


def exhaustive_search(h, P, budget: int = DEFAULT_BUDGET) -> SearchResult:
    """Exact minimiser of ``f`` by pruned enumeration of the integer lattice.

    ``budget`` caps the number of enumeration-tree nodes; exceeding it raises
    :class:`BudgetExceededError`. ``candidates_examined`` reports the number of
    complete vectors whose ``f`` was evaluated.
    """
    h = _checked_channel(h)
    P = as_power(P)
    L = h.size
    start = best_unit_vector(h, P)
    if L == 1:
        return SearchResult(start.a_opt, start.f_value, start.rate, 1, "exhaustive")

    G = (1.0 + P * float(h @ h)) * np.eye(L) - P * np.outer(h, h)
    U = np.linalg.cholesky(G).T
    diag = np.diag(U)
    d = (diag * diag).tolist()
    mu = (U / diag[:, None]).tolist()
    hl = h.tolist()
    hh = float(h @ h)

    a = [0] * L
    best_f = start.f_value
    ties = [(best_f, start.a_opt.copy())]
    examined = 0
    nodes = 0

    def bound():
        return best_f * (1.0 + 1e-9) + 1e-12

    def leaf():
        nonlocal best_f, ties, examined
        examined += 1
        nn = 0
        ha = 0.0
        for x, hx in zip(a, hl):
            if x:
                nn += x * x
                ha += hx * x
        f = nn + P * (nn * hh - ha * ha)
        if f < best_f * (1.0 - _TIE_RTOL):
            best_f = f
            ties = [(f, np.array(a, dtype=np.int64))]
        elif f <= best_f * (1.0 + _TIE_RTOL):
            ties.append((f, np.array(a, dtype=np.int64)))

    def descend(i, partial, zero_above):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceededError(
                f"exhaustive search exceeded its budget of {budget} nodes", visited=nodes, budget=budget
            )
        row = mu[i]
        c = 0.0
        for j in range(i + 1, L):
            if a[j]:
                c -= row[j] * a[j]
        di = d[i]
        if zero_above:
            # sign symmetry: the first nonzero coordinate (from the top) is positive
            x = 0
            while True:
                y = x - c
                cost = partial + di * y * y
                if cost > bound():
                    break
                a[i] = x
                if i == 0:
                    if x != 0:
                        leaf()
                else:
                    descend(i - 1, cost, x == 0)
                x += 1
            a[i] = 0
            return
        # Schnorr-Euchner order: two sides moving away from the centre,
        # always expanding the nearer one; each side stops once out of range
        up = math.ceil(c)
        down = up - 1
        up_alive = down_alive = True
        while up_alive or down_alive:
            if up_alive and (not down_alive or up - c <= c - down):
                x = up
                up += 1
                is_up = True
            else:
                x = down
                down -= 1
                is_up = False
            y = x - c
            cost = partial + di * y * y
            if cost > bound():
                if is_up:
                    up_alive = False
                else:
                    down_alive = False
                continue
            a[i] = x
            if i == 0:
                leaf()
            else:
                descend(i - 1, cost, False)
        a[i] = 0

    descend(L - 1, 0.0, True)
    idx = _pick([t[0] for t in ties], [canonicalize(t[1], h) for t in ties])
    return _result(h, P, ties[idx][1], examined, "exhaustive")


def _candidate_matrix(h, P):
    absh = np.abs(h)
    sgn = np.sign(h).astype(np.int64)
    hmax = float(absh.max())
    r = math.sqrt(1.0 + P * float(h @ h))
    alpha_max = (r + 1.0) / hmax
    bps, coords = [], []
    for i, v in enumerate(map(float, absh)):
        if v == 0.0:
            continue
        kmax = int(math.floor(alpha_max * v - 0.5))
        if kmax >= 0:
            bps.append((np.arange(kmax + 1) + 0.5) / v)
            coords.append(np.full(kmax + 1, i))
    bps = np.concatenate(bps)
    coords = np.concatenate(coords)
    order = np.lexsort((coords, bps))
    bps, coords = bps[order], coords[order]
    # Walk the breakpoints in order rather than rounding at interval
    # midpoints: breakpoints a few ulps apart have midpoints that round wrongly.
    # Correctly rounded division keeps the order monotone in |h_i|.
    starts = np.flatnonzero(np.r_[True, bps[1:] != bps[:-1]])
    state = np.zeros(h.size, dtype=np.int64)
    A = np.empty((starts.size, h.size), dtype=np.int64)
    for row, (lo, hi) in enumerate(zip(starts, np.r_[starts[1:], bps.size])):
        state[coords[lo:hi]] += 1
        A[row] = state
    return _fill_simultaneous_jumps(A * sgn, absh), r


def _fill_simultaneous_jumps(A, absh):
    # When several coordinates cross a breakpoint together, rounding at that
    # exact scaling may go either way for each one, so the intermediate
    # vectors are candidates too. Coordinates with equal |h_i| are
    # interchangeable in f, so filling them in index order is enough.
    rows = []
    prev = np.zeros(A.shape[1], dtype=np.int64)
    for row in A:
        jumped = np.flatnonzero(row != prev)
        if jumped.size > 1:
            groups = {}
            for i in jumped:
                groups.setdefault(float(absh[i]), []).append(int(i))
            members = list(groups.values())
            for counts in itertools.product(*(range(len(g) + 1) for g in members)):
                if all(c == 0 for c in counts) or all(c == len(g) for c, g in zip(counts, members)):
                    continue
                mid = prev.copy()
                for c, g in zip(counts, members):
                    mid[g[:c]] = row[g[:c]]
                rows.append(mid)
        rows.append(row)
        prev = row
    return np.array(rows, dtype=np.int64)


def candidate_search(h, P) -> SearchResult:
    """Exact minimiser of ``f`` over the rounded-scaling candidate family."""
    h = _checked_channel(h)
    P = as_power(P)
    A, r = _candidate_matrix(h, P)
    examined = A.shape[0]
    nn = np.einsum("ij,ij->i", A, A).astype(np.float64)
    keep = nn < r * r
    A, nn = A[keep], nn[keep]
    if A.shape[0] == 0:
        res = best_unit_vector(h, P)
        return SearchResult(res.a_opt, res.f_value, res.rate, examined, "candidate")
    ha = A @ h
    f = nn + P * (nn * float(h @ h) - ha * ha)
    fmin = float(f.min())
    tied = np.flatnonzero(f <= fmin + fmin * _TIE_RTOL)
    idx = tied[_pick(f[tied].tolist(), [A[i] for i in tied])]
    return _result(h, P, A[idx], examined, "candidate")


def find_optimal(h, P, solver: str = "auto", budget: int = DEFAULT_BUDGET, auto_budget: int = AUTO_BUDGET):
    """Dispatch on ``solver``; ``"auto"`` tries a capped exhaustive run first."""
    if solver == "exhaustive":
        return exhaustive_search(h, P, budget=budget)
    if solver == "candidate":
        return candidate_search(h, P)
    if solver == "auto":
        try:
            return exhaustive_search(h, P, budget=min(budget, auto_budget))
        except BudgetExceededError:
            return candidate_search(h, P)
    raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")


def coefficient_vector(a) -> np.ndarray:
    """Standalone canonical coefficient vector (first nonzero entry positive)."""
    return canonicalize(as_coefficients(a))
