"""Exact Gaussian elimination over the rationals."""

from __future__ import annotations

from gmpy2 import mpq


def rref(rows, pivot_cols=None):
    """Reduce ``rows`` (list of lists of mpq, modified in place) to reduced row
    echelon form.

    Only the first ``pivot_cols`` columns are eligible as pivots; trailing
    columns (an augmented block) are carried along.  Returns the list of pivot
    column indices; row ``k`` of the result holds the pivot ``pivots[k]``.
    """
    if not rows:
        return []
    ncols = len(rows[0])
    if pivot_cols is None:
        pivot_cols = ncols
    pivots = []
    r = 0
    nrows = len(rows)
    for col in range(pivot_cols):
        if r == nrows:
            break
        p = None
        for i in range(r, nrows):
            if rows[i][col]:
                p = i
                break
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        inv = 1 / prow[col]
        if inv != 1:
            for j in range(col, ncols):
                if prow[j]:
                    prow[j] *= inv
        nz = [j for j in range(col, ncols) if prow[j]]
        for i in range(nrows):
            if i != r:
                row = rows[i]
                fac = row[col]
                if fac:
                    for j in nz:
                        row[j] -= fac * prow[j]
        pivots.append(col)
        r += 1
    return pivots


def rank(rows):
    return len(rref([list(r) for r in rows]))


def solve(matrix, rhs):
    """Solve ``matrix @ x = rhs`` exactly, free unknowns set to zero.

    Returns None when the system is inconsistent.
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    aug = [[mpq(v) for v in matrix[i]] + [mpq(rhs[i])] for i in range(nrows)]
    piv = rref(aug, ncols)
    for i in range(len(piv), nrows):
        if aug[i][ncols]:
            return None
    x = [mpq(0)] * ncols
    for k, col in enumerate(piv):
        x[col] = aug[k][ncols]
    return x
