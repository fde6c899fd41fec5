'''
Exact line geometry on integer coefficients: the parallel/intersecting
relation, the judging matrix built from a set of lines, its rank over the
rationals, and the secret decoding rule.

No floating point is used anywhere in this module.
'''

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import math

import numpy as np

from . import validate


class LineRelation(Enum):
    PARALLEL = 'parallel'
    INTERSECTING = 'intersecting'


class DecodeVerdict(Enum):
    M0 = 'M0'
    M1 = 'M1'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True, order=True)
class Line:
    '''
    The line :math:`ax + by + c = 0`.

    Coefficients are stored in canonical form: divided by
    :math:`\\gcd(|a|,|b|,|c|)`, with the leading nonzero coefficient
    positive. Two Line objects are equal exactly when they describe the
    same line.
    '''

    a: int
    b: int
    c: int

    def __post_init__(self):
        a = validate.integer(self.a, 'a')
        b = validate.integer(self.b, 'b')
        c = validate.integer(self.c, 'c')

        if a == 0 and b == 0:
            raise ValueError('a and b must not both be zero')

        g = math.gcd(a, b, c)
        sign = 1 if (a > 0 or (a == 0 and b > 0)) else -1
        object.__setattr__(self, 'a', sign*a//g)
        object.__setattr__(self, 'b', sign*b//g)
        object.__setattr__(self, 'c', sign*c//g)

    @property
    def direction(self):
        '''
        The canonical direction class ``(a, b)``; lines are parallel exactly
        when their directions are equal.
        '''
        return canonical_direction(self.a, self.b)

    @classmethod
    def from_coefficients(cls, a, b, c):
        return cls(a, b, c)

    def to_tuple(self):
        return (self.a, self.b, self.c)


def canonical_direction(a, b):
    '''
    Reduce the normal vector (a, b) to lowest terms with its leading nonzero
    component positive.
    '''
    if a == 0 and b == 0:
        raise ValueError('a and b must not both be zero')
    g = math.gcd(a, b)
    sign = 1 if (a > 0 or (a == 0 and b > 0)) else -1
    return (sign*a//g, sign*b//g)

def relation(l1, l2):
    '''
    Whether two lines are parallel or intersecting. Coincident lines count
    as parallel.

    Uses the cross product :math:`a_1 b_2 - a_2 b_1`, which is zero exactly
    when :math:`a_1/a_2 = b_1/b_2` and stays well-defined when a
    denominator vanishes.

    Returns
    -------
    LineRelation
        The relation
    '''
    if l1.a*l2.b - l2.a*l1.b == 0:
        return LineRelation.PARALLEL
    return LineRelation.INTERSECTING

def coincident(l1, l2):
    '''
    Whether two lines are the same line.
    '''
    return l1 == l2

def intersection(l1, l2):
    '''
    The exact intersection point of two lines.

    Returns
    -------
    tuple(Fraction, Fraction) or None
        The point ``(x, y)``, or None if the lines are parallel
    '''
    det = l1.a*l2.b - l2.a*l1.b
    if det == 0:
        return None
    x = Fraction(l1.b*l2.c - l2.b*l1.c, det)
    y = Fraction(l1.c*l2.a - l2.c*l1.a, det)
    return (x, y)


class JudgingMatrix:
    '''
    Symmetric 0/1 matrix with zero diagonal. Entry (i, j) is 0 if lines i
    and j are parallel and 1 if they intersect.

    Parameters
    ----------
    rows : array-like
        The n x n entries, n >= 2.
    '''

    def __init__(self, rows):
        entries = np.array(rows, dtype=np.int8)

        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError('judging matrix must be square')
        if entries.shape[0] < 2:
            raise ValueError('judging matrix must be at least 2x2')
        if not np.all((entries == 0) | (entries == 1)):
            raise ValueError('judging matrix entries must be 0 or 1')
        if np.any(np.diag(entries) != 0):
            raise ValueError('judging matrix diagonal must be zero')
        if not np.array_equal(entries, entries.T):
            raise ValueError('judging matrix must be symmetric')

        entries.flags.writeable = False
        self._entries = entries

    @classmethod
    def from_rows(cls, rows):
        '''
        Build a matrix from nested lists, validating shape, entries, symmetry
        and the zero diagonal.
        '''
        return cls(rows)

    @property
    def n(self):
        return self._entries.shape[0]

    @property
    def entries(self):
        return self._entries

    def to_list(self):
        return self._entries.tolist()

    def __eq__(self, x):
        if not isinstance(x, JudgingMatrix):
            return NotImplemented
        return np.array_equal(self._entries, x._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __repr__(self):
        return 'JudgingMatrix(%s)' % self.to_list()


def judging_matrix(lines):
    '''
    Build the judging matrix for a list of lines.

    Parameters
    ----------
    lines : list of Line
        At least two lines.

    Returns
    -------
    JudgingMatrix
        The matrix
    '''
    lines = list(lines)
    n = len(lines)
    if n < 2:
        raise ValueError('need at least two lines to build a judging matrix')

    rows = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        for j in range(i+1, n):
            if relation(lines[i], lines[j]) is LineRelation.INTERSECTING:
                rows[i, j] = rows[j, i] = 1
    return JudgingMatrix(rows)

def integer_rank(rows):
    '''
    Exact rank over the rationals of an integer matrix, by fraction-free
    (Bareiss) elimination. Every intermediate value is an integer minor of
    the input, so all divisions are exact.

    Parameters
    ----------
    rows : array-like
        A 2D integer matrix (need not be square).

    Returns
    -------
    int
        The rank
    '''
    m = [[validate.integer(x, 'matrix entry') for x in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0

    rank = 0
    prev_pivot = 1
    for col in range(ncols):
        if rank == nrows:
            break

        # first find a nonzero entry in this col
        for r in range(rank, nrows):
            if m[r][col] != 0:
                break
        else:
            continue

        m[rank], m[r] = m[r], m[rank]
        pivot = m[rank][col]

        for r in range(rank+1, nrows):
            factor = m[r][col]
            for c in range(col+1, ncols):
                m[r][c] = (pivot*m[r][c] - factor*m[rank][c]) // prev_pivot
            m[r][col] = 0

        prev_pivot = pivot
        rank += 1

    return rank

def rank(m):
    '''
    The exact rank of a judging matrix over the rationals.
    '''
    return integer_rank(m.to_list())

def decode(m):
    '''
    Decode the secret from a judging matrix: rank 0 means every pair of lines
    is parallel (M0), rank n means the matrix is nonsingular (M1), and any
    other rank carries no information.

    Returns
    -------
    DecodeVerdict
        The verdict
    '''
    r = rank(m)
    if r == 0:
        return DecodeVerdict.M0
    if r == m.n:
        return DecodeVerdict.M1
    return DecodeVerdict.INCONCLUSIVE
