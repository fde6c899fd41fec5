'''
Exact small-system state vectors: the entangled secret bases, the GHZ
measurement basis, and projective measurements with collapse.

Amplitudes are indexed by computational basis state, with the leftmost
qubit as the most significant bit (see :mod:`parallax.bitwise`).
'''

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from . import config, validate
from .bitwise import complement, to_bitstring, from_bitstring

# the bit pattern of each GHZ basis state; the sign is (-1)^i
GHZ_PATTERNS = (0b000, 0b000, 0b001, 0b001, 0b010, 0b010, 0b100, 0b100)

# the bit pattern of each entangled secret basis state; the sign is (-1)^i
BASIS_PATTERNS = (0b00, 0b00, 0b01, 0b01)


class StateVector:
    """
    An immutable vector of complex amplitudes over the computational basis
    of 2 or 3 qubits.

    Parameters
    ----------
    amps : array-like
        The amplitudes. Length must be 4 or 8.
    """

    def __init__(self, amps):
        amps = np.array(amps, dtype=np.complex128).reshape((-1,))

        if amps.size not in (4, 8):
            raise DimensionError('state vectors must have 4 or 8 amplitudes '
                                 '(got %d)' % amps.size)

        if not np.all(np.isfinite(amps)):
            raise ValueError('state amplitudes must be finite')

        amps.flags.writeable = False
        self._amps = amps

    @classmethod
    def from_bitstring(cls, bits):
        '''
        The computational basis state :math:`|x\\rangle` for a bitstring such
        as ``'101'``.
        '''
        if len(bits) not in (2, 3):
            raise DimensionError('only 2 and 3 qubit states are supported')
        amps = np.zeros(1 << len(bits), dtype=np.complex128)
        amps[from_bitstring(bits)] = 1
        return cls(amps)

    @property
    def num_qubits(self):
        return self._amps.size.bit_length() - 1

    @property
    def amps(self):
        '''
        The (read-only) amplitude array.
        '''
        return self._amps

    def to_numpy(self):
        '''
        Return a writeable copy of the amplitudes.
        '''
        return self._amps.copy()

    def norm(self):
        '''
        Compute the Euclidean norm of the state vector.
        '''
        return float(np.linalg.norm(self._amps))

    def is_normalized(self, tol=None):
        if tol is None:
            tol = config.tol
        return abs(float(np.vdot(self._amps, self._amps).real) - 1) <= tol

    def assert_normalized(self):
        '''
        Raise an exception if the squared norm differs from 1 by more than
        ``config.tol``.
        '''
        if not self.is_normalized():
            raise NormalizationError('state is not normalized (norm %.17g)'
                                     % self.norm())

    def probabilities(self):
        '''
        Born-rule probabilities of the computational basis outcomes.
        '''
        return np.abs(self._amps)**2

    def dot(self, x):
        '''
        Compute the inner product :math:`\\langle self | x \\rangle`.
        '''
        return inner_product(self, x)

    def to_pairs(self):
        '''
        The amplitudes as a list of ``[re, im]`` pairs, for serialization.
        '''
        return [[float(z.real), float(z.imag)] for z in self._amps]

    @classmethod
    def from_pairs(cls, pairs):
        return cls([complex(re, im) for re, im in pairs])

    def __eq__(self, x):
        if not isinstance(x, StateVector):
            return NotImplemented
        return np.array_equal(self._amps, x._amps)

    def __hash__(self):
        return hash(self._amps.tobytes())

    def __len__(self):
        return self._amps.size

    def __repr__(self):
        terms = []
        for idx in np.nonzero(self._amps)[0]:
            terms.append('(%s)|%s>' % (self._amps[idx],
                                       to_bitstring(int(idx), self.num_qubits)))
        return 'StateVector(%s)' % (' + '.join(terms) or '0')


@dataclass(frozen=True)
class SecretCoefficients:
    '''
    The real coefficients :math:`a, b` of the entangled secret bases, with
    :math:`a^2 + b^2 = 1` and both strictly positive.
    '''

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError('coefficients must be finite')
        if a <= 0 or b <= 0:
            raise ValueError('coefficients must both be strictly positive '
                             '(got a=%s, b=%s)' % (a, b))
        if abs(a*a + b*b - 1) > config.tol:
            raise ValueError('coefficients must satisfy a^2 + b^2 = 1 '
                             '(got %.17g)' % (a*a + b*b))
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)

    @classmethod
    def from_a_squared(cls, a_squared):
        '''
        Build the coefficients from :math:`a^2`, taking
        :math:`a = \\sqrt{a^2}` and :math:`b = \\sqrt{1-a^2}`.

        Parameters
        ----------
        a_squared : fractions.Fraction, float, or str
            A value strictly between 0 and 1.
        '''
        a_squared = validate.a_squared(a_squared)
        return cls(math.sqrt(a_squared), math.sqrt(1 - a_squared))

    @property
    def a_squared(self):
        return self.a*self.a


def ghz_pattern(i):
    '''
    The three-bit pattern of GHZ basis state ``i``.
    '''
    return GHZ_PATTERNS[validate.ghz_index(i)]

def sign_partner(i):
    '''
    The GHZ index with the same bit pattern as ``i`` and the opposite sign.
    '''
    return validate.ghz_index(i) ^ 1

@lru_cache(maxsize=None, typed=True)
def ghz_basis(i):
    r'''
    The GHZ basis state

    .. math::
        \frac{1}{\sqrt{2}} \left( |\varphi\psi\phi\rangle +
        (-1)^i |\bar\varphi\bar\psi\bar\phi\rangle \right)

    Parameters
    ----------
    i : int
        The index, in 0..7.

    Returns
    -------
    StateVector
        The basis state
    '''
    i = validate.ghz_index(i)
    pattern = GHZ_PATTERNS[i]
    amps = np.zeros(8, dtype=np.complex128)
    amps[pattern] = 1/math.sqrt(2)
    amps[complement(pattern, 3)] = (-1)**i / math.sqrt(2)
    return StateVector(amps)

def entangled_basis(i, coeffs):
    r'''
    The entangled secret basis state

    .. math::
        a|\varphi\psi\rangle + (-1)^i b |\bar\varphi\bar\psi\rangle

    Parameters
    ----------
    i : int
        The index, in 0..3.

    coeffs : SecretCoefficients
        The coefficients :math:`a, b`.

    Returns
    -------
    StateVector
        The basis state
    '''
    i = validate.basis_index(i)
    if not isinstance(coeffs, SecretCoefficients):
        raise ValueError('coeffs must be a SecretCoefficients instance')
    pattern = BASIS_PATTERNS[i]
    amps = np.zeros(4, dtype=np.complex128)
    amps[pattern] = coeffs.a
    amps[complement(pattern, 2)] = (-1)**i * coeffs.b
    return StateVector(amps)

def inner_product(u, v):
    '''
    Compute :math:`\\langle u | v \\rangle`, conjugate-linear in ``u``.

    Returns
    -------
    complex
        The value of the inner product
    '''
    if u.num_qubits != v.num_qubits:
        raise DimensionError('cannot take the inner product of a %d qubit and '
                             'a %d qubit state' % (u.num_qubits, v.num_qubits))
    return complex(np.vdot(u.amps, v.amps))

@lru_cache(maxsize=None)
def _ghz_matrix():
    # rows are the GHZ basis vectors
    rtn = np.array([ghz_basis(i).amps for i in range(8)])
    rtn.flags.writeable = False
    return rtn

def ghz_probabilities(state):
    '''
    Born-rule probabilities :math:`|\\langle GHZ_i|\\psi\\rangle|^2` for
    each of the 8 GHZ outcomes.
    '''
    if state.num_qubits != 3:
        raise DimensionError('GHZ measurements require a 3 qubit state')
    state.assert_normalized()
    return np.abs(_ghz_matrix().conj() @ state.amps)**2

def sample_index(probabilities, rng):
    '''
    Draw an outcome index by inverse-CDF sampling over the ordered outcome
    list, consuming exactly one uniform draw from ``rng``.
    '''
    probabilities = np.asarray(probabilities, dtype=float)
    cdf = np.cumsum(probabilities)
    u = rng.random()
    idx = int(np.searchsorted(cdf, u*cdf[-1], side='right'))

    # rounding can push u*cdf[-1] onto the final plateau of the cdf
    last_possible = int(np.nonzero(probabilities)[0][-1])
    return min(idx, last_possible)

def measure_in_ghz_basis(state, rng):
    '''
    Perform a projective measurement in the GHZ basis.

    Parameters
    ----------
    state : StateVector
        A normalized 3 qubit state.

    rng : numpy.random.Generator
        The random stream.

    Returns
    -------
    tuple(int, StateVector)
        The outcome index and the collapsed state :meth:`ghz_basis` (outcome).
    '''
    outcome = sample_index(ghz_probabilities(state), rng)
    return outcome, ghz_basis(outcome)

def measure_computational(state, rng):
    '''
    Measure every qubit in the computational basis.

    Returns
    -------
    tuple(str, StateVector)
        The measured bitstring and the collapsed product state.
    '''
    state.assert_normalized()
    idx = sample_index(state.probabilities(), rng)
    bits = to_bitstring(idx, state.num_qubits)
    return bits, StateVector.from_bitstring(bits)


class NormalizationError(ValueError):
    pass

class DimensionError(ValueError):
    pass
