'''
Von Neumann entropy of density operators, in bits.
'''

import numpy as np
from scipy.special import entr

from .states import StateVector

def von_neumann_entropy(diagonal):
    r'''
    Compute :math:`-\sum_x \lambda_x \log_2 \lambda_x` over the eigenvalues
    of a diagonal density operator, with :math:`0 \log 0 = 0`.

    The entries do not need to sum to 1; sub-normalized operators are
    evaluated as given. See :meth:`normalized_entropy` for the unit-trace
    variant.

    Parameters
    ----------
    diagonal : array-like
        The nonnegative diagonal entries (eigenvalues).

    Returns
    -------
    float
        The entropy in bits
    '''
    w = np.asarray(diagonal, dtype=float).reshape((-1,))
    if np.any(w < 0):
        raise ValueError('density operator eigenvalues must be nonnegative')
    if not np.all(np.isfinite(w)):
        raise ValueError('density operator eigenvalues must be finite')
    return float(np.sum(entr(w)) / np.log(2))

def normalized_entropy(diagonal):
    '''
    Like :meth:`von_neumann_entropy`, but first rescales the entries to
    unit trace.
    '''
    w = np.asarray(diagonal, dtype=float).reshape((-1,))
    trace = np.sum(w)
    if trace <= 0:
        raise ValueError('cannot normalize a density operator with zero trace')
    return von_neumann_entropy(w / trace)

def density_matrix(weights, states):
    r'''
    Build the density operator :math:`\rho = \sum_i p_i |\phi_i\rangle\langle\phi_i|`.

    Parameters
    ----------
    weights : list of float
        The probabilities :math:`p_i`. They are not required to sum to 1.

    states : list of StateVector
        The states :math:`|\phi_i\rangle`, all of the same size.

    Returns
    -------
    numpy.ndarray[np.complex128]
        The density matrix
    '''
    if len(weights) != len(states):
        raise ValueError('need one weight per state')
    if not states:
        raise ValueError('need at least one state')

    dim = len(states[0])
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for p, phi in zip(weights, states):
        if not isinstance(phi, StateVector) or len(phi) != dim:
            raise ValueError('states must be StateVectors of equal size')
        if p < 0:
            raise ValueError('weights must be nonnegative')
        rho += p * np.outer(phi.amps, phi.amps.conj())
    return rho

def dm_entropy(dm):
    '''
    Compute the Von Neumann entropy of a Hermitian density matrix, in bits.

    Parameters
    ----------
    dm : np.array
        A density matrix

    Returns
    -------
    float
        The Von Neumann entropy
    '''
    w = np.linalg.eigvalsh(dm)
    # eigvalsh can return tiny negative values for singular matrices
    scale = np.max(np.abs(w)) if w.size else 0
    w[np.abs(w) < 1E-12*scale] = 0
    return von_neumann_entropy(w)

def density_diagonal(weights, states):
    '''
    The real diagonal of :meth:`density_matrix` (weights, states). For the
    entangled secret bases the density operator is diagonal, so this is its
    full spectrum.

    Returns
    -------
    numpy.ndarray[np.float64]
        The diagonal entries
    '''
    return np.real(np.diag(density_matrix(weights, states))).copy()
