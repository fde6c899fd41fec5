'''
Argument validators shared across the package. Each returns the (possibly
coerced) value or raises ``ValueError``.
'''

import operator
from fractions import Fraction

RNG_ALGORITHMS = ('PCG64', 'PCG64DXSM', 'MT19937', 'Philox', 'SFC64')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

def integer(x, name):
    if isinstance(x, bool):
        raise ValueError('%s must be an integer (got %r)' % (name, x))
    try:
        return operator.index(x)
    except TypeError:
        raise ValueError('%s must be an integer (got %r)' % (name, x)) from None

def positive_int(x, name, minimum=1):
    x = integer(x, name)
    if x < minimum:
        raise ValueError('%s must be at least %d (got %d)' % (name, minimum, x))
    return x

def seed(x):
    x = integer(x, 'seed')
    if x < 0:
        raise ValueError('seed must be nonnegative (got %d)' % x)
    return x

def n(x, max_n=None):
    '''
    Number of participants.
    '''
    x = positive_int(x, 'n', minimum=2)
    if max_n is not None and x > max_n:
        raise ValueError('n=%d exceeds the configured maximum of %d '
                         '(set config.max_n to raise it)' % (x, max_n))
    return x

def ghz_index(i):
    i = integer(i, 'GHZ index')
    if not 0 <= i < 8:
        raise ValueError('GHZ index must be in 0..7 (got %d)' % i)
    return i

def basis_index(i):
    i = integer(i, 'entangled basis index')
    if not 0 <= i < 4:
        raise ValueError('entangled basis index must be in 0..3 (got %d)' % i)
    return i

def tol(x):
    x = float(x)
    if not 0 < x < 1:
        raise ValueError('tolerance must be in (0, 1) (got %s)' % x)
    return x

def rng_algorithm(name):
    if name not in RNG_ALGORITHMS:
        raise ValueError('invalid rng algorithm %r. options are %s'
                         % (name, str(RNG_ALGORITHMS)))
    return name

def log_level(level):
    if not isinstance(level, str) or level.upper() not in LOG_LEVELS:
        raise ValueError('invalid log level. options are %s' % str(LOG_LEVELS))
    return level.upper()

def a_squared(x):
    '''
    The squared coefficient :math:`a^2` of the entangled bases, strictly
    between 0 and 1. Accepts strings such as ``'1/2'`` or ``'0.75'``.
    '''
    try:
        x = Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValueError('a^2 must be a rational number (got %r)' % (x,)) from None
    if not 0 < x < 1:
        raise ValueError('a^2 must be strictly between 0 and 1 (got %s)' % x)
    return x
