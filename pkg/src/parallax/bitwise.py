'''
Bit-pattern helpers for computational basis states.

The leftmost character of a bitstring is the most significant bit, so the
ket :math:`|100\\rangle` has integer index 4.
'''

def complement(x, nbits):
    '''
    Flip all ``nbits`` low bits of x.
    '''
    return x ^ ((1 << nbits) - 1)

def to_bitstring(x, nbits):
    '''
    Render x as a string of '0' and '1' of length ``nbits``.
    '''
    if x >> nbits != 0:
        raise ValueError('value %d does not fit in %d bits' % (x, nbits))
    return format(x, '0%db' % nbits)

def from_bitstring(s):
    '''
    The inverse of :meth:`to_bitstring`.
    '''
    if not s or any(c not in '01' for c in s):
        raise ValueError("bitstring must be a nonempty string of '0' and '1' (got %r)" % s)
    return int(s, 2)
