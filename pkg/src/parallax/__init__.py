'''
Simulation and analysis of (n,n)-threshold quantum secret sharing in which
GHZ triplets carry indices into coefficient tables of straight lines, and
the secret is decided by whether those lines are parallel or intersect.
'''

import logging

from . import validate

logging.getLogger(__name__).addHandler(logging.NullHandler())

# handle global configuration

class _Config:
    """
    Package-wide configuration of parallax.

    Values are validated when set, and are read at call time by the
    functions that use them (they are **not** retroactive for objects that
    already exist, e.g. a generated table set keeps its coefficients).
    """

    _tol = 1E-12
    _max_n = 16
    _max_coeff = 10**6
    _rng_algorithm = 'PCG64'
    _workers = 1
    _log_level = 'WARNING'

    @property
    def tol(self):
        """
        Absolute tolerance used for norm and orthogonality checks on state
        vectors.
        """
        return self._tol

    @tol.setter
    def tol(self, value):
        self._tol = validate.tol(value)

    @property
    def max_n(self):
        """
        The largest number of participants for which coefficient tables can
        be generated.
        """
        return self._max_n

    @max_n.setter
    def max_n(self, value):
        self._max_n = validate.positive_int(value, 'max_n', minimum=2)

    @property
    def max_coeff(self):
        """
        Bound on the magnitude of every integer line coefficient produced
        by the table generator.
        """
        return self._max_coeff

    @max_coeff.setter
    def max_coeff(self, value):
        self._max_coeff = validate.positive_int(value, 'max_coeff')

    @property
    def rng_algorithm(self):
        """
        Name of the numpy bit generator behind every random stream. It is
        recorded in transcripts and reports, since outcome sequences are
        only reproducible for a fixed algorithm.
        """
        return self._rng_algorithm

    @rng_algorithm.setter
    def rng_algorithm(self, value):
        self._rng_algorithm = validate.rng_algorithm(value)

    @property
    def workers(self):
        """
        Number of worker processes used by Monte Carlo attack simulations.
        Results do not depend on this value.
        """
        return self._workers

    @workers.setter
    def workers(self, value):
        self._workers = validate.positive_int(value, 'workers')

    @property
    def log_level(self):
        """
        Default logging level used by the command-line interface.
        """
        return self._log_level

    @log_level.setter
    def log_level(self, value):
        self._log_level = validate.log_level(value)

    def as_dict(self):
        '''
        The current configuration as a plain dictionary.
        '''
        return {
            'tol': self.tol,
            'max_n': self.max_n,
            'max_coeff': self.max_coeff,
            'rng_algorithm': self.rng_algorithm,
            'workers': self.workers,
            'log_level': self.log_level,
        }

config = _Config()
