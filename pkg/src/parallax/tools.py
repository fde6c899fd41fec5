'''
Various tools used throughout parallax: version information, seeded random
streams, and deterministic output documents.
'''

import json
import logging
import sys

import numpy as np

from . import config, validate

def get_version():
    '''
    Gets the installed version of parallax.

    Returns
    -------
    str
        The version string, or ``'unknown'`` when running from an
        uninstalled source tree.
    '''
    from importlib.metadata import version, PackageNotFoundError
    try:
        return version('parallax')
    except PackageNotFoundError:
        return 'unknown'

def get_version_str():
    '''
    Get a string with the version information for parallax and numpy.

    Returns
    -------
    str
        The version string
    '''
    return 'parallax version %s (numpy %s, rng %s)' % (
        get_version(), np.__version__, config.rng_algorithm)

def make_rng(seed, algorithm=None):
    '''
    Build a numpy ``Generator`` for the given seed.

    Parameters
    ----------
    seed : int or numpy.random.SeedSequence
        The seed.

    algorithm : str, optional
        The bit generator to use. Defaults to ``config.rng_algorithm``.

    Returns
    -------
    numpy.random.Generator
        The random stream
    '''
    if algorithm is None:
        algorithm = config.rng_algorithm
    algorithm = validate.rng_algorithm(algorithm)
    if not isinstance(seed, np.random.SeedSequence):
        seed = validate.seed(seed)
    bit_generator = getattr(np.random, algorithm)(seed)
    return np.random.Generator(bit_generator)

def trial_rng(seed, index, *streams):
    '''
    An independent stream for trial ``index`` of a run seeded with ``seed``.
    Streams for different indices (or different extra ``streams`` keys) are
    statistically independent, and do not depend on the order in which
    trials are executed.
    '''
    entropy = [validate.seed(seed), validate.integer(index, 'index')]
    entropy.extend(validate.integer(s, 'stream') for s in streams)
    return make_rng(np.random.SeedSequence(entropy))

def dump_document(doc):
    '''
    Serialize a document to JSON text. Keys are sorted so that identical
    documents always produce identical bytes.
    '''
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + '\n'

def write_document(doc, path=None):
    '''
    Write a document to ``path``, or to stdout if ``path`` is None.
    '''
    write_text(dump_document(doc), path)

def write_text(text, path=None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)

def setup_logging(level=None):
    '''
    Install a stderr handler on the root logger. Only used by the
    command-line interface; the library itself never installs handlers.
    '''
    if level is None:
        level = config.log_level
    logging.basicConfig(
        level=validate.log_level(level),
        format='%(asctime)s [%(levelname)s] [%(name)s] %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
    )
