'''
Per-participant coefficient tables: for every GHZ outcome, the integer
coefficients of a line and the family it belongs to.

All parallel-family lines, across every participant, share one direction
and are pairwise distinct. All intersect-family lines have pairwise
distinct directions, none equal to the parallel direction. So whichever
parallel-family row the dealer picks for each participant, the chosen lines
are pairwise parallel; whichever intersect-family rows, pairwise
intersecting.
'''

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from hashlib import sha256
import json
import logging

from . import config, validate
from .geometry import Line, LineRelation, relation, coincident, canonical_direction
from .tools import dump_document, make_rng, write_text

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ROWS_PER_TABLE = 8
FAMILY_SIZE = 4


class Family(Enum):
    PARALLEL = 'parallel'
    INTERSECT = 'intersect'


@dataclass(frozen=True)
class Row:
    line: Line
    family: Family


class CoefficientTable:
    '''
    The table held by one participant.

    Parameters
    ----------
    participant_id : int
        The participant, numbered from 1 (0 is the dealer).

    rows : sequence of Row
        Exactly 8 rows, indexed by GHZ outcome.
    '''

    def __init__(self, participant_id, rows):
        participant_id = validate.integer(participant_id, 'participant_id')
        if participant_id < 1:
            raise TableError('participant ids start at 1 (got %d)' % participant_id)

        rows = tuple(rows)
        if len(rows) != ROWS_PER_TABLE:
            raise TableError('participant %d: table must have exactly %d rows (got %d)'
                             % (participant_id, ROWS_PER_TABLE, len(rows)))
        if not all(isinstance(r, Row) for r in rows):
            raise TableError('table rows must be Row instances')

        self._participant_id = participant_id
        self._rows = rows

    @property
    def participant_id(self):
        return self._participant_id

    @property
    def rows(self):
        return self._rows

    def lookup(self, i):
        '''
        The line stored for GHZ outcome ``i``.
        '''
        return self._rows[validate.ghz_index(i)].line

    def family(self, i):
        return self._rows[validate.ghz_index(i)].family

    def family_indices(self, family):
        '''
        The GHZ indices whose rows belong to ``family``, ascending.
        '''
        return tuple(i for i, r in enumerate(self._rows) if r.family is family)

    def to_dict(self):
        return {
            'participant_id': self._participant_id,
            'rows': [
                {
                    'ghz_index': i,
                    'a': r.line.a,
                    'b': r.line.b,
                    'c': r.line.c,
                    'family': r.family.value,
                }
                for i, r in enumerate(self._rows)
            ],
        }

    def __eq__(self, x):
        if not isinstance(x, CoefficientTable):
            return NotImplemented
        return (self._participant_id, self._rows) == (x._participant_id, x._rows)

    def __hash__(self):
        return hash((self._participant_id, self._rows))


def lookup(t, i):
    '''
    Look up the line for GHZ outcome ``i`` in table ``t``.
    '''
    return t.lookup(i)


@dataclass(frozen=True)
class TableSet:
    '''
    The tables of all n participants, in participant order.
    '''

    n: int
    tables: tuple
    generation_seed: int

    def __post_init__(self):
        n = validate.n(self.n)
        tables = tuple(self.tables)
        if len(tables) != n:
            raise TableError('expected %d tables (got %d)' % (n, len(tables)))
        ids = [t.participant_id for t in tables]
        if ids != list(range(1, n+1)):
            raise TableError('participant ids must be 1..%d in order (got %s)' % (n, ids))
        object.__setattr__(self, 'n', n)
        object.__setattr__(self, 'tables', tables)
        object.__setattr__(self, 'generation_seed', validate.seed(self.generation_seed))

    def table(self, participant_id):
        return self.tables[participant_id - 1]

    def family_indices(self, participant_id, family):
        return self.table(participant_id).family_indices(family)

    def to_dict(self):
        return {
            'schema_version': SCHEMA_VERSION,
            'n': self.n,
            'generation_seed': self.generation_seed,
            'tables': [t.to_dict() for t in self.tables],
        }

    def digest(self):
        '''
        SHA-256 of the canonical table document, used to reference this
        table set from transcripts.
        '''
        return self._digest

    @cached_property
    def _digest(self):
        return sha256(dump_document(self.to_dict()).encode('utf-8')).hexdigest()


@dataclass(frozen=True)
class Violation:
    '''
    One failed table invariant.

    ``kind`` is one of ``'relation'`` (two rows have the wrong relation for
    their families), ``'coincident'`` (two parallel-family rows are the same
    line), ``'family_size'`` (a table does not have 4 rows per family),
    ``'row_count'`` (a stored table does not have 8 rows),
    ``'invalid_line'`` (a stored row has a = b = 0), or
    ``'mixed_relation'`` (a parallel-family and an intersect-family row do
    not intersect, reported only on request).
    '''

    kind: str
    participants: tuple
    ghz_indices: tuple
    relation: str
    message: str

    def involves(self, participant_id, ghz_index):
        return any(p == participant_id and i == ghz_index
                   for p, i in zip(self.participants, self.ghz_indices))


def _draw_direction(rng, bound):
    while True:
        a, b = (int(x) for x in rng.integers(-bound, bound, size=2, endpoint=True))
        if a != 0 or b != 0:
            return canonical_direction(a, b)

def generate_tables(n, seed):
    '''
    Generate a table set for ``n`` participants.

    Every participant gets an independent uniformly random choice of which
    4 of the 8 GHZ indices are parallel-family rows. All coefficients are
    bounded in magnitude by ``config.max_coeff``.

    Parameters
    ----------
    n : int
        The number of participants, between 2 and ``config.max_n``.

    seed : int
        Seed for the random stream; the same (n, seed) always produces the
        same tables.

    Returns
    -------
    TableSet
        The tables
    '''
    n = validate.n(n, config.max_n)
    seed = validate.seed(seed)
    bound = config.max_coeff
    if bound < 4*n:
        raise ValueError('config.max_coeff=%d is too small for n=%d (need at least %d)'
                         % (bound, n, 4*n))

    rng = make_rng(seed)
    n_rows = FAMILY_SIZE * n

    parallel_dir = _draw_direction(rng, bound)

    # distinct offsets so that no two parallel-family lines coincide
    offsets = []
    used = set()
    while len(offsets) < n_rows:
        c = int(rng.integers(-bound, bound, endpoint=True))
        if c not in used:
            used.add(c)
            offsets.append(c)

    directions = []
    used = {parallel_dir}
    while len(directions) < n_rows:
        d = _draw_direction(rng, bound)
        if d not in used:
            used.add(d)
            directions.append(d)

    tables = []
    for p in range(n):
        parallel_idxs = set(int(i) for i in rng.permutation(ROWS_PER_TABLE)[:FAMILY_SIZE])
        rows = []
        for i in range(ROWS_PER_TABLE):
            if i in parallel_idxs:
                line = Line(*parallel_dir, offsets.pop())
                rows.append(Row(line, Family.PARALLEL))
            else:
                a, b = directions.pop()
                c = int(rng.integers(-bound, bound, endpoint=True))
                rows.append(Row(Line(a, b, c), Family.INTERSECT))
        tables.append(CoefficientTable(p+1, rows))

    rtn = TableSet(n, tuple(tables), seed)
    log.debug('generated tables for n=%d seed=%d (parallel direction %s)',
              n, seed, parallel_dir)
    return rtn

def verify_tables(ts, include_mixed=False):
    '''
    Exhaustively check the table invariants.

    Every pair of rows is compared: two parallel-family rows must be parallel
    and not coincident, and two intersect-family rows must intersect. Each
    table must also have exactly 4 rows per family.

    Parameters
    ----------
    ts : TableSet
        The tables.

    include_mixed : bool
        Also report pairs of one parallel-family and one intersect-family row
        that do not intersect, as ``'mixed_relation'`` violations. The
        protocol does not need these pairs to intersect, but
        :meth:`generate_tables` guarantees it.

    Returns
    -------
    list of Violation
        The violations found; empty if the table set is valid
    '''
    violations = []

    for t in ts.tables:
        parallel = t.family_indices(Family.PARALLEL)
        if len(parallel) != FAMILY_SIZE:
            violations.append(Violation(
                'family_size', (t.participant_id,), parallel, None,
                'participant %d has %d parallel-family rows (expected %d)'
                % (t.participant_id, len(parallel), FAMILY_SIZE)))

    entries = [(t.participant_id, i, r) for t in ts.tables for i, r in enumerate(t.rows)]

    for k, (p1, i1, r1) in enumerate(entries):
        for p2, i2, r2 in entries[k+1:]:
            mixed = r1.family is not r2.family
            if mixed and not include_mixed:
                continue
            found = relation(r1.line, r2.line)
            both_parallel = (r1.family is Family.PARALLEL and r2.family is Family.PARALLEL)
            expected = LineRelation.PARALLEL if both_parallel else LineRelation.INTERSECTING

            if found is not expected:
                violations.append(Violation(
                    'mixed_relation' if mixed else 'relation', (p1, p2), (i1, i2), found.value,
                    'participant %d row %d (%s) and participant %d row %d (%s) '
                    'are %s, expected %s' % (p1, i1, r1.family.value, p2, i2,
                                             r2.family.value, found.value,
                                             expected.value)))

            elif both_parallel and coincident(r1.line, r2.line):
                violations.append(Violation(
                    'coincident', (p1, p2), (i1, i2), found.value,
                    'participant %d row %d and participant %d row %d are the '
                    'same line %s' % (p1, i1, p2, i2, r1.line.to_tuple())))

    return violations

def save_tables(ts, path, meta=None):
    '''
    Save a table set as a JSON document.

    Parameters
    ----------
    ts : TableSet
        The tables.

    path : str or None
        Where to write. If None, writes to stdout.

    meta : dict, optional
        Extra run metadata to embed under the ``meta`` key.
    '''
    violations = verify_tables(ts)
    if violations:
        raise TableError('refusing to save an invalid table set', violations)

    doc = ts.to_dict()
    if meta is not None:
        doc['meta'] = meta
    write_text(dump_document(doc), path)

def _get(d, key, kind, where):
    if not isinstance(d, dict) or key not in d:
        raise TableError('%s: missing field %r' % (where, key))
    value = d[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise TableError('%s: field %r must be an integer (got %r)' % (where, key, value))
    if kind is not int and not isinstance(value, kind):
        raise TableError('%s: field %r has the wrong type' % (where, key))
    return value

def tables_from_dict(doc):
    '''
    Build and verify a table set from a parsed document.
    '''
    schema = _get(doc, 'schema_version', int, 'document')
    if schema != SCHEMA_VERSION:
        raise TableError('unsupported schema version %d' % schema)

    n = _get(doc, 'n', int, 'document')
    seed = _get(doc, 'generation_seed', int, 'document')
    tables = []
    for k, tdoc in enumerate(_get(doc, 'tables', list, 'document')):
        where = 'table %d' % k
        pid = _get(tdoc, 'participant_id', int, where)
        rdocs = _get(tdoc, 'rows', list, where)
        if len(rdocs) != ROWS_PER_TABLE:
            msg = ('participant %d: table must have exactly %d rows (got %d)'
                   % (pid, ROWS_PER_TABLE, len(rdocs)))
            raise TableError(msg, [Violation('row_count', (pid,), (), None, msg)])
        rows = []
        for j, rdoc in enumerate(rdocs):
            rwhere = '%s row %d' % (where, j)
            if _get(rdoc, 'ghz_index', int, rwhere) != j:
                raise TableError('%s: rows must be in ascending ghz_index order' % rwhere)
            a, b, c = (_get(rdoc, key, int, rwhere) for key in 'abc')
            if a == 0 and b == 0:
                msg = '%s: a and b must not both be zero' % rwhere
                raise TableError(msg, [Violation('invalid_line', (pid,), (j,), None, msg)])
            line = Line(a, b, c)
            try:
                family = Family(_get(rdoc, 'family', str, rwhere))
            except TableError:
                raise
            except ValueError as e:
                raise TableError('%s: %s' % (rwhere, e)) from None
            rows.append(Row(line, family))
        tables.append(CoefficientTable(pid, rows))

    try:
        ts = TableSet(n, tuple(tables), seed)
    except TableError:
        raise
    except ValueError as e:
        raise TableError(str(e)) from None

    violations = verify_tables(ts)
    if violations:
        raise TableError('table set violates %d invariant(s); first: %s'
                         % (len(violations), violations[0].message), violations)
    return ts

def load_tables(path):
    '''
    Load a table set saved with :meth:`save_tables`, verifying every
    invariant.

    Returns
    -------
    TableSet
        The tables
    '''
    with open(path, encoding='utf-8') as f:
        try:
            doc = json.load(f)
        except ValueError as e:
            # also undecodable bytes and integers past the digit limit
            raise TableError('malformed table file %s: %s' % (path, e)) from None
    return tables_from_dict(doc)


class TableError(ValueError):
    '''
    Raised for malformed or invariant-violating tables. ``violations`` holds
    the list of :class:`Violation` records, if any.
    '''

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)
