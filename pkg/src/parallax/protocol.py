'''
The (n,n) secret sharing round: the dealer picks a secret and GHZ indices,
sends one triplet per participant over an in-process channel, the
participants measure and look up their lines, and the group decodes the
judging matrix. The two-party scheme is the n=2 case.
'''

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
import logging

from . import config, validate
from .geometry import DecodeVerdict, judging_matrix, decode
from .states import SecretCoefficients, ghz_basis, measure_in_ghz_basis
from .tables import Family, verify_tables
from .tools import trial_rng

log = logging.getLogger(__name__)

DEALER = 0

# the 6 unordered pairs of entangled basis indices
BASIS_PAIRS = tuple(combinations(range(4), 2))


class SecretBit(Enum):
    M0 = 'M0'
    M1 = 'M1'

    @property
    def family(self):
        '''
        The table family the dealer draws GHZ indices from for this secret.
        '''
        return Family.PARALLEL if self is SecretBit.M0 else Family.INTERSECT


class AdversaryAction(Enum):
    NONE = 'none'
    CAPTURED = 'captured'
    MEASURED_AND_RESENT = 'measured_and_resent'


class AbortCause(Enum):
    CAPTURED = 'captured'
    INCONCLUSIVE = 'inconclusive'


_VERDICT_SECRET = {
    DecodeVerdict.M0: SecretBit.M0,
    DecodeVerdict.M1: SecretBit.M1,
}

def verdict_secret(verdict):
    '''
    The secret label a conclusive verdict denotes, or None for an
    inconclusive one.
    '''
    return _VERDICT_SECRET.get(verdict)


@dataclass(frozen=True)
class SecretConfig:
    '''
    The dealer's private choice: two distinct entangled bases, one labelled
    M0 and the other M1.
    '''

    coeffs: SecretCoefficients
    m0_basis: int
    m1_basis: int

    def __post_init__(self):
        m0 = validate.basis_index(self.m0_basis)
        m1 = validate.basis_index(self.m1_basis)
        if m0 == m1:
            raise ValueError('M0 and M1 must be different entangled bases')

    @property
    def pair(self):
        return tuple(sorted((self.m0_basis, self.m1_basis)))

    def basis_for(self, bit):
        return self.m0_basis if bit is SecretBit.M0 else self.m1_basis

    def to_dict(self):
        return {
            'a': self.coeffs.a,
            'b': self.coeffs.b,
            'm0_basis': self.m0_basis,
            'm1_basis': self.m1_basis,
        }


@dataclass(frozen=True)
class ChannelEvent:
    '''
    One triplet sent from ``sender`` to ``receiver``. A captured triplet has
    no payload and never arrives.
    '''

    sender: int
    receiver: int
    payload: object
    adversary_action: AdversaryAction = AdversaryAction.NONE

    def to_dict(self):
        return {
            'from': self.sender,
            'to': self.receiver,
            'payload': None if self.payload is None else self.payload.to_pairs(),
            'adversary_action': self.adversary_action.value,
        }


class Channel:
    '''
    An in-process FIFO channel. The sender declares how many particles each
    receiver should get, so receivers can audit the count.
    '''

    def __init__(self):
        self._queue = deque()
        self._declared = {}
        self._log = []

    def declare(self, receiver, count):
        self._declared[receiver] = count

    def declared(self, receiver):
        return self._declared.get(receiver, 0)

    def send(self, event):
        self._log.append(event)
        if event.adversary_action is not AdversaryAction.CAPTURED:
            self._queue.append(event)

    def receive_all(self, receiver):
        '''
        Remove and return every queued event addressed to ``receiver``.
        '''
        rtn = [e for e in self._queue if e.receiver == receiver]
        self._queue = deque(e for e in self._queue if e.receiver != receiver)
        return rtn

    @property
    def events(self):
        '''
        Every event sent, in order, including captured ones.
        '''
        return tuple(self._log)


@dataclass(frozen=True)
class ProtocolTranscript:
    '''
    The full record of one round.

    ``recovered_secret`` is None when the round aborted; ``abort_cause``
    then says why. Per-participant lists are in participant order; entries
    are None for participants who never received their triplet.
    '''

    n: int
    table_seed: int
    table_digest: str
    secret_config: SecretConfig
    secret_bit_sent: SecretBit
    ghz_selection: tuple
    channel_events: tuple
    measurement_outcomes: tuple
    lines: tuple
    matrix: object
    verdict: DecodeVerdict
    declared_basis: int
    recovered_secret: SecretBit
    abort_cause: AbortCause
    rng_seed: int
    round_index: int
    rng_algorithm: str
    adversary_records: tuple = field(default=())

    @property
    def aborted(self):
        return self.recovered_secret is None

    @property
    def correct(self):
        return self.recovered_secret is self.secret_bit_sent

    def to_dict(self):
        return {
            'n': self.n,
            'table_set': {'generation_seed': self.table_seed, 'digest': self.table_digest},
            'secret_config': self.secret_config.to_dict(),
            'secret_bit_sent': self.secret_bit_sent.value,
            'ghz_selection': list(self.ghz_selection),
            'channel_events': [e.to_dict() for e in self.channel_events],
            'measurement_outcomes': list(self.measurement_outcomes),
            'lines': [None if l is None else list(l.to_tuple()) for l in self.lines],
            'matrix': None if self.matrix is None else self.matrix.to_list(),
            'verdict': None if self.verdict is None else self.verdict.value,
            'declared_basis': self.declared_basis,
            'recovered_secret': ('abort' if self.recovered_secret is None
                                 else self.recovered_secret.value),
            'abort_cause': None if self.abort_cause is None else self.abort_cause.value,
            'rng_seed': self.rng_seed,
            'round_index': self.round_index,
            'rng_algorithm': self.rng_algorithm,
            'adversary_records': [r.to_dict() for r in self.adversary_records],
        }


def transcript_to_dict(transcript):
    return transcript.to_dict()


def dealer_choose_secret(rng, coeffs):
    '''
    The dealer's private choice: a uniformly random unordered pair of
    entangled bases, a uniformly random assignment of M0/M1 to the pair, and
    a uniformly random secret bit to share.

    Parameters
    ----------
    rng : numpy.random.Generator
        The random stream.

    coeffs : SecretCoefficients
        The coefficients agreed with the participants.

    Returns
    -------
    tuple(SecretConfig, SecretBit)
        The configuration and the bit to share
    '''
    pair = BASIS_PAIRS[int(rng.integers(len(BASIS_PAIRS)))]
    if rng.integers(2):
        m0, m1 = pair[1], pair[0]
    else:
        m0, m1 = pair
    bit = SecretBit.M1 if rng.integers(2) else SecretBit.M0
    return SecretConfig(coeffs, m0, m1), bit

def dealer_select_ghz(secret, ts, rng):
    '''
    For each participant, pick a GHZ index uniformly from the table family
    that encodes ``secret``: parallel-family rows for M0, intersect-family
    rows for M1.

    Returns
    -------
    tuple of int
        One GHZ index per participant
    '''
    family = secret.family
    selection = []
    for t in ts.tables:
        choices = t.family_indices(family)
        selection.append(choices[int(rng.integers(len(choices)))])
    return tuple(selection)

def length_check(expected, received):
    '''
    Whether the number of particles received equals the declared amount.
    '''
    return expected == received

def run_round(n, ts, coeffs, adversary=None, seed=0, round_index=0):
    '''
    Run one round of the protocol.

    The round's random stream is derived from ``(seed, round_index)``, so
    rounds are reproducible and independent of execution order.

    Parameters
    ----------
    n : int
        The number of participants. Must equal ``ts.n``.

    ts : parallax.tables.TableSet
        The pre-shared tables.

    coeffs : SecretCoefficients
        The entangled basis coefficients.

    adversary : object, optional
        An eavesdropper with methods ``intercepts(receiver)`` and
        ``act(event, rng)``, such as :class:`parallax.adversary.EveModel`.

    seed : int
        The run seed.

    round_index : int
        Index of this round within the run.

    Returns
    -------
    ProtocolTranscript
        The transcript
    '''
    n = validate.n(n)
    if n != ts.n:
        raise ProtocolError('round for %d participants but tables for %d' % (n, ts.n))

    rng = trial_rng(seed, round_index)

    secret_config, bit = dealer_choose_secret(rng, coeffs)
    selection = dealer_select_ghz(bit, ts, rng)

    channel = Channel()
    records = []
    for participant, idx in enumerate(selection, start=1):
        channel.declare(participant, 1)
        event = ChannelEvent(DEALER, participant, ghz_basis(idx))
        if adversary is not None and adversary.intercepts(participant):
            event, record = adversary.act(event, rng)
            records.append(record)
        channel.send(event)

    received = {p: channel.receive_all(p) for p in range(1, n+1)}

    common = dict(
        n=n,
        table_seed=ts.generation_seed,
        table_digest=ts.digest(),
        secret_config=secret_config,
        secret_bit_sent=bit,
        ghz_selection=selection,
        channel_events=channel.events,
        rng_seed=seed,
        round_index=round_index,
        rng_algorithm=config.rng_algorithm,
        adversary_records=tuple(records),
    )

    failed = [p for p in range(1, n+1)
              if not length_check(channel.declared(p), len(received[p]))]
    if failed:
        log.info('round %d aborted: particle count mismatch for participant(s) %s',
                 round_index, failed)
        return ProtocolTranscript(
            measurement_outcomes=(None,)*n,
            lines=(None,)*n,
            matrix=None,
            verdict=None,
            declared_basis=None,
            recovered_secret=None,
            abort_cause=AbortCause.CAPTURED,
            **common)

    outcomes = []
    lines = []
    for p in range(1, n+1):
        outcome, _ = measure_in_ghz_basis(received[p][0].payload, rng)
        outcomes.append(outcome)
        lines.append(ts.table(p).lookup(outcome))

    matrix = judging_matrix(lines)
    verdict = decode(matrix)
    recovered = verdict_secret(verdict)

    if recovered is None:
        log.info('round %d aborted: judging matrix is inconclusive', round_index)
        declared, cause = None, AbortCause.INCONCLUSIVE
    else:
        declared, cause = secret_config.basis_for(bit), None

    log.debug('round %d: sent %s, verdict %s', round_index, bit.value, verdict.value)

    return ProtocolTranscript(
        measurement_outcomes=tuple(outcomes),
        lines=tuple(lines),
        matrix=matrix,
        verdict=verdict,
        declared_basis=declared,
        recovered_secret=recovered,
        abort_cause=cause,
        **common)


@dataclass
class RoundSummary:
    '''
    Counts of round results: correct, wrong, and aborted per cause.
    '''

    correct: int = 0
    wrong: int = 0
    abort_captured: int = 0
    abort_inconclusive: int = 0

    def add(self, transcript):
        if transcript.abort_cause is AbortCause.CAPTURED:
            self.abort_captured += 1
        elif transcript.abort_cause is AbortCause.INCONCLUSIVE:
            self.abort_inconclusive += 1
        elif transcript.correct:
            self.correct += 1
        else:
            self.wrong += 1

    @property
    def rounds(self):
        return self.correct + self.wrong + self.abort_captured + self.abort_inconclusive

    @property
    def abort(self):
        return self.abort_captured + self.abort_inconclusive

    def to_dict(self):
        return {
            'rounds': self.rounds,
            'correct': self.correct,
            'wrong': self.wrong,
            'abort': self.abort,
            'abort_by_cause': {
                AbortCause.CAPTURED.value: self.abort_captured,
                AbortCause.INCONCLUSIVE.value: self.abort_inconclusive,
            },
        }

def run_rounds(n, ts, coeffs, rounds, seed, adversary=None, check_tables=True):
    '''
    Run a sequence of independent rounds with round indices 0..rounds-1.

    Returns
    -------
    tuple(list of ProtocolTranscript, RoundSummary)
        The transcripts in round order, and their summary
    '''
    rounds = validate.positive_int(rounds, 'rounds')
    if check_tables:
        violations = verify_tables(ts)
        if violations:
            raise ProtocolError('cannot run with invalid tables: %s' % violations[0].message)

    transcripts = []
    summary = RoundSummary()
    for k in range(rounds):
        t = run_round(n, ts, coeffs, adversary=adversary, seed=seed, round_index=k)
        transcripts.append(t)
        summary.add(t)
    return transcripts, summary


class ProtocolError(RuntimeError):
    pass
