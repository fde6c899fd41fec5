'''
Attack models and security analysis: an eavesdropper on the dealer's
channels (capture, or measure and resend), a dishonest participant guessing
the declared basis, the closed-form entropy bounds, and Monte Carlo
estimators built on :func:`parallax.protocol.run_round`.

Two measure-and-resend variants are provided. ``guess-resend`` has Eve pick
a GHZ index uniformly and forward that basis state, which gives her a 1/8
chance per channel of holding the right index. ``computational-resend`` has
her measure every qubit in the computational basis and forward the
collapsed product state, which physically disturbs the triplet. Reports
name the model that produced them.
'''

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from enum import Enum
from fractions import Fraction
from itertools import product
import csv
import io
import logging
import math

from threadpoolctl import threadpool_limits

from . import config, validate
from .bitwise import complement, from_bitstring
from .computations import density_matrix, normalized_entropy
from .geometry import judging_matrix, decode
from .protocol import (AdversaryAction, SecretBit, ProtocolError, run_round,
                       verdict_secret)
from .states import (GHZ_PATTERNS, SecretCoefficients, StateVector, entangled_basis,
                     ghz_basis, measure_computational, measure_in_ghz_basis,
                     sign_partner)
from .tables import generate_tables
from .tools import get_version, trial_rng

log = logging.getLogger(__name__)


class EveStrategy(Enum):
    INTERCEPT_CAPTURE = 'capture'
    MEASURE_RESEND_GUESS = 'guess-resend'
    MEASURE_RESEND_COMPUTATIONAL = 'computational-resend'


@dataclass(frozen=True)
class EveRecord:
    '''
    What Eve learned from one intercepted triplet. ``inferred_index`` is her
    best estimate of the GHZ index the dealer sent.
    '''

    receiver: int
    strategy: EveStrategy
    inferred_index: int
    guess: int = None
    bits: str = None
    stolen: StateVector = None

    def to_dict(self):
        return {
            'receiver': self.receiver,
            'strategy': self.strategy.value,
            'inferred_index': self.inferred_index,
            'guess': self.guess,
            'bits': self.bits,
            'stolen': None if self.stolen is None else self.stolen.to_pairs(),
        }


@dataclass(frozen=True)
class EveModel:
    '''
    An eavesdropper on the channels to the participants in
    ``targeted_channels``.
    '''

    strategy: EveStrategy
    targeted_channels: frozenset

    def __post_init__(self):
        strategy = EveStrategy(self.strategy)
        targets = frozenset(validate.positive_int(p, 'participant id')
                            for p in self.targeted_channels)
        if not targets:
            raise ValueError('an eavesdropper must target at least one channel')
        object.__setattr__(self, 'strategy', strategy)
        object.__setattr__(self, 'targeted_channels', targets)

    @classmethod
    def on_all_channels(cls, strategy, n):
        return cls(strategy, frozenset(range(1, n+1)))

    @property
    def label(self):
        return self.strategy.value

    def intercepts(self, receiver):
        return receiver in self.targeted_channels

    def act(self, event, rng):
        '''
        Apply the attack to one channel event.

        Returns
        -------
        tuple(ChannelEvent, EveRecord)
            The event as it continues down the channel, and Eve's record
        '''
        if not self.intercepts(event.receiver):
            raise ValueError('channel to participant %d is not targeted' % event.receiver)

        if self.strategy is EveStrategy.INTERCEPT_CAPTURE:
            # the captured triplet is a GHZ eigenstate, so measuring it is exact
            inferred, _ = measure_in_ghz_basis(event.payload, rng)
            record = EveRecord(event.receiver, self.strategy, inferred,
                               stolen=event.payload)
            return replace(event, payload=None,
                           adversary_action=AdversaryAction.CAPTURED), record

        if self.strategy is EveStrategy.MEASURE_RESEND_GUESS:
            g = int(rng.integers(8))
            record = EveRecord(event.receiver, self.strategy, g, guess=g)
            return replace(event, payload=ghz_basis(g),
                           adversary_action=AdversaryAction.MEASURED_AND_RESENT), record

        bits, collapsed = measure_computational(event.payload, rng)
        x = from_bitstring(bits)
        pattern = x if x in GHZ_PATTERNS else complement(x, 3)
        # the bits fix the pattern but not the sign, so guess the sign
        inferred = GHZ_PATTERNS.index(pattern) + int(rng.integers(2))
        record = EveRecord(event.receiver, self.strategy, inferred, bits=bits)
        return replace(event, payload=collapsed,
                       adversary_action=AdversaryAction.MEASURED_AND_RESENT), record


def eve_act(model, event, rng):
    '''
    Apply ``model`` to a channel event. See :meth:`EveModel.act`.
    '''
    return model.act(event, rng)

def eve_reconstruct(transcript, ts, rng):
    '''
    Eve's attempt at the secret, assuming she holds every participant's
    table: she looks up lines for her inferred indices (guessing uniformly
    on channels she did not touch) and decodes them like the participants.

    Returns
    -------
    tuple(DecodeVerdict, tuple of int)
        Her verdict and the indices she used
    '''
    inferred = {r.receiver: r.inferred_index for r in transcript.adversary_records}
    indices = []
    for p in range(1, ts.n+1):
        if p in inferred:
            indices.append(inferred[p])
        else:
            indices.append(int(rng.integers(8)))
    lines = [ts.table(p).lookup(i) for p, i in enumerate(indices, start=1)]
    return decode(judging_matrix(lines)), tuple(indices)


@dataclass(frozen=True)
class DishonestModel:
    '''
    A participant who tries to guess the entangled basis the dealer will
    declare, before the group judges.
    '''

    dishonest_party: int

    def __post_init__(self):
        object.__setattr__(self, 'dishonest_party',
                           validate.positive_int(self.dishonest_party, 'dishonest_party'))

    @property
    def label(self):
        return 'dishonest'


@dataclass(frozen=True)
class PublicKnowledge:
    '''
    What a dishonest participant knows: the agreed coefficients and the four
    candidate bases, and optionally the dealer's pair.
    '''

    coeffs: SecretCoefficients
    known_pair: tuple = None

def dishonest_guess(public, rng):
    '''
    Guess the entangled basis uniformly over the 4 candidates, or over the
    dealer's pair if it is known.

    Returns
    -------
    int
        The guessed basis index
    '''
    if public.known_pair is None:
        return int(rng.integers(4))
    return int(public.known_pair[int(rng.integers(len(public.known_pair)))])


def _check_N(N):
    return validate.positive_int(N, 'N', minimum=2)

def eve_density_diagonal(coeffs, N):
    r'''
    Diagonal of Eve's density operator when each of the 4 entangled bases
    carries probability :math:`(1/8)^N`:
    :math:`[a^2, a^2, b^2, b^2] / 2^{3N-1}`. The trace is
    :math:`1/2^{3N-2}`, not 1.
    '''
    N = _check_N(N)
    a2, b2 = coeffs.a_squared, coeffs.b*coeffs.b
    # underflows to 0.0 for large N
    return [math.ldexp(x, -(3*N - 1)) for x in (a2, a2, b2, b2)]

def eve_entropy(coeffs, N):
    r'''
    Closed form of the Von Neumann entropy of :meth:`eve_density_diagonal`:

    .. math::
        \frac{3N-1}{2^{3N-2}} - \frac{1}{2^{3N-3}} (a^2 \log_2 a + b^2 \log_2 b)
    '''
    N = _check_N(N)
    a, b = coeffs.a, coeffs.b
    return (math.ldexp(3*N - 1, -(3*N - 2))
            - math.ldexp(a*a*math.log2(a) + b*b*math.log2(b), -(3*N - 3)))

def eve_density_matrix(coeffs, N):
    '''
    The full density operator built from the entangled basis states with
    weight :math:`(1/8)^N` each. It is diagonal and equals
    :meth:`eve_density_diagonal`.
    '''
    N = _check_N(N)
    bases = [entangled_basis(i, coeffs) for i in range(4)]
    return density_matrix([math.ldexp(1.0, -3*N)]*4, bases)

def normalized_eve_entropy(coeffs, N):
    '''
    Entropy of :meth:`eve_density_diagonal` rescaled to unit trace. The
    rescaled diagonal does not depend on N, so this stays defined where the
    unscaled entries underflow.
    '''
    _check_N(N)
    a2, b2 = coeffs.a_squared, coeffs.b*coeffs.b
    return normalized_entropy([a2, a2, b2, b2])

def dishonest_density_diagonal(coeffs):
    r'''
    Diagonal of a dishonest participant's density operator, each basis with
    probability 1/4: :math:`[a^2, a^2, b^2, b^2] / 2`.
    '''
    a2, b2 = coeffs.a_squared, coeffs.b*coeffs.b
    return [a2/2, a2/2, b2/2, b2/2]

def dishonest_entropy(coeffs):
    r'''
    Closed form :math:`1 - 2(a^2 \log_2 a + b^2 \log_2 b)`.
    '''
    a, b = coeffs.a, coeffs.b
    return 1 - 2*(a*a*math.log2(a) + b*b*math.log2(b))

def dishonest_density_matrix(coeffs):
    bases = [entangled_basis(i, coeffs) for i in range(4)]
    return density_matrix([0.25]*4, bases)

def normalized_dishonest_entropy(coeffs):
    return normalized_entropy(dishonest_density_diagonal(coeffs))


CSV_COLUMNS = (
    'model', 'n', 'trials', 'seed', 'targeted_channels', 'a_squared',
    'eve_correct_coeff_rate', 'eve_correct_coeff_se',
    'detection_rate', 'detection_se',
    'eve_secret_rate', 'eve_secret_se',
    'wrong_rate', 'wrong_se',
    'dishonest_guess_rate', 'dishonest_guess_se',
    'dishonest_known_pair_rate', 'dishonest_known_pair_se',
)


@dataclass
class _Tally:
    trials: int = 0
    eve_correct: int = 0
    detected: int = 0
    eve_secret: int = 0
    wrong: int = 0
    dishonest_correct: int = 0
    dishonest_pair_correct: int = 0

    def __iadd__(self, x):
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(x, f.name))
        return self


def _rate(count, trials):
    return count / trials

def standard_error(rate, trials):
    '''
    Binomial standard error :math:`\\sqrt{\\hat p (1 - \\hat p) / N}`.
    '''
    return math.sqrt(rate*(1 - rate)/trials)


@dataclass(frozen=True)
class AttackReport:
    '''
    Aggregated Monte Carlo results for one attack scenario. Rates that do
    not apply to the scenario (e.g. dishonest guessing for an eavesdropper)
    are None.
    '''

    model: str
    n: int
    trials: int
    seed: int
    targeted_channels: tuple
    a_squared: float
    rng_algorithm: str
    eve_correct: int
    detected: int
    eve_secret: int
    wrong: int
    dishonest_correct: int = None
    dishonest_pair_correct: int = None

    @property
    def is_dishonest(self):
        return self.model == 'dishonest'

    @property
    def eve_correct_coeff_rate(self):
        return None if self.is_dishonest else _rate(self.eve_correct, self.trials)

    @property
    def detection_rate(self):
        return _rate(self.detected, self.trials)

    @property
    def eve_secret_rate(self):
        return None if self.is_dishonest else _rate(self.eve_secret, self.trials)

    @property
    def wrong_rate(self):
        return _rate(self.wrong, self.trials)

    @property
    def dishonest_guess_rate(self):
        if not self.is_dishonest:
            return None
        return _rate(self.dishonest_correct, self.trials)

    @property
    def dishonest_known_pair_rate(self):
        if not self.is_dishonest:
            return None
        return _rate(self.dishonest_pair_correct, self.trials)

    def rates(self):
        '''
        Every rate with its standard error, as ``{name: (rate, se)}``.
        Inapplicable rates map to ``(None, None)``.
        '''
        rtn = {}
        for name in ('eve_correct_coeff', 'detection', 'eve_secret', 'wrong',
                     'dishonest_guess', 'dishonest_known_pair'):
            rate = getattr(self, name + '_rate')
            se = None if rate is None else standard_error(rate, self.trials)
            rtn[name] = (rate, se)
        return rtn

    def to_dict(self):
        return {
            'model': self.model,
            'n': self.n,
            'trials': self.trials,
            'seed': self.seed,
            'targeted_channels': list(self.targeted_channels),
            'a_squared': self.a_squared,
            'rng_algorithm': self.rng_algorithm,
            'version': get_version(),
            'rates': {k: {'rate': r, 'standard_error': se}
                      for k, (r, se) in self.rates().items()},
        }

    def csv_row(self):
        '''
        The report as one CSV line (without header), columns as in
        ``CSV_COLUMNS``.
        '''
        values = [self.model, self.n, self.trials, self.seed,
                  ' '.join(str(p) for p in self.targeted_channels), repr(self.a_squared)]
        for rate, se in self.rates().values():
            values.extend('' if v is None else repr(v) for v in (rate, se))
        buf = io.StringIO()
        csv.writer(buf, lineterminator='\n').writerow(values)
        return buf.getvalue()

def csv_header():
    buf = io.StringIO()
    csv.writer(buf, lineterminator='\n').writerow(CSV_COLUMNS)
    return buf.getvalue()


def _run_trial(scenario, ts, coeffs, seed, k):
    extra = trial_rng(seed, k, 1)

    if isinstance(scenario, DishonestModel):
        t = run_round(ts.n, ts, coeffs, seed=seed, round_index=k)
        guess = dishonest_guess(PublicKnowledge(coeffs), extra)
        pair_guess = dishonest_guess(PublicKnowledge(coeffs, t.secret_config.pair), extra)
        return _Tally(
            trials=1,
            detected=int(t.aborted),
            wrong=int(not t.aborted and not t.correct),
            dishonest_correct=int(guess == t.declared_basis),
            dishonest_pair_correct=int(pair_guess == t.declared_basis),
        )

    t = run_round(ts.n, ts, coeffs, adversary=scenario, seed=seed, round_index=k)
    verdict, indices = eve_reconstruct(t, ts, extra)
    eve_correct = all(indices[p-1] == t.ghz_selection[p-1]
                      for p in scenario.targeted_channels)
    return _Tally(
        trials=1,
        eve_correct=int(eve_correct),
        detected=int(t.aborted),
        eve_secret=int(verdict_secret(verdict) is t.secret_bit_sent),
        wrong=int(not t.aborted and not t.correct),
    )

def _run_trials(scenario, ts, coeffs, seed, start, stop, settings=None):
    if settings is not None:
        # worker processes do not inherit the parent's configuration
        for key, value in settings.items():
            setattr(config, key, value)

    tally = _Tally()
    with threadpool_limits(limits=1):
        for k in range(start, stop):
            tally += _run_trial(scenario, ts, coeffs, seed, k)
    return tally

def _check_scenario(scenario, n):
    if isinstance(scenario, EveModel):
        bad = [p for p in scenario.targeted_channels if p > n]
        if bad:
            raise ValueError('targeted channel(s) %s do not exist for n=%d' % (sorted(bad), n))
    elif isinstance(scenario, DishonestModel):
        if scenario.dishonest_party > n:
            raise ValueError('dishonest party %d does not exist for n=%d'
                             % (scenario.dishonest_party, n))
    else:
        raise ValueError('scenario must be an EveModel or a DishonestModel')

def monte_carlo(scenario, n, trials, seed, coeffs=None, ts=None):
    '''
    Estimate attack rates by running ``trials`` independent protocol rounds
    with the adversary installed.

    Trial ``k`` draws all of its randomness from streams derived from
    ``(seed, k)``, so the report is identical for any ``config.workers``.

    Parameters
    ----------
    scenario : EveModel or DishonestModel
        The attack.

    n : int
        The number of participants.

    trials : int
        The number of rounds.

    seed : int
        Seed for the rounds, and for the tables if ``ts`` is not given.

    coeffs : SecretCoefficients, optional
        Defaults to :math:`a = b = 1/\\sqrt{2}`.

    ts : parallax.tables.TableSet, optional
        The tables. Generated from ``seed`` if not given.

    Returns
    -------
    AttackReport
        The aggregated rates
    '''
    n = validate.n(n)
    trials = validate.positive_int(trials, 'trials')
    seed = validate.seed(seed)
    _check_scenario(scenario, n)

    if coeffs is None:
        coeffs = SecretCoefficients.from_a_squared(Fraction(1, 2))
    if ts is None:
        ts = generate_tables(n, seed)
    elif ts.n != n:
        raise ProtocolError('tables are for %d participants, not %d' % (ts.n, n))

    log.info('running %d trials of %s with n=%d, seed=%d', trials, scenario.label, n, seed)

    workers = min(config.workers, trials)
    if workers > 1:
        bounds = [trials*w // workers for w in range(workers+1)]
        settings = {'tol': config.tol, 'rng_algorithm': config.rng_algorithm}
        tally = _Tally()
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_run_trials, scenario, ts, coeffs, seed,
                                       bounds[w], bounds[w+1], settings)
                       for w in range(workers)]
            for f in futures:
                tally += f.result()
    else:
        tally = _run_trials(scenario, ts, coeffs, seed, 0, trials)

    targeted = (() if isinstance(scenario, DishonestModel)
                else tuple(sorted(scenario.targeted_channels)))
    is_dishonest = isinstance(scenario, DishonestModel)

    return AttackReport(
        model=scenario.label,
        n=n,
        trials=trials,
        seed=seed,
        targeted_channels=targeted,
        a_squared=round(coeffs.a_squared, 12),
        rng_algorithm=config.rng_algorithm,
        eve_correct=tally.eve_correct,
        detected=tally.detected,
        eve_secret=tally.eve_secret,
        wrong=tally.wrong,
        dishonest_correct=tally.dishonest_correct if is_dishonest else None,
        dishonest_pair_correct=tally.dishonest_pair_correct if is_dishonest else None,
    )

def exact_disturbance_rates(ts, targeted=None):
    '''
    Exact outcome probabilities of a round under the computational
    measure-and-resend attack, by enumerating every secret bit, every dealer
    selection, and every participant outcome. A disturbed triplet is found
    in its own GHZ state or its sign partner with probability 1/2 each.

    Parameters
    ----------
    ts : parallax.tables.TableSet
        The tables.

    targeted : iterable of int, optional
        The attacked channels. Defaults to all of them.

    Returns
    -------
    dict
        ``{'correct': Fraction, 'wrong': Fraction, 'abort': Fraction}``
    '''
    n = ts.n
    if n > 5:
        raise ValueError('exact enumeration is limited to n <= 5 (got %d)' % n)
    if targeted is None:
        targeted = range(1, n+1)
    targeted = frozenset(validate.positive_int(p, 'participant id') for p in targeted)
    bad = [p for p in targeted if p > n]
    if bad:
        raise ValueError('targeted channel(s) %s do not exist for n=%d' % (sorted(bad), n))

    rtn = {'correct': Fraction(0), 'wrong': Fraction(0), 'abort': Fraction(0)}
    weight = Fraction(1, 2 * 4**n * 2**len(targeted))

    for bit in SecretBit:
        families = [t.family_indices(bit.family) for t in ts.tables]
        for selection in product(*families):
            options = [(i, sign_partner(i)) if p in targeted else (i,)
                       for p, i in enumerate(selection, start=1)]
            for outcomes in product(*options):
                lines = [ts.table(p).lookup(i) for p, i in enumerate(outcomes, start=1)]
                recovered = verdict_secret(decode(judging_matrix(lines)))
                if recovered is None:
                    rtn['abort'] += weight
                elif recovered is bit:
                    rtn['correct'] += weight
                else:
                    rtn['wrong'] += weight
    return rtn
