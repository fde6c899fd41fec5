'''
The ``parallax`` command: generate tables, run protocol rounds, simulate
attacks, and evaluate the entropy bounds.

Every structured document written by a command carries a ``meta`` block
with the command, its full configuration, the seed, and the version, so
that re-running with the same flags reproduces the same bytes.
'''

import argparse as ap
from dataclasses import dataclass, fields
from fractions import Fraction
import csv
import io
import logging
import sys

from . import config, validate
from .adversary import (CSV_COLUMNS, DishonestModel, EveModel, EveStrategy,
                        csv_header, dishonest_density_matrix, dishonest_entropy,
                        eve_density_matrix, eve_entropy, monte_carlo,
                        normalized_dishonest_entropy, normalized_eve_entropy)
from .computations import dm_entropy
from .protocol import ProtocolError, run_rounds
from .states import SecretCoefficients
from .tables import generate_tables, load_tables, save_tables
from .tools import get_version, get_version_str, setup_logging, write_document, write_text

log = logging.getLogger(__name__)

COMMANDS = ('gen-tables', 'run', 'attack', 'entropy', 'sweep')
FORMATS = ('text', 'structured', 'csv')
ATTACK_MODELS = tuple(s.value for s in EveStrategy) + ('dishonest',)

SWEEP_COLUMNS = (
    'a_squared', 'N',
    'eve_entropy', 'eve_entropy_eigen',
    'dishonest_entropy', 'dishonest_entropy_eigen',
    'eve_entropy_normalized', 'dishonest_entropy_normalized',
)


@dataclass(frozen=True)
class RunConfig:
    '''
    Everything a command needs, after parsing and validation.
    '''

    command: str
    n: int = 2
    trials: int = 10**4
    seed: int = 0
    a_squared: Fraction = Fraction(1, 2)
    eve_model: str = None
    table_path: str = None
    output_path: str = None
    format: str = 'text'
    targets: tuple = None
    dishonest_party: int = 1
    points: int = 19
    n_values: tuple = (2, 3, 4, 5)
    transcripts: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError('unknown command %r' % self.command)
        if self.format not in FORMATS:
            raise ValueError('unknown output format %r' % self.format)
        object.__setattr__(self, 'n', validate.n(self.n))
        object.__setattr__(self, 'trials', validate.positive_int(self.trials, 'trials'))
        object.__setattr__(self, 'seed', validate.seed(self.seed))
        object.__setattr__(self, 'a_squared', validate.a_squared(self.a_squared))

    @property
    def coeffs(self):
        return SecretCoefficients.from_a_squared(self.a_squared)

    def to_dict(self):
        rtn = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Fraction):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value)
            rtn[f.name] = value
        return rtn


def meta(cfg):
    '''
    The ``meta`` block embedded in every output document.
    '''
    return {
        'command': cfg.command,
        'config': cfg.to_dict(),
        'settings': config.as_dict(),
        'seed': cfg.seed,
        'version': get_version(),
        'rng_algorithm': config.rng_algorithm,
    }

def _int_list(s):
    try:
        return tuple(int(x) for x in s.split(',') if x.strip())
    except ValueError:
        raise ap.ArgumentTypeError('expected comma-separated integers (got %r)' % s) from None

def _a_squared(s):
    try:
        return validate.a_squared(s)
    except ValueError as e:
        raise ap.ArgumentTypeError(str(e)) from None

def parse_args(argv=None):

    common = ap.ArgumentParser(add_help=False)
    common.add_argument('--verbosity', type=str.upper, choices=validate.LOG_LEVELS,
                        default=None,
                        help='Logging level for messages on stderr. Defaults to '
                        'config.log_level.')
    common.add_argument('--rng-algorithm', choices=validate.RNG_ALGORITHMS,
                        default=None,
                        help='The numpy bit generator behind every random stream.')
    common.add_argument('--workers', type=int, default=None,
                        help='Worker processes for Monte Carlo simulations.')
    common.add_argument('--output-path', type=str, default=None,
                        help='Where to write the output. Defaults to stdout.')

    seeded = ap.ArgumentParser(add_help=False)
    seeded.add_argument('--n', type=int, default=2,
                        help='Number of participants.')
    seeded.add_argument('--seed', type=int, default=0,
                        help='Seed for the tables and for every round.')

    coeffs = ap.ArgumentParser(add_help=False)
    coeffs.add_argument('--a2', type=_a_squared, default=Fraction(1, 2),
                        help='The squared coefficient a^2 of the entangled bases, '
                        'e.g. 1/2 or 0.75. b^2 = 1 - a^2.')

    parser = ap.ArgumentParser(prog='parallax',
                               description='Simulate GHZ-based (n,n) threshold quantum '
                               'secret sharing with line-coefficient tables.')
    parser.add_argument('--version', action='version', version=get_version_str())
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('gen-tables', parents=[common, seeded],
                   help='Generate and save coefficient tables.')

    p = sub.add_parser('run', parents=[common, seeded, coeffs],
                       help='Run protocol rounds without an adversary.')
    p.add_argument('--trials', type=int, default=10**4,
                   help='Number of rounds.')
    p.add_argument('--table-path', type=str, default=None,
                   help='Load tables from this file instead of generating them.')
    p.add_argument('--transcripts', action='store_true',
                   help='Include every round transcript in structured output.')
    p.add_argument('--format', choices=('text', 'structured'), default='text')

    p = sub.add_parser('attack', parents=[common, seeded, coeffs],
                       help='Estimate attack success and detection rates.',
                       description='CSV output has the columns: ' + ','.join(CSV_COLUMNS))
    p.add_argument('--model', choices=ATTACK_MODELS, required=True,
                   help='The attack to simulate.')
    p.add_argument('--trials', type=int, default=10**4,
                   help='Number of Monte Carlo rounds.')
    p.add_argument('--targets', type=_int_list, default=None,
                   help='Comma-separated participants whose channels Eve attacks. '
                   'Defaults to all of them.')
    p.add_argument('--dishonest-party', type=int, default=1,
                   help='The dishonest participant, for --model dishonest.')
    p.add_argument('--table-path', type=str, default=None,
                   help='Load tables from this file instead of generating them.')
    p.add_argument('--format', choices=FORMATS, default='text')

    p = sub.add_parser('entropy', parents=[common, coeffs],
                       help="Evaluate the closed-form entropies of Eve's and a "
                       "dishonest participant's density operators.")
    p.add_argument('--n', type=int, default=2,
                   help='Number of participants N.')
    p.add_argument('--format', choices=FORMATS, default='text')

    p = sub.add_parser('sweep', parents=[common],
                       help='Tabulate the entropies over a grid of a^2.',
                       description='CSV output has the columns: ' + ','.join(SWEEP_COLUMNS))
    p.add_argument('--points', type=int, default=19,
                   help='Grid size; a^2 takes the values k/(points+1), k = 1..points.')
    p.add_argument('--n-values', type=_int_list, default=(2, 3, 4, 5),
                   help='Comma-separated values of N.')
    p.add_argument('--format', choices=('csv', 'structured'), default='csv')

    return parser.parse_args(argv)

def build_config(args):
    '''
    Turn parsed arguments into a validated :class:`RunConfig`.
    '''
    kwargs = {
        'command': args.command,
        'output_path': args.output_path,
        'format': getattr(args, 'format', 'structured'),
    }
    for name in ('n', 'trials', 'seed', 'table_path', 'targets', 'dishonest_party',
                 'points', 'n_values', 'transcripts'):
        if hasattr(args, name):
            kwargs[name] = getattr(args, name)
    if hasattr(args, 'a2'):
        kwargs['a_squared'] = args.a2
    if hasattr(args, 'model'):
        kwargs['eve_model'] = args.model

    if args.command == 'gen-tables':
        kwargs['format'] = 'structured'
    if args.command == 'sweep':
        validate.positive_int(args.points, 'points')
        kwargs['n_values'] = tuple(validate.positive_int(N, 'N', minimum=2)
                                   for N in args.n_values)
        if not kwargs['n_values']:
            raise ValueError('--n-values must name at least one N')

    return RunConfig(**kwargs)

def _load_or_generate(cfg):
    if cfg.table_path is None:
        return generate_tables(cfg.n, cfg.seed)
    ts = load_tables(cfg.table_path)
    if ts.n != cfg.n:
        raise ProtocolError('table file %s is for n=%d, but --n is %d'
                            % (cfg.table_path, ts.n, cfg.n))
    return ts

def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_gen_tables(cfg):
    ts = generate_tables(cfg.n, cfg.seed)
    save_tables(ts, cfg.output_path, meta=meta(cfg))
    log.info('wrote tables for n=%d (digest %s)', ts.n, ts.digest())

def cmd_run(cfg):
    ts = _load_or_generate(cfg)
    transcripts, summary = run_rounds(cfg.n, ts, cfg.coeffs, cfg.trials, cfg.seed)

    if cfg.format == 'structured':
        doc = {
            'meta': meta(cfg),
            'table_set': {'generation_seed': ts.generation_seed, 'digest': ts.digest()},
            'summary': summary.to_dict(),
        }
        if cfg.transcripts:
            doc['transcripts'] = [t.to_dict() for t in transcripts]
        write_document(doc, cfg.output_path)
        return

    s = summary.to_dict()
    lines = [
        'n: %d, seed: %d, tables: %s' % (cfg.n, cfg.seed, ts.digest()[:16]),
        'rounds: %d' % s['rounds'],
        'correct: %d' % s['correct'],
        'wrong: %d' % s['wrong'],
        'abort: %d (captured %d, inconclusive %d)' % (
            s['abort'], s['abort_by_cause']['captured'],
            s['abort_by_cause']['inconclusive']),
    ]
    write_text('\n'.join(lines) + '\n', cfg.output_path)

def _scenario(cfg):
    if cfg.eve_model == 'dishonest':
        return DishonestModel(cfg.dishonest_party)
    strategy = EveStrategy(cfg.eve_model)
    if cfg.targets is None:
        return EveModel.on_all_channels(strategy, cfg.n)
    return EveModel(strategy, frozenset(cfg.targets))

def cmd_attack(cfg):
    ts = _load_or_generate(cfg)
    report = monte_carlo(_scenario(cfg), cfg.n, cfg.trials, cfg.seed,
                         coeffs=cfg.coeffs, ts=ts)

    if cfg.format == 'structured':
        write_document({'meta': meta(cfg), 'report': report.to_dict()}, cfg.output_path)
    elif cfg.format == 'csv':
        write_text(csv_header() + report.csv_row(), cfg.output_path)
    else:
        lines = ['model: %s (n=%d, trials=%d, seed=%d)'
                 % (report.model, report.n, report.trials, report.seed)]
        for name, (rate, se) in report.rates().items():
            if rate is not None:
                lines.append('%s_rate: %.6f +/- %.6f' % (name, rate, se))
        write_text('\n'.join(lines) + '\n', cfg.output_path)

def entropy_values(coeffs, N):
    '''
    Every entropy figure for one (coefficients, N) point, closed form and
    eigenvalue route side by side.
    '''
    return {
        'eve_entropy': eve_entropy(coeffs, N),
        'eve_entropy_eigen': dm_entropy(eve_density_matrix(coeffs, N)),
        'dishonest_entropy': dishonest_entropy(coeffs),
        'dishonest_entropy_eigen': dm_entropy(dishonest_density_matrix(coeffs)),
        'eve_entropy_normalized': normalized_eve_entropy(coeffs, N),
        'dishonest_entropy_normalized': normalized_dishonest_entropy(coeffs),
    }

def cmd_entropy(cfg):
    values = entropy_values(cfg.coeffs, cfg.n)

    if cfg.format == 'structured':
        write_document({'meta': meta(cfg), 'entropy': values}, cfg.output_path)
    elif cfg.format == 'csv':
        row = [str(cfg.a_squared), cfg.n] + [repr(values[c]) for c in SWEEP_COLUMNS[2:]]
        write_text(_csv_text(SWEEP_COLUMNS, [row]), cfg.output_path)
    else:
        lines = [
            'a^2 = %s, N = %d' % (cfg.a_squared, cfg.n),
            'eve_entropy: %.12g bits (closed form), %.12g (eigenvalue route)'
            % (values['eve_entropy'], values['eve_entropy_eigen']),
            'dishonest_entropy: %.12g bits (closed form), %.12g (eigenvalue route)'
            % (values['dishonest_entropy'], values['dishonest_entropy_eigen']),
            'normalized: eve %.12g, dishonest %.12g'
            % (values['eve_entropy_normalized'], values['dishonest_entropy_normalized']),
        ]
        write_text('\n'.join(lines) + '\n', cfg.output_path)

def sweep_grid(points):
    '''
    The values :math:`k/(points+1)` for :math:`k = 1 \\ldots points`.
    '''
    return [Fraction(k, points+1) for k in range(1, points+1)]

def cmd_sweep(cfg):
    rows = []
    for a2 in sweep_grid(cfg.points):
        coeffs = SecretCoefficients.from_a_squared(a2)
        for N in cfg.n_values:
            values = entropy_values(coeffs, N)
            rows.append((a2, N, values))

    if cfg.format == 'structured':
        doc = {
            'meta': meta(cfg),
            'rows': [dict(values, a_squared=str(a2), N=N) for a2, N, values in rows],
        }
        write_document(doc, cfg.output_path)
        return

    table = [[str(a2), N] + [repr(values[c]) for c in SWEEP_COLUMNS[2:]]
             for a2, N, values in rows]
    write_text(_csv_text(SWEEP_COLUMNS, table), cfg.output_path)


COMMAND_HANDLERS = {
    'gen-tables': cmd_gen_tables,
    'run': cmd_run,
    'attack': cmd_attack,
    'entropy': cmd_entropy,
    'sweep': cmd_sweep,
}

def main(argv=None):
    '''
    Entry point of the ``parallax`` command.

    Returns
    -------
    int
        The exit code: 0 on success, 2 on invalid input or configuration
    '''
    args = parse_args(argv)

    saved = config.as_dict()
    try:
        setup_logging(args.verbosity)
        if args.rng_algorithm is not None:
            config.rng_algorithm = args.rng_algorithm
        if args.workers is not None:
            config.workers = args.workers

        cfg = build_config(args)
        log.debug('running %s with %s', cfg.command, cfg.to_dict())
        COMMAND_HANDLERS[cfg.command](cfg)

    except (ValueError, OSError, ProtocolError) as e:
        log.debug('command failed', exc_info=True)
        print('parallax: error: %s' % e, file=sys.stderr)
        return 2

    finally:
        for key, value in saved.items():
            setattr(config, key, value)

    return 0

if __name__ == '__main__':
    sys.exit(main())
