"""A command line interface for the package's experiments.

It can be used by invoking burgess as a module (``python3 -m burgess``) or
by running the ``pyburgess`` script installed with the package.

Every command takes its parameters from flags, a JSON file given with
``--config`` and built-in defaults, in that order of precedence, and can
print plain text, ``--json`` or ``--csv``. Exit codes: ``0`` success or
an affirmative answer, ``1`` a negative answer, ``2`` a usage error, ``3``
an indeterminate answer and ``4`` an exceeded budget.
"""

import argparse
import contextlib
import logging
import re
import sys
import time
import typing as t

from types import SimpleNamespace

import burgess

from burgess import BudgetExceeded, records

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3
EXIT_BUDGET = 4

Result = t.Dict[str, t.Any]

#: Parameters every command records.
COMMON = {
    'enumeration_budget': 10 ** 9,
    'mitm_budget': 10 ** 7,
    'timing': False,
}

SYSTEM = {'standard': None, 'ack': None, 'custom': None, 'system': None}

#: Built-in defaults per command.
DEFAULTS = {
    'system': dict(SYSTEM),
    'admissible': {'q': None, 'order': 2, 'form': None, 'n': None,
                   'method': None},
    'jr': dict(SYSTEM, r=None, X=None, method='mitm', slope=False),
    'charsum': {'q': None, 'order': 2, 'form': None, 'phase': '0',
                'N': None, 'H': None, 'collection': None},
    'stratify': dict(SYSTEM, q=None, order=2, form=None, r=None, k=None,
                     C=1.0, C2=1, samples=None, seed=None),
    'verify-prod-lemma': dict(SYSTEM, n=None, d=None, r=None, K=None,
                              Q=None, exhaustive=False, oracle=None,
                              samples=1000, seed=0),
    'verify-b-sum': {'n': None, 'r': None, 'q': None, 'K1': None,
                     'trials': 1000, 'seed': 0, 'random': False},
    'exponents': dict(SYSTEM, n=None, d=None, r=None, epsilon='0',
                      alpha=None),
    'delta': {'n': None, 'd': None, 'kappa': None, 'r': None,
              'strategy': 'heuristic'},
    'window': {'n': None, 'd': None, 'r': None, 'q': None, 'H': None,
               'beta': None, 'mu': None},
    'sample-t': dict(SYSTEM, q=None, order=2, form=None, N=None, H=None,
                     samples=None, seed=None, probe=None),
}  # type: t.Dict[str, t.Dict[str, t.Any]]


@contextlib.contextmanager
def timer(args: argparse.Namespace) -> t.Iterator[SimpleNamespace]:
    begin = time.monotonic()
    ns = SimpleNamespace(begin=begin, end=None, time=None)
    try:
        yield ns
    finally:
        ns.end = time.monotonic()
        ns.time = ns.end - ns.begin
    if args.verbose:
        print("Done after {:.3g} seconds.".format(ns.time), file=sys.stderr)


def open_write(fname: str) -> t.TextIO:
    if fname == '-':
        return sys.stdout
    return open(fname, 'w')


class UsageError(ValueError):
    pass


def int_list(text: str) -> t.List[int]:
    """``"2,3"`` or ``"2 3"`` as ``[2, 3]``."""
    try:
        return [int(v) for v in re.split(r"[,\s]+", text.strip()) if v]
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected integers separated by commas, got {!r}".format(text)
        )


def points_list(text: str) -> t.List[t.List[int]]:
    """``"1,1;2,2"`` as ``[[1, 1], [2, 2]]``."""
    return [int_list(part) for part in text.split(";") if part.strip()]


def _flatten(values: t.Any) -> t.Any:
    if isinstance(values, list) and values and isinstance(values[0], list):
        return [v for chunk in values for v in chunk]
    return values


def _need(config: records.ExperimentConfig, *names: str) -> None:
    missing = [name for name in names if config[name] is None]
    if missing:
        raise UsageError("Missing parameter(s): {}".format(
            ", ".join(missing)
        ))


def _system(config: records.ExperimentConfig) -> t.Any:
    from burgess.systems import ack_system, parse_descriptor, standard_system

    given = [k for k in SYSTEM if config[k] is not None]
    if len(given) != 1:
        raise UsageError("Give exactly one of --standard, --ack, --custom "
                         "and --system")
    key = given[0]
    value = config[key]
    if key == 'standard':
        n, d = value
        return standard_system(int(n), int(d))
    if key == 'ack':
        caps, k = value
        return ack_system(int_list(str(caps)), int(k))
    if key == 'custom':
        return parse_descriptor("custom{" + value + "}")
    return parse_descriptor(value)


def _variables_in(text: str) -> int:
    indices = [int(i) for i in re.findall(r"x(\d+)", text)]
    return max(indices, default=1)


def _form(text: str, n: t.Optional[int] = None) -> t.Any:
    from burgess.polytext import loads

    if n is None:
        n = _variables_in(text)
        log.info("Reading %r in %d variable(s)", text, n)
    return loads(text, n)


def _character(config: records.ExperimentConfig) -> t.Any:
    from burgess.ff_core import build_character

    return build_character(int(config['q']), int(config['order']))


def cmd_system(config: records.ExperimentConfig) -> Result:
    from burgess.systems import is_tdi

    G = _system(config)
    tdi = bool(is_tdi(G))
    data = dict(G.as_dict(), tdi=tdi)
    text = "\n".join([
        G.descriptor(),
        "exponents: {}".format(" ".join(
            "(" + ",".join(map(str, beta)) + ")" for beta in G.exponents
        )),
        "R={} M={} d={} TDI={}".format(G.R, G.M, G.d,
                                       "yes" if tdi else "no"),
    ])
    return {
        'data': data,
        'text': text,
        'header': ['system', 'n', 'R', 'M', 'd', 'tdi'],
        'rows': [[G.descriptor(), G.n, G.R, G.M, G.d, int(tdi)]],
        'exit': EXIT_OK,
    }


def cmd_admissible(config: records.ExperimentConfig) -> Result:
    from burgess.admissible import INDETERMINATE, NO, is_admissible
    from burgess.polyalg import DegreeTooLarge

    _need(config, 'q', 'order', 'form')
    q, order = int(config['q']), int(config['order'])
    F = _form(config['form'], config['n'])
    try:
        report = is_admissible(F, q, order, config['method'])
    except DegreeTooLarge as exc:
        data = {'admissible': INDETERMINATE, 'power_free_part': None,
                'witness': None, 'method': config['method'],
                'reason': str(exc)}
        return {
            'data': data,
            'text': "indeterminate: {}".format(exc),
            'header': ['q', 'order', 'form', 'admissible', 'witness'],
            'rows': [[q, order, str(F), INDETERMINATE, '']],
            'exit': EXIT_UNKNOWN,
        }
    data = dict(report.as_dict(), n=F.n)
    witness = ("" if report.witness is None
               else ",".join(map(str, report.witness)))
    if report.admissible == NO:
        text = "not admissible: h = {} is invariant along ({})".format(
            report.power_free_part, witness
        )
    else:
        text = "admissible: h = {}".format(report.power_free_part)
    return {
        'data': data,
        'text': text,
        'header': ['q', 'order', 'form', 'admissible', 'witness'],
        'rows': [[q, order, str(F), report.admissible, witness]],
        'exit': EXIT_NO if report.admissible == NO else EXIT_OK,
    }


def cmd_jr(config: records.ExperimentConfig) -> Result:
    from burgess import vinogradov

    _need(config, 'r', 'X')
    G = _system(config)
    r = int(config['r'])
    X = config['X']
    xs = [int(x) for x in (_flatten(X) if isinstance(X, list) else [X])]
    methods = {
        'mitm': [vinogradov.jr_mitm],
        'bruteforce': [vinogradov.jr_bruteforce],
        'both': [vinogradov.jr_bruteforce, vinogradov.jr_mitm],
    }[config['method']]
    timing = bool(config['timing'])
    results = [count(G, r, X) for X in xs for count in methods]
    data = {'counts': [c.as_dict(timing) for c in results]}
    header = ['system', 'r', 'X', 'J', 'method']
    if timing:
        header.append('seconds')
    lines = ["J_{}({}, {}) = {} [{}]".format(r, c.system, c.X, c.J, c.method)
             for c in results]
    exit_code = EXIT_OK
    if any(len({c.J for c in results if c.X == x}) > 1 for x in xs):
        lines.append("methods disagree")
        exit_code = EXIT_NO
    if config['slope']:
        method = results[-1].method
        slope = vinogradov.slope_check(
            G, r, [c.X for c in results if c.method == method], method
        )
        data['slope'] = slope.slope
        data['predicted'] = (None if slope.predicted is None
                             else str(slope.predicted))
        lines.append("slope {:.4f}, predicted {}".format(
            slope.slope, data['predicted']
        ))
    return {
        'data': data,
        'text': "\n".join(lines),
        'header': header,
        'rows': [list(c.row(timing)) for c in results],
        'exit': exit_code,
    }


def cmd_charsum(config: records.ExperimentConfig) -> Result:
    from burgess.charsums import (
        BoxRegion,
        Collection,
        complete_mult_sum,
        mixed_sum,
    )

    _need(config, 'q', 'form')
    chi = _character(config)
    if config['collection'] is not None:
        collection = Collection(config['collection'])
        F = _form(config['form'], collection.n)
        value = complete_mult_sum(F, collection, chi)
        kind = 'complete'
    else:
        _need(config, 'H')
        H = [int(h) for h in config['H']]
        N = [int(v) for v in config['N'] or [0] * len(H)]
        F = _form(config['form'], len(H))
        g = _form(config['phase'], len(H))
        value = mixed_sum(F, g, chi, BoxRegion.make(N, H))
        kind = 'mixed'
    data = {'kind': kind, 'real': value.real, 'imag': value.imag,
            'abs': abs(value)}
    return {
        'data': data,
        'text': "{} sum = {!r} (|S| = {!r})".format(kind, value, abs(value)),
        'header': ['kind', 'real', 'imag', 'abs'],
        'rows': [[kind, repr(value.real), repr(value.imag),
                  repr(abs(value))]],
        'exit': EXIT_OK,
    }


def cmd_stratify(config: records.ExperimentConfig) -> Result:
    from burgess.charsums import stratify_audit

    _need(config, 'q', 'form', 'r', 'k')
    G = _system(config)
    chi = _character(config)
    F = _form(config['form'], G.n)
    strata = stratify_audit(
        F, chi, G, int(config['r']), [int(v) for v in config['k']],
        C=float(config['C']), C2=config['C2'], samples=config['samples'],
        seed=config['seed'],
    )
    rows = [[j, repr(level), count,
             "" if ceiling is None else repr(ceiling),
             "" if ratio is None else repr(ratio)]
            for j, level, count, ceiling, ratio in strata.rows()]
    lines = []
    for j, level, count, ceiling, ratio in strata.rows():
        line = "j={} threshold={:.6g} count={}".format(j, level, count)
        if ceiling is not None:
            line += " ceiling={:.6g} ratio={:.6g}".format(ceiling, ratio)
        lines.append(line)
    text = "\n".join(lines)
    return {
        'data': strata.as_dict(),
        'text': text,
        'header': ['j', 'threshold', 'count', 'ceiling', 'ratio'],
        'rows': rows,
        'exit': EXIT_OK,
    }


def cmd_verify_prod_lemma(config: records.ExperimentConfig) -> Result:
    from burgess.charsums import IdentityViolation, verify_prod_lemma
    from burgess.systems import standard_system

    _need(config, 'r', 'K')
    if all(config[k] is None for k in SYSTEM):
        _need(config, 'n', 'd')
        G = standard_system(int(config['n']), int(config['d']))
    else:
        G = _system(config)
    exhaustive = bool(config['exhaustive'])
    oracle = exhaustive if config['oracle'] is None else config['oracle']
    try:
        report = verify_prod_lemma(
            G, int(config['K']), int(config['r']),
            Q=None if config['Q'] is None else int(config['Q']),
            exhaustive=exhaustive, samples=int(config['samples']),
            seed=int(config['seed']), oracle=bool(oracle),
        )
    except IdentityViolation as exc:
        return {
            'data': {'status': 'FAIL', 'reason': str(exc),
                     'collection': exc.collection.as_list()},
            'text': "FAIL {} at {}".format(exc, exc.collection.as_list()),
            'header': ['status', 'reason'],
            'rows': [['FAIL', str(exc)]],
            'exit': EXIT_NO,
        }
    return {
        'data': report.as_dict(),
        'text': report.summary(),
        'header': ['status', 'checked', 'passed', 'Q', 'threshold',
                   'wraparound', 'vertex_terms'],
        'rows': [[report.status, report.checked, report.passed, report.Q,
                  report.threshold, len(report.wraparound),
                  report.vertex_terms]],
        'exit': EXIT_OK,
    }


def cmd_verify_b_sum(config: records.ExperimentConfig) -> Result:
    from burgess.bsum import (
        InequalityViolation,
        sample_b_sum_cases,
        verify_b_sum_lemma,
    )

    seed = int(config['seed'])
    try:
        if config['random']:
            report = sample_b_sum_cases(int(config['trials']), seed)
        else:
            _need(config, 'n', 'r', 'q', 'K1')
            report = verify_b_sum_lemma(
                int(config['n']), int(config['r']), int(config['q']),
                int(config['K1']), int(config['trials']), seed,
            )
    except InequalityViolation as exc:
        return {
            'data': {'status': 'FAIL', 'reason': str(exc),
                     'sample': list(exc.sample)},
            'text': "FAIL {} at {}".format(exc, exc.sample),
            'header': ['status', 'reason'],
            'rows': [['FAIL', str(exc)]],
            'exit': EXIT_NO,
        }
    return {
        'data': dict(report.as_dict(), status='PASS'),
        'text': "PASS {}/{} ({} skipped)".format(
            report.passed, report.checked - len(report.skipped),
            len(report.skipped)
        ),
        'header': ['status', 'checked', 'passed', 'skipped', 'seed'],
        'rows': [['PASS', report.checked, report.passed,
                  len(report.skipped), seed]],
        'exit': EXIT_OK,
    }


def cmd_exponents(config: records.ExperimentConfig) -> Result:
    from burgess.calc import exponent_report, tdi_theorem_report

    _need(config, 'r')
    if all(config[k] is None for k in SYSTEM):
        _need(config, 'n', 'd')
        report = exponent_report(
            int(config['n']), int(config['d']), int(config['r']),
            epsilon=config['epsilon'], alpha=config['alpha'],
        )
    else:
        G = _system(config)
        report = tdi_theorem_report(G, G.n, int(config['r']))
    data = report.as_dict()
    flat = {k: v['exact'] if isinstance(v, dict) else v
            for k, v in data.items() if not isinstance(v, list)}
    header = sorted(flat)
    return {
        'data': data,
        'text': report.table(),
        'header': header,
        'rows': [[flat[k] for k in header]],
        'exit': EXIT_OK if report.valid else EXIT_NO,
    }


def cmd_delta(config: records.ExperimentConfig) -> Result:
    from burgess.calc import delta_savings, savings_profile
    from burgess.util import fraction_text

    _need(config, 'n', 'd', 'kappa')
    n, d = int(config['n']), int(config['d'])
    savings = delta_savings(
        n, d, config['kappa'],
        None if config['r'] is None else int(config['r']),
        config['strategy'],
    )
    profile = savings_profile(n, d, config['kappa'])
    data = {
        'r': savings.r,
        'theta': savings.theta,
        'delta': {'exact': fraction_text(savings.delta),
                  'value': float(savings.delta)},
        'kappa': fraction_text(savings.kappa),
        'continuous_argmax': profile.argmax,
        'strategy': config['strategy'],
    }
    return {
        'data': data,
        'text': "r*={} delta={} ({:.4g}), continuous argmax {:.4f}".format(
            savings.r, fraction_text(savings.delta), float(savings.delta),
            profile.argmax,
        ),
        'header': ['n', 'd', 'kappa', 'r', 'delta', 'delta_value'],
        'rows': [[n, d, fraction_text(savings.kappa), savings.r,
                  fraction_text(savings.delta), repr(float(savings.delta))]],
        'exit': EXIT_OK,
    }


def cmd_window(config: records.ExperimentConfig) -> Result:
    from burgess.calc import EmptyWindow, p_window

    _need(config, 'n', 'd', 'r', 'q')
    header = ['lower', 'upper', 'hp_below_q', 'p_below_cap']
    try:
        window = p_window(
            int(config['n']), int(config['d']), int(config['r']),
            int(config['q']),
            H=None if config['H'] is None else float(config['H']),
            beta=config['beta'],
            mu=None if config['mu'] is None else int(config['mu']),
        )
    except EmptyWindow as exc:
        return {
            'data': {'empty': True, 'reason': str(exc)},
            'text': "empty window: {}".format(exc),
            'header': header,
            'rows': [],
            'exit': EXIT_NO,
        }
    return {
        'data': dict(window.as_dict(), empty=False),
        'text': "{:.6g} <= P < {:.6g} (HP < q: {}, P <= H q^(-1/2Theta): "
                "{})".format(window.lower, window.upper, window.hp_below_q,
                             window.p_below_cap),
        'header': header,
        'rows': [[repr(window.lower), repr(window.upper),
                  int(window.hp_below_q), int(window.p_below_cap)]],
        'exit': EXIT_OK,
    }


def cmd_sample_t(config: records.ExperimentConfig) -> Result:
    from burgess.charsums import BoxRegion
    from burgess.sampling import Probe, sample_T

    _need(config, 'q', 'form', 'H', 'samples', 'seed')
    G = _system(config)
    chi = _character(config)
    H = [int(h) for h in config['H']]
    N = [int(v) for v in config['N'] or [0] * len(H)]
    F = _form(config['form'], G.n)
    probes = [
        Probe(_form(g_text, G.n), tuple(int_list(sides)))
        for g_text, sides in config['probe'] or []
    ]
    estimate = sample_T(F, G, chi, BoxRegion.make(N, H),
                        int(config['samples']), int(config['seed']), probes)
    return {
        'data': estimate.as_dict(),
        'text': "T >= {!r} (estimate from {} samples, seed {})".format(
            estimate.estimate, estimate.samples, estimate.seed
        ),
        'header': ['samples', 'seed', 'estimate', 'best_g', 'best_K'],
        'rows': [[estimate.samples, estimate.seed, repr(estimate.estimate),
                  estimate.best_g, " ".join(map(str, estimate.best_K))]],
        'exit': EXIT_OK,
    }


COMMANDS = {
    'system': cmd_system,
    'admissible': cmd_admissible,
    'jr': cmd_jr,
    'charsum': cmd_charsum,
    'stratify': cmd_stratify,
    'verify-prod-lemma': cmd_verify_prod_lemma,
    'verify-b-sum': cmd_verify_b_sum,
    'exponents': cmd_exponents,
    'delta': cmd_delta,
    'window': cmd_window,
    'sample-t': cmd_sample_t,
}  # type: t.Dict[str, t.Callable[[records.ExperimentConfig], Result]]


def build_config(args: argparse.Namespace) -> records.ExperimentConfig:
    command = args.command
    defaults = dict(COMMON, **DEFAULTS[command])
    file_values = ({} if args.config is None
                   else records.load_config_file(args.config, command))
    flags = {k: getattr(args, k, None) for k in defaults}
    return records.ExperimentConfig.merge(command, defaults, file_values,
                                          flags)


def run(args: argparse.Namespace) -> int:
    config = build_config(args)
    cache = records.ResultCache.from_env(args.cache_dir, args.no_cache)
    result = cache.get(config)
    if result is None:
        with timer(args), burgess.config(
            threads=args.threads,
            enumeration_budget=int(config['enumeration_budget']),
            mitm_budget=int(config['mitm_budget']),
        ):
            result = COMMANDS[config.command](config)
        result = records.canonical(result)
        cache.put(config, result)
    emit(args, config, result)
    return int(result['exit'])


def emit(
    args: argparse.Namespace,
    config: records.ExperimentConfig,
    result: Result,
) -> None:
    with contextlib.ExitStack() as stack:
        out = open_write(args.output)
        if out is not sys.stdout:
            stack.enter_context(out)
        if args.json:
            out.write(records.dumps({'config': config.as_dict(),
                                     'result': result['data']}))
        elif args.csv:
            out.write(records.csv_text(result['header'], result['rows']))
        else:
            out.write(result['text'] + "\n")


def _common_parser(suppress: bool = False) -> argparse.ArgumentParser:
    """Flags every command takes.

    With ``suppress`` unset flags are left out of the namespace, so a
    subcommand doesn't reset what was given before its name.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help="Log progress to stderr (twice for debug).")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument('--json', action='store_true',
                     help="Print the config and result as JSON.")
    fmt.add_argument('--csv', action='store_true', help="Print CSV rows.")
    common.add_argument('-o', '--output', default='-',
                        help="Write the output here instead of stdout.")
    common.add_argument('--threads', type=int, default=1,
                        help="Worker threads. Doesn't change any result.")
    common.add_argument('--config', default=None,
                        help="A JSON file with parameters.")
    common.add_argument('--cache-dir', default=None,
                        help="Cache results here (default: ${}).".format(
                            records.CACHE_ENV))
    common.add_argument('--no-cache', action='store_true',
                        help="Neither read nor write the cache.")
    common.add_argument('--timing', action='store_const', const=True,
                        default=None, help="Include wall times.")
    common.add_argument('--budget', dest='enumeration_budget', type=int,
                        default=None, help="Enumeration budget in terms.")
    common.add_argument('--mitm-budget', type=int, default=None,
                        help="Meet-in-the-middle budget in r-tuples.")
    if suppress:
        for action in common._actions:
            action.default = argparse.SUPPRESS
    return common


def _add_system_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("monomial system (give one)")
    group.add_argument('--standard', nargs=2, type=int, metavar=('N', 'D'),
                       help="All monomials of degree 1..D in N variables.")
    group.add_argument('--ack', nargs=2, metavar=('CAPS', 'K'),
                       help="Per-variable caps like 1,1 and a total cap.")
    group.add_argument('--custom', metavar='EXPONENTS',
                       help="Exponent vectors like '1,0;0,1;1,1'.")
    group.add_argument('--system', metavar='DESCRIPTOR',
                       help="A descriptor like 'standard(2,1)'.")


def _add_character_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('-q', type=int, help="The prime modulus.")
    parser.add_argument('-D', '--order', type=int,
                        help="The character order (default 2).")
    parser.add_argument('-F', '--form', help="The polynomial F as text.")


def main(argv: t.Sequence[str] = sys.argv[1:]) -> int:
    parser = argparse.ArgumentParser(prog='pyburgess',
                                     parents=[_common_parser()])
    local = _common_parser(suppress=True)
    subparsers = parser.add_subparsers(title="subcommands")

    def add(name: str, help: str, **kwargs: t.Any) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help, parents=[local],
                                    **kwargs)
        sub.set_defaults(command=name)
        return sub

    system_parser = add('system', "Describe a monomial system.")
    _add_system_arguments(system_parser)

    admissible_parser = add('admissible', "Test a form for admissibility.")
    _add_character_arguments(admissible_parser)
    admissible_parser.add_argument(
        '-n', type=int,
        help="Number of variables (default: the highest index in the form, "
             "so 'x1^2' is read in one variable)."
    )
    admissible_parser.add_argument(
        '--method', choices=['direction-search', 'gl-bruteforce'],
        help="Decision procedure."
    )

    jr_parser = add('jr', "Count solutions of a Vinogradov system.")
    _add_system_arguments(jr_parser)
    jr_parser.add_argument('-r', type=int, help="Half the tuple length.")
    jr_parser.add_argument('-X', type=int_list, nargs='+',
                           help="Box sides, e.g. 10 20 40.")
    jr_parser.add_argument('--method',
                           choices=['mitm', 'bruteforce', 'both'])
    jr_parser.add_argument('--slope', action='store_const', const=True,
                           help="Fit the log-log slope over X.")

    charsum_parser = add('charsum', "Evaluate a mixed or complete sum.")
    _add_character_arguments(charsum_parser)
    charsum_parser.add_argument('-g', '--phase', help="The phase g as text.")
    charsum_parser.add_argument('-N', type=int_list, help="Box offset.")
    charsum_parser.add_argument('-H', type=int_list, help="Box sides.")
    charsum_parser.add_argument(
        '--collection', type=points_list,
        help="Points like '1,1;2,2' for the complete sum."
    )

    stratify_parser = add('stratify', "Tally large complete sums.")
    _add_character_arguments(stratify_parser)
    _add_system_arguments(stratify_parser)
    stratify_parser.add_argument('-r', type=int)
    stratify_parser.add_argument('-k', type=int_list, help="Box sides.")
    stratify_parser.add_argument('-C', type=float,
                                 help="Threshold constant.")
    stratify_parser.add_argument('--C2', type=int, help="Ceiling constant.")
    stratify_parser.add_argument('--samples', type=int,
                                 help="Sample instead of enumerating.")
    stratify_parser.add_argument('--seed', type=int)

    verify_parser = subparsers.add_parser(
        'verify', help="Check an identity or inequality."
    )
    verify_sub = verify_parser.add_subparsers(title="checks")
    prod_parser = verify_sub.add_parser(
        'prod-lemma', parents=[local],
        help="The box sum identity on collections."
    )
    prod_parser.set_defaults(command='verify-prod-lemma')
    _add_system_arguments(prod_parser)
    prod_parser.add_argument('-n', type=int)
    prod_parser.add_argument('-d', type=int)
    prod_parser.add_argument('-r', type=int)
    prod_parser.add_argument('-K', type=int, help="Box side.")
    prod_parser.add_argument('-Q', type=int,
                             help="Partition parameter (default 2rK).")
    prod_parser.add_argument('--exhaustive', action='store_const',
                             const=True)
    prod_parser.add_argument('--oracle', action='store_const', const=True,
                             help="Also enumerate all vertices.")
    prod_parser.add_argument('--samples', type=int)
    prod_parser.add_argument('--seed', type=int)
    bsum_parser = verify_sub.add_parser(
        'b-sum', parents=[local], help="The B-sum inequality."
    )
    bsum_parser.set_defaults(command='verify-b-sum')
    bsum_parser.add_argument('-n', type=int)
    bsum_parser.add_argument('-r', type=int)
    bsum_parser.add_argument('-q', type=int)
    bsum_parser.add_argument('--K1', type=int, help="The smallest side.")
    bsum_parser.add_argument('--trials', type=int)
    bsum_parser.add_argument('--seed', type=int)
    bsum_parser.add_argument('--random', action='store_const', const=True,
                             help="Draw n, r, q and sides at random.")

    exponents_parser = add('exponents', "Exponents of the bound.")
    _add_system_arguments(exponents_parser)
    exponents_parser.add_argument('-n', type=int)
    exponents_parser.add_argument('-d', type=int)
    exponents_parser.add_argument('-r', type=int)
    exponents_parser.add_argument('--epsilon')
    exponents_parser.add_argument('--alpha',
                                  help="Conjectural Theta = floor(r/alpha).")

    delta_parser = add('delta', "Savings beyond the limiting exponent.")
    delta_parser.add_argument('-n', type=int)
    delta_parser.add_argument('-d', type=int)
    delta_parser.add_argument('--kappa')
    delta_parser.add_argument('-r', type=int)
    delta_parser.add_argument('--strategy', choices=['heuristic', 'optimal'])

    window_parser = add('window', "The admissible range of P.")
    window_parser.add_argument('-n', type=int)
    window_parser.add_argument('-d', type=int)
    window_parser.add_argument('-r', type=int)
    window_parser.add_argument('-q', type=int)
    window_group = window_parser.add_mutually_exclusive_group()
    window_group.add_argument('-H', type=float)
    window_group.add_argument('--beta', help="H = q^beta, e.g. 9/20.")
    window_parser.add_argument('--mu', type=int)

    sample_parser = add('sample-t', "Estimate the supremum of mixed sums.")
    _add_character_arguments(sample_parser)
    _add_system_arguments(sample_parser)
    sample_parser.add_argument('-N', type=int_list)
    sample_parser.add_argument('-H', type=int_list)
    sample_parser.add_argument('--samples', type=int)
    sample_parser.add_argument('--seed', type=int)
    sample_parser.add_argument(
        '--probe', nargs=2, action='append', metavar=('G', 'SIDES'),
        help="Also evaluate this phase on this sub-box."
    )

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if not hasattr(args, 'command'):
        parser.print_help()
        return EXIT_USAGE

    logging.basicConfig(
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[
            min(args.verbose, 2)
        ],
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return run(args)
    except BudgetExceeded as exc:
        print("Error: {}".format(exc), file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print("Error: {}".format(exc), file=sys.stderr)
        return EXIT_USAGE
