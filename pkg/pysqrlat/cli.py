# coding=utf-8
"""Command line front end: ``sqrlat <command> [options]``.

Exit codes: 0 on success, 1 when a mathematical verification fails,
2 on invalid input. Errors are written to stderr as a JSON object.
"""
import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import gausscomb, grouplab, hecke, idlat, numfield
from .common import Config, InvalidInputError, SqrlatError, VerificationError, setup_logging
from .hilbert import construct

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

CSV_COMMANDS = ('points', 'ellipsoid', 'coeffs')


class RunConfig(object):
    """Everything needed to repeat a run: command, arguments, seed and tolerances."""

    def __init__(self, command, arguments, seed, config):
        self.command = command
        self.arguments = dict(arguments)
        self.seed = seed
        self.config = config

    @classmethod
    def from_args(cls, args, config):
        arguments = {
            key: value
            for key, value in sorted(vars(args).items())
            if key not in ('handler', 'command')
        }
        return cls(args.command, arguments, args.seed, config)

    def as_dict(self):
        return {
            'command': self.command,
            'arguments': self.arguments,
            'seed': self.seed,
            'config': self.config.as_dict(),
        }


def _floats(text):
    try:
        return [float(v) for v in text.replace(' ', '').split(',') if v]
    except ValueError:
        raise InvalidInputError('malformed number list %r' % text)


def _ints(text):
    try:
        return [int(v) for v in text.replace(' ', '').split(',') if v]
    except ValueError:
        raise InvalidInputError('malformed integer list %r' % text)


def _complex(text):
    values = _floats(text)
    if len(values) != 2:
        raise InvalidInputError('expected "re,im", got %r' % text)
    return complex(values[0], values[1])


def _matrix(text):
    rows = [_floats(row) for row in text.split(';') if row.strip()]
    if not rows or any(len(row) != len(rows) for row in rows):
        raise InvalidInputError('expected a square matrix "a,b;c,d", got %r' % text)
    return np.array(rows)


def _field(args):
    if args.quadratic is not None:
        return numfield.make_quadratic_field(args.quadratic)
    if args.poly is not None:
        return numfield.make_monogenic_field(numfield.parse_polynomial(args.poly))
    raise InvalidInputError('give a field with --quadratic D or --poly COEFFS')


def _coords(x):
    return [str(c) for c in x.coords]


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


def _write_json(payload, path=None):
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
    if path:
        with open(path, 'w') as handle:
            handle.write(text + '\n')
    else:
        sys.stdout.write(text + '\n')


def cmd_field(args, config):
    field = _field(args)
    report = {
        'name': field.name,
        'degree': field.degree,
        'discriminant': field.discriminant,
        'polynomial': field.coeffs,
        'basis': [_coords(field.basis_element(i)) for i in range(field.degree)],
    }
    if field.degree == 2:
        report['omega'] = _coords(field.basis_element(1))
        report['fundamental_unit'] = _coords(numfield.fundamental_unit(field))
    return report, True


def cmd_points(args, config):
    field = _field(args)
    points = idlat.sqrt_points(idlat.inverse_different(field), args.m_max, config.threads)
    idlat.write_points_csv(points, args.out or sys.stdout)
    return {'points': len(points), 'levels': len(points.levels), 'out': args.out}, True


def _ellipsoid_data(args, field):
    if args.c is not None:
        c = field.element(_ints(args.c))
    else:
        c = field.one / numfield.sqrt_disc(field)
    a = None
    if args.a is not None:
        a = idlat.FractionalIdeal(field, [field.element(_ints(g)) for g in args.a.split(';')])
    return c, a


def cmd_ellipsoid(args, config):
    field = _field(args)
    c, a = _ellipsoid_data(args, field)
    a = a if a is not None else idlat.ring_of_integers(field)
    points = idlat.ellipsoid_points(c, a, args.level_max, config.threads)
    idlat.write_points_csv(points, args.out or sys.stdout)
    return {'points': len(points), 'levels': len(points.levels), 'out': args.out}, True


def _dims(text, degree):
    return tuple(_ints(text)) if text else (1,) * degree


def cmd_nonuniq(args, config):
    field = _field(args)
    pipeline = construct.SphereConstruction(
        field,
        _dims(args.dims, field.degree),
        args.eps,
        args.verify_level,
        seed=args.seed,
        config=config,
        debuglevel=args.debug,
    )
    report = pipeline.run()
    report['function'] = gausscomb.to_json(pipeline.result)
    return report, report['passed']


def cmd_nonuniq2(args, config):
    field = _field(args)
    c, a = _ellipsoid_data(args, field)
    pipeline = construct.EllipsoidConstruction(
        c, a, args.eps, args.verify_level, seed=args.seed, config=config, debuglevel=args.debug
    )
    report = pipeline.run()
    report['function'] = gausscomb.to_json(pipeline.result)
    return report, report['passed']


def cmd_count(args, config):
    field = _field(args)
    levels = _ints(args.levels) if args.levels else None
    rows = idlat.count_vs_asymptotic(
        idlat.inverse_different(field), args.m_max, levels=levels, threads=config.threads
    )
    return {
        'field': field.name,
        'rows': [
            {'m': m, 'count': count, 'asymptotic': lead, 'ratio': ratio}
            for m, count, lead, ratio in rows
        ],
    }, True


def cmd_relation(args, config):
    field = _field(args)
    u = numfield.search_units(field, 5)
    beta = (u - 1) / 5
    found = grouplab.verify_relation(field, beta)
    report = {
        'field': field.name,
        'unit': _coords(u),
        'beta': _coords(beta),
        'relation_found': found,
        'word': [{'kind': kind, 'exponent': _coords(e)} for kind, e in grouplab.relation_word(beta)],
    }
    return report, found


def cmd_commutators(args, config):
    first = grouplab.Lattice.from_basis(_matrix(args.basis1))
    second = grouplab.Lattice.from_basis(_matrix(args.basis2 or args.basis1))
    pair = grouplab.LatticePair(first, second)
    sequence = grouplab.commutator_sequence(pair, _floats(args.x0), args.k_max)
    return {
        'commutators': grouplab.probe_report(None, 0, sequence)['commutators'],
        'property_I': [bool(pair.has_property_I(1)[0]), bool(pair.has_property_I(2)[0])],
    }, True


def cmd_probe(args, config):
    if args.quadratic is not None or args.poly is not None:
        field = _field(args)
        lattice = grouplab.Lattice.from_ideal(idlat.ring_of_integers(field), 2)
        pair = grouplab.LatticePair(lattice, lattice)
        beta = (numfield.search_units(field, 5) - 1) / 5
        word = grouplab.relation_word(beta)
        box = ([e for k, e in word if k == 'T'], [e for k, e in word if k == 'V'])
    else:
        lattice = grouplab.Lattice.from_basis([[args.lam]])
        pair = grouplab.LatticePair(lattice, lattice)
        box = args.box
    found = grouplab.free_product_probe(pair, args.depth, generator_box=box, threads=config.threads)
    return grouplab.probe_report(found, args.depth), True


def _series_config(args, config):
    return hecke.SeriesConfig.from_dimension(
        args.d,
        lam=args.lam,
        max_syllables=args.N,
        max_exponent=args.B,
        threshold=args.threshold,
        quadrature_points=args.M,
        tolerance=args.tolerance,
        threads=config.threads,
    )


def cmd_interp(args, config):
    series = _series_config(args, config)
    pipeline = hecke.InterpolationCheck(
        series, _complex(args.tau), _floats(args.radii), args.nmax, debuglevel=args.debug
    )
    report = pipeline.run()
    return report, report['passed']


def cmd_coeffs(args, config):
    series = _series_config(args, config)
    n_values = list(range(args.n_min, args.n_max + 1))
    radii = _floats(args.radii)
    a, at = hecke.coefficients(series, n_values, radii)
    handle = open(args.out, 'w', newline='') if args.out else sys.stdout
    try:
        writer = csv.writer(handle)
        writer.writerow(['n', 'r', 're_a', 'im_a', 're_atilde', 'im_atilde'])
        for i, n in enumerate(n_values):
            for j, r in enumerate(radii):
                writer.writerow(
                    [n, '%.17g' % r]
                    + ['%.17g' % v for v in (a[i, j].real, a[i, j].imag, at[i, j].real, at[i, j].imag)]
                )
    finally:
        if args.out:
            handle.close()
    return {'coefficients': len(n_values) * len(radii), 'out': args.out}, True


def cmd_bounds(args, config):
    z = [1j * y for y in _floats(args.y)]
    report = hecke.U_bounds(args.kappa, args.lam, z, max_syllables=args.N, threshold=args.threshold)
    if args.fit_n:
        series = _series_config(args, config)
        report['uniform'] = hecke.uniform_bound_fit(series, _ints(args.fit_n), _floats(args.radii))
    return report, report['proof_bound_holds']


def cmd_word_lemma(args, config):
    lambdas = _floats(args.lambdas)
    series = hecke.SeriesConfig(lam=max(lambdas), max_syllables=args.N, max_exponent=args.B)
    report = hecke.check_word_lemma(series, lambdas, seed=args.seed)
    report['pingpong'] = [hecke.pingpong_certificate(lam) for lam in lambdas]
    passed = report['passed'] and all(p['passed'] for p in report['pingpong'])
    return report, passed


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors become InvalidInputError and leave through the JSON error path."""

    def error(self, message):
        raise InvalidInputError('%s: %s' % (self.prog, message))


def _field_options(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument('--quadratic', type=int, metavar='D', help='real quadratic field of discriminant D')
    group.add_argument('--poly', metavar='COEFFS', help='monogenic field, coefficients highest degree first')


def _series_options(parser, d=8):
    parser.add_argument('--d', type=int, default=d, help='dimension, weight k = d/2')
    parser.add_argument('--lambda', dest='lam', type=float, default=2.5)
    parser.add_argument('--N', type=int, default=10, help='maximal number of syllables')
    parser.add_argument('--B', type=int, default=None, help='maximal exponent')
    parser.add_argument('--threshold', type=float, default=1e6, help='pruning bound on c^2 + d^2')
    parser.add_argument('--M', type=int, default=64, help='initial quadrature points')
    parser.add_argument('--tolerance', type=float, default=1e-8)


def build_parser():
    parser = ArgumentParser(prog='sqrlat', description=__doc__.splitlines()[0])
    parser.add_argument('-v', '--verbose', action='count', default=0)
    parser.add_argument('--debug', action='count', default=0, help='debug output of pipelines')
    parser.add_argument('--threads', type=int, default=1)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--run-config', metavar='PATH', help='write the resolved run configuration here')
    parser.set_defaults(out=None)
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('field', help='field invariants')
    _field_options(p)
    p.set_defaults(handler=cmd_field)

    p = sub.add_parser('points', help='CSV of sqrt(O_K dual) points by trace')
    _field_options(p)
    p.add_argument('--m-max', type=int, default=20)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_points)

    p = sub.add_parser('ellipsoid', help='CSV of E(c, a) points by level')
    _field_options(p)
    p.add_argument('--c', help='coordinates of c in the integral basis (default 1/sqrt(D))')
    p.add_argument('--a', help='ideal generators "x1,x2;y1,y2" (default O_K)')
    p.add_argument('--level-max', type=float, default=20)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_ellipsoid)

    p = sub.add_parser('nonuniq', help='eigenfunction vanishing on sqrt(O_K dual)')
    _field_options(p)
    p.add_argument('--eps', type=int, choices=(1, -1), default=1)
    p.add_argument('--dims', help='dimensions d_1,...,d_n (default all 1)')
    p.add_argument('--verify-level', type=int, default=40)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_nonuniq)

    p = sub.add_parser('nonuniq2', help='eigenfunction vanishing on E(c, a)')
    _field_options(p)
    p.add_argument('--c')
    p.add_argument('--a')
    p.add_argument('--eps', type=int, choices=(1, -1), default=-1)
    p.add_argument('--verify-level', type=float, default=20)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_nonuniq2)

    p = sub.add_parser('count', help='point counts against the asymptotic formula')
    _field_options(p)
    p.add_argument('--m-max', type=int, default=200)
    p.add_argument('--levels', help='only these traces')
    p.add_argument('--out')
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser('relation', help='check the six-syllable relation')
    _field_options(p)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_relation)

    p = sub.add_parser('commutators', help='commutator distances [T^x0, V^y_k]')
    p.add_argument('--basis1', default='1,0;0,1')
    p.add_argument('--basis2')
    p.add_argument('--x0', default='0,1')
    p.add_argument('--k-max', type=int, default=100)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_commutators)

    p = sub.add_parser('probe', help='search for short relations')
    _field_options(p)
    p.add_argument('--lambda', dest='lam', type=float, default=3.0, help='rank one lattice lambda Z')
    p.add_argument('--box', type=int, default=2)
    p.add_argument('--depth', type=int, default=8)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_probe)

    p = sub.add_parser('interp', help='verify radial interpolation on a Gaussian')
    _series_options(p)
    p.add_argument('--tau', default='0,1')
    p.add_argument('--radii', default='0.7,1.3,2.1')
    p.add_argument('--nmax', type=int, default=40)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_interp)

    p = sub.add_parser('coeffs', help='CSV of interpolation coefficients')
    _series_options(p)
    p.add_argument('--n-min', type=int, default=1)
    p.add_argument('--n-max', type=int, default=10)
    p.add_argument('--radii', default='0.5,1,2')
    p.add_argument('--out')
    p.set_defaults(handler=cmd_coeffs)

    p = sub.add_parser('bounds', help='U bounds and coefficient growth')
    _series_options(p)
    p.add_argument('--kappa', type=float, default=2.25)
    p.add_argument('--y', default='0.05,0.1,0.5,1,2,5')
    p.add_argument('--fit-n', help='also fit sup_r |a_n| + |at_n| over these n')
    p.add_argument('--radii', default='0,0.5,1,2')
    p.add_argument('--out')
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser('lemma51', help='check the entry inequalities of Gamma(lambda) words')
    p.add_argument('--N', type=int, default=5)
    p.add_argument('--B', type=int, default=3)
    p.add_argument('--lambdas', default='2,2.2,3,5')
    p.add_argument('--out')
    p.set_defaults(handler=cmd_word_lemma)
    return parser


def _report_error(e):
    sys.stderr.write(json.dumps({'error': e.__class__.__name__, 'message': str(e)}) + '\n')


def _run(args):
    setup_logging(max(args.verbose, 2 if args.debug else 0))
    config = Config(threads=args.threads)
    run_config = RunConfig.from_args(args, config)
    log.info('running %s', args.command)
    report, passed = args.handler(args, config)

    report['run_config'] = run_config.as_dict()
    if args.run_config:
        _write_json(run_config.as_dict(), args.run_config)
    if args.command not in CSV_COMMANDS:
        _write_json(report, args.out)
    elif args.out:
        # csv went to the file, the report to stdout
        _write_json(report)
    return passed


def dispatch(argv=None):
    try:
        args = build_parser().parse_args(argv)
        passed = _run(args)
    except VerificationError as e:
        _report_error(e)
        return EXIT_FAILED
    except (SqrlatError, OSError) as e:
        # i/o problems are invalid input, never a failed verification
        _report_error(e)
        return EXIT_INVALID

    if not passed:
        log.warning('%s: verification failed', args.command)
        return EXIT_FAILED
    return EXIT_OK


def main():
    sys.exit(dispatch())


if __name__ == '__main__':
    main()
