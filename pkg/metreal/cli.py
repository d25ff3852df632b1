"""
metreal command line.

    metreal validate FILE
    metreal realize FILE [-o OUT]
    metreal nerve FILE --max-dim D [-o OUT]
    metreal adjoint S_FILE M_FILE [-o OUT]
    metreal umap CSV -d D -k K --epochs E --lr L --neg Q --seed S [-o OUT]

Exit codes: 0 success, 1 domain violation, 2 I/O or parse error.
"""
import argparse
import sys

from . import io
from ._version import __version__
from .epmet import validate_epmet
from .errors import DomainError, EnumerationLimitError, FormatError, StructuralError
from .realization import adjunction_check, fin_metric_realize, fin_singular_nerve
from .simplicial import DEFAULT_MAX_DIM, validate
from .umap_pipeline import umap

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_FORMAT = 2


class CommandFailed(Exception):

    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _emit(obj, out):
    if out:
        io.write_json(obj, out)
    else:
        sys.stdout.write(io.dumps(obj) + '\n')


def _report(lines):
    for line in lines:
        print('VIOLATION: ' + line)
    return EXIT_VIOLATION if lines else EXIT_OK


def _epmet_lines(violations):
    return [axiom + ' ' + ' '.join(io.render_label(p) for p in witness) for axiom, witness in violations]


def _load_simplicial(path):
    try:
        return io.simplicial_from_json(io.read_json(path))
    except DomainError as err:
        raise CommandFailed(str(err), EXIT_VIOLATION)


def _load_valid_simplicial(path):
    S = _load_simplicial(path)
    violations = validate(S)
    if violations:
        _report([str(v) for v in violations])
        raise CommandFailed(path + ' is not a valid simplicial fuzzy set', EXIT_VIOLATION)
    return S


def _load_valid_epmet(path):
    M = io.epmet_from_json(io.read_json(path))
    violations = validate_epmet(M)
    if violations:
        _report(_epmet_lines(violations))
        raise CommandFailed(path + ' is not an extended pseudo-metric space', EXIT_VIOLATION)
    return M


def cmd_validate(args):
    obj = io.read_json(args.file)
    schema = io.detect_schema(obj)

    if schema == 'epmet':
        return _report(_epmet_lines(validate_epmet(io.epmet_from_json(obj))))

    readers = {'simplicial': io.simplicial_from_json,
               'fuzzy_set': io.fuzzy_set_from_json,
               'level_function': io.level_function_from_json,
               'graph': io.graph_from_json}
    try:
        parsed = readers[schema](obj)
    except (DomainError, StructuralError) as err:
        return _report([schema + ': ' + str(err)])
    if schema == 'simplicial':
        return _report([str(v) for v in validate(parsed)])
    return EXIT_OK


def cmd_realize(args):
    S = _load_valid_simplicial(args.file)
    _emit(io.realization_to_json(fin_metric_realize(S, verbose=args.verbose)), args.output)
    return EXIT_OK


def cmd_nerve(args):
    M = _load_valid_epmet(args.file)
    _emit(io.simplicial_to_json(fin_singular_nerve(M, args.max_dim)), args.output)
    return EXIT_OK


def cmd_adjoint(args):
    S = _load_valid_simplicial(args.s_file)
    M = _load_valid_epmet(args.m_file)
    try:
        report = adjunction_check(S, M, n_jobs=args.n_jobs, verbose=args.verbose)
    except EnumerationLimitError as err:
        raise CommandFailed(str(err) + ' ' + io.dumps(err.report), EXIT_VIOLATION)
    _emit(io.adjunction_report_to_json(report), args.output)
    return EXIT_OK


def cmd_umap(args):
    X = io.read_dataset_csv(args.csv)
    Y = umap(X, d=args.d, k=args.k, n_epochs=args.epochs, lr=args.lr, neg=args.neg, seed=args.seed,
             verbose=args.verbose)
    io.write_embedding_csv(Y, args.output if args.output else sys.stdout)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog='metreal', description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    subparsers = parser.add_subparsers(dest='command', required=True)

    p = subparsers.add_parser('validate', help='check a JSON file against its schema invariants')
    p.add_argument('file')
    p.set_defaults(func=cmd_validate)

    p = subparsers.add_parser('realize', help='finite metric realization of a simplicial fuzzy set')
    p.add_argument('file')
    p.add_argument('-o', '--output', default='')
    p.add_argument('--verbose', action='store_true')
    p.set_defaults(func=cmd_realize)

    p = subparsers.add_parser('nerve', help='finite singular nerve of an extended pseudo-metric space')
    p.add_argument('file')
    p.add_argument('--max-dim', type=int, default=DEFAULT_MAX_DIM)
    p.add_argument('-o', '--output', default='')
    p.set_defaults(func=cmd_nerve)

    p = subparsers.add_parser('adjoint', help='compare the two hom-sets of the realization/nerve adjunction')
    p.add_argument('s_file')
    p.add_argument('m_file')
    p.add_argument('-o', '--output', default='')
    p.add_argument('--n-jobs', type=int, default=1)
    p.add_argument('--verbose', action='store_true')
    p.set_defaults(func=cmd_adjoint)

    p = subparsers.add_parser('umap', help='embed a CSV dataset')
    p.add_argument('csv')
    p.add_argument('-d', type=int, default=2)
    p.add_argument('-k', type=int, default=15)
    p.add_argument('--epochs', type=int, default=200)
    p.add_argument('--lr', type=float, default=1.0)
    p.add_argument('--neg', type=int, default=5)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('-o', '--output', default='')
    p.add_argument('--verbose', action='store_true')
    p.set_defaults(func=cmd_umap)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_FORMAT

    try:
        return args.func(args)
    except CommandFailed as err:
        print('error: ' + str(err), file=sys.stderr)
        return err.code
    except FormatError as err:
        print('error: ' + str(err), file=sys.stderr)
        return EXIT_FORMAT
    except (DomainError, StructuralError) as err:
        print('error: ' + str(err), file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == '__main__':
    sys.exit(main())
