"""
Readers and writers for the JSON and CSV files used by the command line.

JSON is written with sorted keys and floats at 17 significant digits, so
identical inputs give byte-identical files. The infinite distance is the
string "inf". Labels are written as strings; tuple labels (nerve simplices)
are joined with "|".
"""
import json
import math

import numpy as np
import pandas as pd

from .epmet import INF, FiniteEPMet
from .errors import FormatError, StructuralError
from .fuzzy_core import ClassicalFuzzySet, FuzzyGraph, LevelFunction
from .simplicial import TruncatedSimplicialFuzzySet


################# text level #################

def format_float(x):
    text = '%.17g' % x
    if not any(c in text for c in '.en'):
        text += '.0'
    return text


def dumps(obj):
    """JSON text with sorted keys and 17 significant digit floats."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise FormatError('Non-finite float ' + repr(obj) + ' has no JSON form')
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return '{' + ', '.join(json.dumps(k) + ': ' + dumps(v) for k, v in items) + '}'
    if isinstance(obj, (list, tuple)):
        return '[' + ', '.join(dumps(v) for v in obj) + ']'
    raise FormatError('Cannot serialise ' + type(obj).__name__)


def write_json(obj, path):
    with open(path, 'w') as fh:
        fh.write(dumps(obj) + '\n')


def read_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as err:
        raise FormatError('Cannot read ' + str(path) + ': ' + err.strerror)
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError('Malformed JSON: ' + err.msg, 'line ' + str(err.lineno) + ' column ' + str(err.colno))


def render_label(x):
    if isinstance(x, tuple):
        return '|'.join(render_label(p) for p in x)
    return str(x)


def _require(obj, keys, where):
    if not isinstance(obj, dict):
        raise FormatError('Expected an object', where)
    for key in keys:
        if key not in obj:
            raise FormatError('Missing key "' + key + '"', where)


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError('Expected a number, got ' + json.dumps(value), where)
    return float(value)


def detect_schema(obj):
    """Names the schema of a parsed JSON document."""
    if isinstance(obj, dict):
        if 'points' in obj and 'dist' in obj:
            return 'epmet'
        if 'max_dim' in obj and 'dims' in obj:
            return 'simplicial'
        if 'levels' in obj:
            return 'level_function'
        if 'elements' in obj and 'membership' in obj:
            return 'fuzzy_set'
        if 'vertices' in obj and 'edges' in obj:
            return 'graph'
    raise FormatError('Document matches none of the known schemas', '$')


################# extended pseudo-metric spaces #################

def epmet_to_json(M):
    dist = [['inf' if d is INF else float(d) for d in row] for row in M.dist]
    return {'points': [render_label(p) for p in M.points], 'dist': dist}


def epmet_from_json(obj):
    _require(obj, ['points', 'dist'], '$')
    points = obj['points']
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise FormatError('"points" must be a list of strings', '$.points')
    rows = obj['dist']
    if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
        raise FormatError('"dist" must be a list of rows', '$.dist')
    table = []
    for i, row in enumerate(rows):
        parsed = []
        for j, value in enumerate(row):
            where = '$.dist[' + str(i) + '][' + str(j) + ']'
            parsed.append(INF if value == 'inf' else _number(value, where))
        table.append(parsed)
    try:
        return FiniteEPMet(points, table)
    except StructuralError as err:
        raise FormatError(str(err), '$.dist')


################# fuzzy sets and level functions #################

def fuzzy_set_to_json(X):
    return {'elements': [render_label(x) for x in X.elements],
            'membership': {render_label(x): X.membership[x] for x in X.elements}}


def fuzzy_set_from_json(obj):
    """Parses the schema; invariant failures raise DomainError/StructuralError from the type."""
    _require(obj, ['elements', 'membership'], '$')
    elements = obj['elements']
    membership = obj['membership']
    if not isinstance(elements, list) or not isinstance(membership, dict):
        raise FormatError('"elements" must be a list and "membership" an object', '$')
    values = {x: _number(m, '$.membership.' + x) for x, m in membership.items()}
    return ClassicalFuzzySet(tuple(elements), values)


def level_function_to_json(S):
    return {'levels': [{'a': a, 'set': [render_label(x) for x in L]} for a, L in S.levels]}


def level_function_from_json(obj):
    _require(obj, ['levels'], '$')
    if not isinstance(obj['levels'], list):
        raise FormatError('"levels" must be a list', '$.levels')
    levels = []
    for k, level in enumerate(obj['levels']):
        where = '$.levels[' + str(k) + ']'
        _require(level, ['a', 'set'], where)
        if not isinstance(level['set'], list):
            raise FormatError('"set" must be a list', where)
        levels.append((_number(level['a'], where + '.a'), tuple(level['set'])))
    return LevelFunction(tuple(levels))


################# simplicial fuzzy sets #################

def _index_key(key, where):
    try:
        n, i = key.split(',')
        return int(n), int(i)
    except ValueError:
        raise FormatError('Table key "' + key + '" is not of the form "n,i"', where)


def simplicial_to_json(S):
    def table(tables):
        return {str(n) + ',' + str(i): {render_label(x): render_label(y) for x, y in t.items()}
                for (n, i), t in tables.items()}
    return {'max_dim': S.max_dim,
            'dims': [{'n': n, 'elements': {render_label(x): S_n.membership[x] for x in S_n.elements}}
                     for n, S_n in enumerate(S.sets)],
            'faces': table(S.faces),
            'degeneracies': table(S.degeneracies)}


def simplicial_from_json(obj):
    _require(obj, ['max_dim', 'dims', 'faces', 'degeneracies'], '$')
    D = obj['max_dim']
    if isinstance(D, bool) or not isinstance(D, int):
        raise FormatError('"max_dim" must be an integer', '$.max_dim')
    dims = obj['dims']
    if not isinstance(dims, list):
        raise FormatError('"dims" must be a list', '$.dims')
    sets = [None] * len(dims)
    for k, entry in enumerate(dims):
        where = '$.dims[' + str(k) + ']'
        _require(entry, ['n', 'elements'], where)
        n = entry['n']
        if isinstance(n, bool) or not isinstance(n, int) or not (0 <= n < len(dims)) or sets[n] is not None:
            raise FormatError('Bad or repeated dimension ' + json.dumps(n), where + '.n')
        if not isinstance(entry['elements'], dict):
            raise FormatError('"elements" must be an object', where + '.elements')
        membership = {x: _number(m, where + '.elements.' + x) for x, m in entry['elements'].items()}
        sets[n] = ClassicalFuzzySet(tuple(membership), membership)

    def tables(name):
        if not isinstance(obj[name], dict):
            raise FormatError('"' + name + '" must be an object', '$.' + name)
        parsed = {}
        for key, table in obj[name].items():
            where = '$.' + name + '.' + key
            if not isinstance(table, dict):
                raise FormatError('Table must be an object', where)
            parsed[_index_key(key, where)] = dict(table)
        return parsed

    try:
        return TruncatedSimplicialFuzzySet(D, tuple(sets), tables('faces'), tables('degeneracies'))
    except StructuralError as err:
        raise FormatError(str(err), '$')


################# graphs, realizations, reports #################

def graph_to_json(G):
    return {'vertices': [render_label(v) for v in G.vertices],
            'edges': [{'u': render_label(u), 'v': render_label(v), 'w': w} for (u, v), w in G.weights.items()]}


def graph_from_json(obj):
    _require(obj, ['vertices', 'edges'], '$')
    weights = {}
    for k, edge in enumerate(obj['edges']):
        where = '$.edges[' + str(k) + ']'
        _require(edge, ['u', 'v', 'w'], where)
        weights[(edge['u'], edge['v'])] = _number(edge['w'], where + '.w')
    return FuzzyGraph(tuple(obj['vertices']), weights)


def realization_to_json(R):
    obj = epmet_to_json(R.space)
    obj['witness'] = {str(n) + ',' + render_label(s) + ',' + str(i): render_label(p)
                      for (n, s, i), p in R.witness.items()}
    return obj


def adjunction_report_to_json(report):
    obj = report.as_dict()
    obj['count'] = report.realization_count if report.bijection else None
    return obj


################# CSV #################

def read_dataset_csv(path):
    """Headerless CSV of floats, one row per point."""
    try:
        table = pd.read_csv(path, header=None, float_precision='round_trip')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as err:
        raise FormatError('Cannot read dataset ' + str(path) + ': ' + str(err).strip())
    try:
        return table.to_numpy(dtype=np.float64)
    except (TypeError, ValueError):
        bad = table.apply(pd.to_numeric, errors='coerce').isna() & table.notna()
        row, col = np.argwhere(bad.to_numpy())[0] if bad.to_numpy().any() else (0, 0)
        raise FormatError('Dataset entry is not a number', 'row ' + str(row + 1) + ' column ' + str(col + 1))


def write_embedding_csv(Y, path):
    coords = Y.coords if hasattr(Y, 'coords') else np.asarray(Y)
    pd.DataFrame(coords).to_csv(path, header=False, index=False, float_format='%.17g')
