"""Command-line entry point.

Exit status: 0 on success, 1 when the input is well formed but the request
cannot be met (no derivation, unknown word, unsupported modality, bad data
file), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import fixtures
from .catsem import TranslationError, sexpr, translate
from .evalsem import EvaluationError, SpaceAssignment, interpret_phrase, load_word_tensors
from .experiment import (
    CopyModel, DataError, load_dataset, load_embeddings, load_triples, load_verbs, run_disambiguation,
    verbs_from_triples,
)
from .formula import (
    Atom, FormulaSyntaxError, LexiconError, atoms, connectives, depth, format_formula, format_sequent,
    load_lexicon, parse_formula, parse_sequent,
)
from .modality import FockError, ModalityError, parse_modality
from .modality.fock import (
    fock_dim, fock_dual_codelta, fock_eps, fock_group_delta, format_fock, format_monomial, parse_fock,
)
from .prover import SearchBudget, UnknownWordError, derive_phrase, format_derivation, format_latex, search
from .tensor import ShapeError


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


def _g(x) -> str:
    return f'{x:.9g}'


def _num(x):
    return float(_g(float(x)))


def _vector_text(v) -> str:
    return ' '.join(_g(x) for x in np.asarray(v).ravel())


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def _derivation_json(d) -> dict:
    return {'sequent': format_sequent(d.conclusion), 'rule': d.rule.value, 'meta': list(d.meta),
            'premises': [_derivation_json(p) for p in d.premises]}


def _budget(args) -> SearchBudget:
    try:
        return SearchBudget(args.max_depth, args.max_contr, args.max_results)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _parse_formula_arg(text, what='formula'):
    try:
        return parse_formula(text)
    except FormulaSyntaxError as e:
        raise UsageError(f'bad {what} {text!r}: {e}') from None


def _lexicon(path):
    if path is None:
        return fixtures.lexicon()
    try:
        return load_lexicon(path)
    except OSError as e:
        raise DomainError(f'cannot read lexicon: {e}') from None
    except LexiconError as e:
        raise DomainError(f'{path}: {e}') from None


########################################################################################################################
# Subcommands
########################################################################################################################

def cmd_parse(args, out):
    f = _parse_formula_arg(args.formula)
    if args.json:
        out.write(_dump({'formula': format_formula(f), 'depth': depth(f), 'connectives': connectives(f)}) + '\n')
    else:
        out.write(format_formula(f) + '\n')


def cmd_prove(args, out):
    try:
        seq = parse_sequent(args.sequent)
    except FormulaSyntaxError as e:
        raise UsageError(f'bad sequent {args.sequent!r}: {e}') from None
    budget = _budget(args)
    if args.all and args.max_results == 1:
        budget = SearchBudget(budget.max_depth, budget.max_contractions, 1000)
    res = search(seq, budget)
    if args.json:
        out.write(_dump({'sequent': format_sequent(seq), 'status': res.status.value,
                         'derivations': [_derivation_json(d) for d in res.derivations]}) + '\n')
    else:
        for k, d in enumerate(res.derivations):
            if k:
                out.write('\n')
            out.write(format_latex(d) if args.latex else format_derivation(d))
            out.write('\n')
        if not res.derivations:
            out.write(f'no derivation of {format_sequent(seq)} ({res.status.value})\n')
    if not res.derivations:
        return 1


def _phrase_derivations(args, lex, goal):
    words = args.phrase.split()
    if not words:
        raise UsageError('empty phrase')
    try:
        found = derive_phrase(words, lex, goal, _budget(args))
    except UnknownWordError as e:
        raise DomainError(str(e)) from None
    if not found:
        raise DomainError(f'no derivation of "{args.phrase}" as {format_formula(goal)} within the search budget')
    return words, found


def cmd_semantics(args, out):
    goal = _parse_formula_arg(args.goal, 'goal')
    lex = _lexicon(args.lexicon)
    _, found = _phrase_derivations(args, lex, goal)
    chosen = found if args.all else found[:1]
    items = []
    for pd in chosen:
        try:
            term = translate(pd.derivation)
        except TranslationError as e:
            raise DomainError(str(e)) from None
        items.append({'types': [format_formula(t) for t in pd.types], 'dom': str(term.dom), 'cod': str(term.cod),
                      'term': sexpr(term)})
    if args.json:
        out.write(_dump(items if args.all else items[0]) + '\n')
    else:
        out.write('\n'.join(it['term'] for it in items) + '\n')


def _spaces(args, lex, words, tensors, goal):
    dims = {}
    if args.dims:
        for part in args.dims.split(','):
            name, _, val = part.partition('=')
            try:
                dims[name.strip()] = int(val)
            except ValueError:
                raise UsageError(f'bad --dims entry {part!r}; expected ATOM=N') from None
    # atoms typed directly on a word take their dimension from its vector
    for w in words:
        t = tensors.get(w)
        for f in lex[w] if w in lex else ():
            if isinstance(f, Atom) and isinstance(t, np.ndarray) and t.ndim == 1:
                dims.setdefault(f.name, t.shape[0])
    found = atoms(goal)
    for w in words:
        for f in lex[w] if w in lex else ():
            found |= atoms(f)
    if args.dim is not None:
        for a in found:
            dims.setdefault(a, args.dim)
    missing = sorted(found - set(dims))
    if missing:
        raise DomainError(f'no dimension for {", ".join(missing)}; give --dim or --dims')
    try:
        return SpaceAssignment(dims)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_interpret(args, out):
    goal = _parse_formula_arg(args.goal, 'goal')
    try:
        modality = parse_modality(args.modality)
    except ValueError as e:
        raise UsageError(str(e)) from None
    lex = _lexicon(args.lexicon)
    words = args.phrase.split()
    try:
        tensors = load_word_tensors(args.tensors)
    except (OSError, ValueError) as e:
        raise DomainError(f'cannot read word tensors: {e}') from None
    spaces = _spaces(args, lex, words, tensors, goal)
    try:
        res = interpret_phrase(words, tensors, lex, goal, modality, spaces, _budget(args),
                               all_derivations=args.all)
    except UnknownWordError as e:
        raise DomainError(str(e)) from None
    except (ModalityError, EvaluationError, ShapeError) as e:
        raise DomainError(str(e)) from None
    pairs = res if args.all else [(None, res)]
    if args.json:
        items = [{'types': [format_formula(t) for t in pd.types] if pd else None,
                  'vector': [_num(x) for x in np.asarray(v).ravel()], 'shape': list(np.shape(v))}
                 for pd, v in pairs]
        payload = {'modality': modality.name, 'results': items} if args.all else \
            {'modality': modality.name, 'vector': items[0]['vector'], 'shape': items[0]['shape']}
        out.write(_dump(payload) + '\n')
    else:
        for _, v in pairs:
            out.write(_vector_text(v) + '\n')


def _fock_operand(text, n, name):
    if text is None:
        raise UsageError(f'--{name} is required for this operation')
    try:
        return parse_fock(text, n)
    except (FockError, ValueError) as e:
        raise UsageError(f'bad --{name}: {e}') from None


def _pair_terms(mat):
    terms = []
    for a, b in zip(*np.nonzero(mat)):
        terms.append({'coeff': _num(mat[a, b]), 'left': format_monomial(int(a)), 'right': format_monomial(int(b))})
    return terms


def cmd_fock(args, out):
    n = args.dim
    if n < 1:
        raise UsageError('--dim must be positive')
    op = args.op
    try:
        if op == 'dim':
            result, text = fock_dim(n), str(fock_dim(n))
        elif op == 'wedge':
            x, y = _fock_operand(args.x, n, 'x'), _fock_operand(args.y, n, 'y')
            z = x ^ y
            result, text = {'coeffs': [_num(c) for c in z.coeffs], 'text': format_fock(z)}, format_fock(z)
        elif op == 'eps':
            v = fock_eps(_fock_operand(args.x, n, 'x'))
            result, text = [_num(c) for c in v], _vector_text(v)
        else:
            x = _fock_operand(args.x, n, 'x')
            mat = fock_group_delta(x) if op == 'delta' else fock_dual_codelta(x)
            terms = _pair_terms(mat)
            result = terms
            text = '\n'.join(f"{_g(t['coeff'])} * {t['left']} (x) {t['right']}" for t in terms) or '0'
    except FockError as e:
        raise DomainError(str(e)) from None
    if args.json:
        out.write(_dump({'dim': n, 'op': op, 'result': result}) + '\n')
    else:
        out.write(text + '\n')


def cmd_experiment(args, out):
    try:
        models = list(CopyModel) if args.model == 'all' else [CopyModel.parse(args.model)]
    except ValueError as e:
        raise UsageError(str(e)) from None
    try:
        dataset = load_dataset(args.dataset)
        emb = load_embeddings(args.embeddings, args.embeddings_format)
        dim = len(next(iter(emb.values()))) if emb else None
        if args.verbs:
            verbs = load_verbs(args.verbs, dim)
        elif args.triples:
            verbs = verbs_from_triples(load_triples(args.triples), emb)
        else:
            raise UsageError('one of --verbs or --triples is required')
        reports = [run_disambiguation(dataset, m, emb, verbs, args.metric, args.prep) for m in models]
    except (OSError, DataError, ValueError) as e:
        raise DomainError(str(e)) from None
    if args.json is not None:
        payload = _dump([r.to_dict() for r in reports] if len(reports) > 1 else reports[0].to_dict()) + '\n'
        if args.json == '-':
            out.write(payload)
            return
        with open(args.json, 'w', encoding='utf-8') as fh:
            fh.write(payload)
    out.write('\n\n'.join(r.to_table() for r in reports) + '\n')


########################################################################################################################
# Argument parsing
########################################################################################################################

def _add_budget(p, depth=60, contr=2):
    p.add_argument('--max-depth', type=int, default=depth)
    p.add_argument('--max-contr', type=int, default=contr)
    p.add_argument('--max-results', type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='banglambek',
                                     description='Lambek calculus with a relevant modality: proofs and semantics.')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('parse', help='parse a formula and print its canonical form')
    p.add_argument('--formula', required=True)
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser('prove', help='search for derivations of a sequent')
    p.add_argument('--sequent', required=True, help='e.g. "NP/N, N |- NP"')
    _add_budget(p)
    p.add_argument('--all', action='store_true', help='print every derivation found')
    p.add_argument('--latex', action='store_true', help='prooftree lines instead of an indented tree')
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_prove)

    for name, func, helptext in (('semantics', cmd_semantics, 'print the morphism term of a phrase'),
                                 ('interpret', cmd_interpret, 'evaluate a phrase on word tensors')):
        p = sub.add_parser(name, help=helptext)
        p.add_argument('--phrase', required=True)
        p.add_argument('--lexicon', help='word<TAB>formula file (default: the bundled parasitic-gap lexicon)')
        p.add_argument('--goal', default='NP')
        _add_budget(p)
        p.add_argument('--all', action='store_true', help='one result per derivation')
        p.add_argument('--json', action='store_true')
        p.set_defaults(func=func)
        if name == 'interpret':
            p.add_argument('--tensors', required=True, help='word tensor file')
            p.add_argument('--modality', default='cogebra', help='cogebra, cofree[:k], full or fock')
            p.add_argument('--dim', type=int, help='dimension for every atom not otherwise fixed')
            p.add_argument('--dims', help='per-atom dimensions, e.g. N=2,NP=2,S=3')

    p = sub.add_parser('fock', help='exterior algebra operations')
    p.add_argument('--dim', type=int, required=True, help='number of generators')
    p.add_argument('--op', required=True, choices=['dim', 'wedge', 'eps', 'delta', 'dual-delta'])
    p.add_argument('--x', help='operand, e.g. "2*e1^e3 - e2" or comma-separated coefficients')
    p.add_argument('--y', help='second operand of wedge')
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_fock)

    p = sub.add_parser('experiment', help='run the disambiguation task')
    p.add_argument('--dataset', required=True)
    p.add_argument('--embeddings', required=True)
    p.add_argument('--embeddings-format', default='auto', choices=['auto', 'headered', 'headerless'])
    p.add_argument('--verbs', help='verb matrices in word-tensor format')
    p.add_argument('--triples', help='"verb subject object" lines to build verb matrices from')
    p.add_argument('--model', default='all', help='cogebra-a, cogebra-b, cofree, full or all')
    p.add_argument('--prep', default='mult', choices=['mult', 'add'])
    p.add_argument('--metric', default='cosine', choices=['cosine', 'euclidean'])
    p.add_argument('--json', nargs='?', const='-', default=None, metavar='PATH',
                   help='write the JSON report to PATH (stdout if no path)')
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args, out) or 0
    except UsageError as e:
        sys.stderr.write(f'banglambek {args.command}: error: {e}\n')
        return 2
    except DomainError as e:
        sys.stderr.write(f'banglambek {args.command}: {e}\n')
        return 1


if __name__ == '__main__':
    sys.exit(main())
