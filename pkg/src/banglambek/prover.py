"""Backward proof search and derivation checking for the !L* sequent calculus.

The calculus has exactly ten rules: the axiom ``A |- A``, left and right
rules for both slashes, ``!L``/``!R``, the two permutation rules that let a
``!``-formula jump over a block of formulas, and contraction of a
``!``-formula.  There is no cut and no weakening.

Search is cut-free and bounded.  Derivations are enumerated by iterative
deepening on tree height, so the first derivation returned is always one of
minimal height and raising ``max_depth`` only appends to the enumeration.
"""
from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, Optional

from .formula import (Bang, Formula, Lexicon, Over, Sequent, Under, format_formula,
                      format_sequent, is_sequent)

log = logging.getLogger(__name__)


class Rule(enum.Enum):
    Axiom = 'ax'
    SlashL = '/L'
    SlashR = '/R'
    BackslashL = '\\L'
    BackslashR = '\\R'
    BangL = '!L'
    BangR = '!R'
    Perm1 = 'perm1'
    Perm2 = 'perm2'
    Contr = 'contr'

    def __repr__(self): return self.name


@dataclass(frozen=True)
class Derivation:
    """A proof tree.  ``meta`` records where the rule acted on the conclusion.

    * ``SlashL``: ``(i, k)``, ``B/A`` at index ``i``, its argument is the ``k``
      formulas after it.
    * ``BackslashL``: ``(i, k)``, ``A\\B`` at index ``i``, argument is the ``k``
      formulas before it.
    * ``BangL``, ``Contr``: ``(i,)``.
    * ``Perm1``/``Perm2``: ``(src, dst)``, the ``!``-formula at ``src`` in the
      conclusion sits at ``dst`` in the premise (``dst < src`` for ``Perm1``).
    """
    conclusion: Sequent
    rule: Rule
    premises: tuple = ()
    meta: tuple = ()

    def __str__(self) -> str:
        return format_derivation(self)

    @property
    def height(self) -> int:
        return 1 + max((p.height for p in self.premises), default=0)

    def nodes(self) -> Iterator[Derivation]:
        yield self
        for p in self.premises:
            yield from p.nodes()

    def count(self, rule: Rule) -> int:
        return sum(1 for n in self.nodes() if n.rule is rule)


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 60
    max_contractions: int = 2
    max_results: int = 1

    def __post_init__(self):
        for name in ('max_depth', 'max_results'):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f'{name} must be a positive integer, got {v!r}')
        if not isinstance(self.max_contractions, int) or self.max_contractions < 0:
            raise ValueError(f'max_contractions must be a non-negative integer, '
                             f'got {self.max_contractions!r}')


class SearchStatus(enum.Enum):
    FOUND = 'found'
    # some branch was cut by the depth or contraction budget
    EXHAUSTED = 'budget-exhausted'
    # the whole search space was explored without hitting a budget
    NOT_DERIVABLE = 'not-derivable'


@dataclass
class SearchResult:
    derivations: list
    status: SearchStatus

    def __bool__(self):
        return bool(self.derivations)


class UnknownWordError(KeyError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f'unknown word(s): {", ".join(self.missing)}')

    def __str__(self):
        return self.args[0]


########################################################################################################################
# Rule instances (shared by checking and search)
########################################################################################################################

def _move(ant: tuple, src: int, dst: int) -> tuple:
    items = list(ant)
    items.insert(dst, items.pop(src))
    return tuple(items)


def expected_premises(conclusion: Sequent, rule: Rule, meta: tuple) -> Optional[list]:
    """The premises ``rule`` with ``meta`` needs to yield ``conclusion``; None if inapplicable."""
    ant, succ = conclusion.antecedent, conclusion.succedent
    n = len(ant)
    try:
        if rule is Rule.Axiom:
            return [] if meta == () and n == 1 and ant[0] == succ else None
        if rule is Rule.SlashR:
            if meta != () or not isinstance(succ, Over):
                return None
            return [Sequent(ant + (succ.right,), succ.left)]
        if rule is Rule.BackslashR:
            if meta != () or not isinstance(succ, Under):
                return None
            return [Sequent((succ.left,) + ant, succ.right)]
        if rule is Rule.SlashL:
            i, k = meta
            if not (0 <= i < n and k >= 0 and i + 1 + k <= n and isinstance(ant[i], Over)):
                return None
            b, a = ant[i].left, ant[i].right
            return [Sequent(ant[i + 1:i + 1 + k], a), Sequent(ant[:i] + (b,) + ant[i + 1 + k:], succ)]
        if rule is Rule.BackslashL:
            i, k = meta
            if not (0 <= i < n and 0 <= k <= i and isinstance(ant[i], Under)):
                return None
            a, b = ant[i].left, ant[i].right
            return [Sequent(ant[i - k:i], a), Sequent(ant[:i - k] + (b,) + ant[i + 1:], succ)]
        if rule is Rule.BangL:
            (i,) = meta
            if not (0 <= i < n and isinstance(ant[i], Bang)):
                return None
            return [Sequent(ant[:i] + (ant[i].body,) + ant[i + 1:], succ)]
        if rule is Rule.BangR:
            if meta != () or not isinstance(succ, Bang) or not all(isinstance(f, Bang) for f in ant):
                return None
            return [Sequent(ant, succ.body)]
        if rule in (Rule.Perm1, Rule.Perm2):
            src, dst = meta
            if not (0 <= src < n and 0 <= dst < n and isinstance(ant[src], Bang)):
                return None
            if (rule is Rule.Perm1 and dst > src) or (rule is Rule.Perm2 and dst < src):
                return None
            return [Sequent(_move(ant, src, dst), succ)]
        if rule is Rule.Contr:
            (i,) = meta
            if not (0 <= i < n and isinstance(ant[i], Bang)):
                return None
            return [Sequent(ant[:i] + (ant[i], ant[i]) + ant[i + 1:], succ)]
    except (TypeError, ValueError):
        return None
    return None


def find_error(d) -> Optional[tuple[tuple, str]]:
    """Path (premise indices from the root) and reason for the first bad node, or None."""
    stack = [((), d)]
    while stack:
        path, node = stack.pop()
        if not isinstance(node, Derivation) or not isinstance(node.rule, Rule):
            return path, 'not a derivation node'
        if not is_sequent(node.conclusion):
            return path, 'malformed sequent'
        if not isinstance(node.meta, tuple) or not all(isinstance(m, int) for m in node.meta):
            return path, 'malformed rule metadata'
        want = expected_premises(node.conclusion, node.rule, node.meta)
        if want is None:
            return path, f'{node.rule.name} does not apply to {format_sequent(node.conclusion)} with {node.meta}'
        if len(want) != len(node.premises):
            return path, f'{node.rule.name} needs {len(want)} premise(s), got {len(node.premises)}'
        for j, (w, p) in enumerate(zip(want, node.premises)):
            got = getattr(p, 'conclusion', None)
            if got != w:
                shown = format_sequent(got) if isinstance(got, Sequent) else repr(got)
                return path + (j,), f'expected premise {format_sequent(w)}, found {shown}'
        for j in reversed(range(len(node.premises))):
            stack.append((path + (j,), node.premises[j]))
    return None


def check(d) -> bool:
    return find_error(d) is None


########################################################################################################################
# Search
########################################################################################################################

class _Searcher:
    def __init__(self, max_contractions: int):
        self.max_contractions = max_contractions
        # (sequent, last_moved, contractions left) -> largest depth known to fail
        self.soft_fail: dict = {}
        # (sequent, last_moved) that fail for every budget
        self.hard_fail: set = set()
        self.cuts = 0

    def search(self, seq: Sequent, depth: int, contr: int, last_moved: int = -1) -> Iterator[Derivation]:
        if depth <= 0:
            self.cuts += 1
            return
        key = (seq, last_moved)
        if key in self.hard_fail:
            return
        if self.soft_fail.get(key + (contr,), 0) >= depth:
            self.cuts += 1
            return
        cuts_before = self.cuts
        found = False
        for d in self._expand(seq, depth, contr, last_moved):
            found = True
            yield d
        if not found:
            if self.cuts == cuts_before:
                self.hard_fail.add(key)
            else:
                k = key + (contr,)
                self.soft_fail[k] = max(self.soft_fail.get(k, 0), depth)

    def _unary(self, seq, rule, meta, depth, contr, last_moved=-1):
        (premise,) = expected_premises(seq, rule, meta)
        for p in self.search(premise, depth - 1, contr, last_moved):
            yield Derivation(seq, rule, (p,), meta)

    def _binary(self, seq, rule, meta, depth, contr):
        left, right = expected_premises(seq, rule, meta)
        # argument premise first: it is shorter and fails fastest
        for p in self.search(left, depth - 1, contr):
            for q in self.search(right, depth - 1, contr):
                yield Derivation(seq, rule, (p, q), meta)

    def _expand(self, seq: Sequent, depth: int, contr: int, last_moved: int) -> Iterator[Derivation]:
        ant, succ = seq.antecedent, seq.succedent
        n = len(ant)
        if n == 1 and ant[0] == succ:
            yield Derivation(seq, Rule.Axiom)
        if isinstance(succ, Over):
            yield from self._unary(seq, Rule.SlashR, (), depth, contr)
        if isinstance(succ, Under):
            yield from self._unary(seq, Rule.BackslashR, (), depth, contr)
        for i, f in enumerate(ant):
            if isinstance(f, Over):
                for k in range(n - i):
                    yield from self._binary(seq, Rule.SlashL, (i, k), depth, contr)
            elif isinstance(f, Under):
                for k in range(i + 1):
                    yield from self._binary(seq, Rule.BackslashL, (i, k), depth, contr)
        for i, f in enumerate(ant):
            if isinstance(f, Bang):
                yield from self._unary(seq, Rule.BangL, (i,), depth, contr)
        if isinstance(succ, Bang) and all(isinstance(f, Bang) for f in ant):
            yield from self._unary(seq, Rule.BangR, (), depth, contr)
        bangs = [i for i, f in enumerate(ant) if isinstance(f, Bang)]
        for i in bangs:
            if contr > 0:
                for p in self.search(expected_premises(seq, Rule.Contr, (i,))[0], depth - 1, contr - 1):
                    yield Derivation(seq, Rule.Contr, (p,), (i,))
            else:
                self.cuts += 1
        for src in bangs:
            if src == last_moved:
                # two moves of the same formula in a row collapse into one
                continue
            for dst in range(n):
                if dst == src:
                    continue
                premise = _move(ant, src, dst)
                if premise == ant:
                    continue
                rule = Rule.Perm1 if dst < src else Rule.Perm2
                for p in self.search(Sequent(premise, succ), depth - 1, contr, dst):
                    yield Derivation(seq, rule, (p,), (src, dst))


def search(seq: Sequent, budget: SearchBudget = SearchBudget()) -> SearchResult:
    """Enumerate derivations of ``seq`` in order of height, up to the budget."""
    if not is_sequent(seq):
        raise ValueError(f'not a well-formed sequent: {seq!r}')
    searcher = _Searcher(budget.max_contractions)
    found, seen = [], set()
    status = SearchStatus.EXHAUSTED
    for d in range(1, budget.max_depth + 1):
        searcher.cuts = 0
        for der in searcher.search(seq, d, budget.max_contractions):
            if der not in seen:
                seen.add(der)
                found.append(der)
                if len(found) >= budget.max_results:
                    return SearchResult(found, SearchStatus.FOUND)
        if searcher.cuts == 0:
            # nothing was cut off: deeper iterations cannot find more
            status = SearchStatus.FOUND if found else SearchStatus.NOT_DERIVABLE
            break
    else:
        if found:
            status = SearchStatus.FOUND
    log.debug('search %s: %s, %d derivation(s)', format_sequent(seq), status.value, len(found))
    return SearchResult(found, status)


def prove(seq: Sequent, budget: SearchBudget = SearchBudget()) -> list:
    return search(seq, budget).derivations


@dataclass(frozen=True)
class PhraseDerivation:
    words: tuple
    types: tuple
    derivation: Derivation


def derive_phrase(words, lex: Lexicon, goal: Formula, budget: SearchBudget = SearchBudget()) -> list:
    """Prove ``types |- goal`` for every choice of one lexicon type per word."""
    words = tuple(words)
    missing = lex.missing(words)
    if missing:
        raise UnknownWordError(missing)
    out = []
    for types in itertools.product(*(lex[w] for w in words)):
        for d in prove(Sequent(tuple(types), goal), budget):
            out.append(PhraseDerivation(words, tuple(types), d))
    return out


########################################################################################################################
# Printing
########################################################################################################################

def format_derivation(d: Derivation, indent: str = '  ') -> str:
    lines = []

    def walk(node, level):
        meta = f' {list(node.meta)}' if node.meta else ''
        lines.append(f'{indent * level}{format_sequent(node.conclusion)}   [{node.rule.value}{meta}]')
        for p in node.premises:
            walk(p, level + 1)

    walk(d, 0)
    return '\n'.join(lines)


def _latex_formula(f) -> str:
    return format_formula(f).replace('\\', '\\backslash ').replace('!', '\\,!')


def _latex_sequent(s: Sequent) -> str:
    return ', '.join(_latex_formula(f) for f in s.antecedent) + ' \\vdash ' + _latex_formula(s.succedent)


_LATEX_RULE = {Rule.Axiom: '', Rule.SlashL: '(/L)', Rule.SlashR: '(/R)', Rule.BackslashL: '(\\backslash L)',
               Rule.BackslashR: '(\\backslash R)', Rule.BangL: '(!L)', Rule.BangR: '(!R)',
               Rule.Perm1: '(\\mathrm{perm}_1)', Rule.Perm2: '(\\mathrm{perm}_2)', Rule.Contr: '(\\mathrm{contr})'}


def format_latex(d: Derivation) -> str:
    """Nested ``\\prftree`` lines, one rule per line."""
    lines = []

    def walk(node, level):
        pad = '  ' * level
        if node.rule is Rule.Axiom:
            lines.append(f'{pad}\\prftree{{{_latex_sequent(node.conclusion)}}}')
            return
        lines.append(f'{pad}\\prftree[r]{{$\\scriptstyle{{{_LATEX_RULE[node.rule]}}}$}}')
        for p in node.premises:
            lines.append(f'{pad}{{')
            walk(p, level + 1)
            lines.append(f'{pad}}}')
        lines.append(f'{pad}{{{_latex_sequent(node.conclusion)}}}')

    walk(d, 0)
    return '\n'.join(lines)
