"""Types of Lambek calculus with a relevant modality, their text syntax and lexicons.

Grammar (whitespace between tokens is ignored)::

    formula := slashed ("," formula)?
    slashed := term (("/" | "\\") term)?
    term    := "!" term | atom | "1" | "(" formula ")"
    atom    := [A-Za-z][A-Za-z0-9]*

``!`` binds tightest, the two slashes are non-associative (nesting needs
parentheses) and the comma associates to the right.
"""
from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Union


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ''):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f'{message} at position {position}')


class LexiconError(ValueError):
    def __init__(self, message: str, line: int):
        self.message = message
        self.line = line
        super().__init__(f'line {line}: {message}')


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _ATOM_RE.fullmatch(self.name):
            raise ValueError(f'invalid atom name {self.name!r}')

    def __str__(self): return format_formula(self)


@dataclass(frozen=True)
class Empty:
    def __str__(self): return format_formula(self)


@dataclass(frozen=True)
class Tensor:
    left: Formula
    right: Formula

    def __str__(self): return format_formula(self)


@dataclass(frozen=True)
class Over:
    """``left / right``: yields ``left`` once given ``right`` on its right."""
    left: Formula
    right: Formula

    def __str__(self): return format_formula(self)


@dataclass(frozen=True)
class Under:
    """``left \\ right``: yields ``right`` once given ``left`` on its left."""
    left: Formula
    right: Formula

    def __str__(self): return format_formula(self)


@dataclass(frozen=True)
class Bang:
    body: Formula

    def __str__(self): return format_formula(self)


Formula = Union[Atom, Empty, Tensor, Over, Under, Bang]
FORMULA_TYPES = (Atom, Empty, Tensor, Over, Under, Bang)

_ATOM_RE = re.compile(r'[A-Za-z][A-Za-z0-9]*')


def is_formula(f) -> bool:
    if isinstance(f, (Atom, Empty)):
        return True
    if isinstance(f, Bang):
        return is_formula(f.body)
    if isinstance(f, (Tensor, Over, Under)):
        return is_formula(f.left) and is_formula(f.right)
    return False


def format_formula(f: Formula) -> str:
    match f:
        case Atom(name):
            return name
        case Empty():
            return '1'
        case Bang(body):
            return '!' + format_formula(body)
        case Tensor(l, r):
            return f'({format_formula(l)},{format_formula(r)})'
        case Over(l, r):
            return f'({format_formula(l)}/{format_formula(r)})'
        case Under(l, r):
            return f'({format_formula(l)}\\{format_formula(r)})'
    raise TypeError(f'not a formula: {f!r}')


def depth(f: Formula) -> int:
    match f:
        case Atom() | Empty():
            return 0
        case Bang(body):
            return 1 + depth(body)
        case Tensor(l, r) | Over(l, r) | Under(l, r):
            return 1 + max(depth(l), depth(r))
    raise TypeError(f'not a formula: {f!r}')


def connectives(f: Formula) -> int:
    match f:
        case Atom() | Empty():
            return 0
        case Bang(body):
            return 1 + connectives(body)
        case Tensor(l, r) | Over(l, r) | Under(l, r):
            return 1 + connectives(l) + connectives(r)
    raise TypeError(f'not a formula: {f!r}')


def subformulas(f: Formula) -> set:
    out = {f}
    match f:
        case Bang(body):
            out |= subformulas(body)
        case Tensor(l, r) | Over(l, r) | Under(l, r):
            out |= subformulas(l) | subformulas(r)
    return out


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


########################################################################################################################
# Parsing
########################################################################################################################

_TOKEN_RE = re.compile(r'([A-Za-z][A-Za-z0-9]*)|(.)', re.S)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m.group(1) is not None:
            tokens.append(('atom', m.group(1), pos))
        else:
            ch = m.group(2)
            if ch not in '!/\\,()1':
                raise FormulaSyntaxError(f'unexpected character {ch!r}', pos, text)
            tokens.append((ch, ch, pos))
        pos = m.end()
    tokens.append(('eof', '', len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return FormulaSyntaxError(message, tok[2], self.text)

    def formula(self) -> Formula:
        left = self.slashed()
        if self.peek()[0] == ',':
            self.advance()
            return Tensor(left, self.formula())
        return left

    def slashed(self) -> Formula:
        left = self.term()
        kind = self.peek()[0]
        if kind in ('/', '\\'):
            self.advance()
            right = self.term()
            if self.peek()[0] in ('/', '\\'):
                raise self.error('slashes are non-associative; add parentheses')
            return Over(left, right) if kind == '/' else Under(left, right)
        return left

    def term(self) -> Formula:
        kind, value, _ = tok = self.advance()
        if kind == '!':
            return Bang(self.term())
        if kind == 'atom':
            return Atom(value)
        if kind == '1':
            return Empty()
        if kind == '(':
            inner = self.formula()
            if self.peek()[0] != ')':
                raise self.error("expected ')'")
            self.advance()
            return inner
        if kind == 'eof':
            raise self.error('unexpected end of input', tok)
        raise self.error(f'unexpected {value!r}', tok)


def parse_formula(text: str) -> Formula:
    if not isinstance(text, str):
        raise TypeError('formula text must be a string')
    if not text.strip():
        raise FormulaSyntaxError('empty formula', 0, text)
    p = _Parser(text)
    try:
        f = p.formula()
    except RecursionError:
        raise FormulaSyntaxError('nesting too deep', 0, text) from None
    if p.peek()[0] != 'eof':
        raise p.error(f'unexpected {p.peek()[1]!r} after formula')
    return f


########################################################################################################################
# Sequents
########################################################################################################################

@dataclass(frozen=True)
class Sequent:
    antecedent: tuple
    succedent: Formula

    def __post_init__(self):
        if not isinstance(self.antecedent, tuple):
            object.__setattr__(self, 'antecedent', tuple(self.antecedent))

    def __str__(self) -> str: return format_sequent(self)

    def __len__(self) -> int: return len(self.antecedent)


def is_sequent(s) -> bool:
    return (isinstance(s, Sequent) and all(is_formula(f) for f in s.antecedent)
            and is_formula(s.succedent))


def format_sequent(s: Sequent) -> str:
    ant = ', '.join(format_formula(f) for f in s.antecedent)
    return f'{ant} |- {format_formula(s.succedent)}' if ant else f'|- {format_formula(s.succedent)}'


def _split_top_level(text: str, offset: int) -> list[tuple[str, int]]:
    parts, level, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == '(':
            level += 1
        elif ch == ')':
            level -= 1
        elif ch == ',' and level == 0:
            parts.append((text[start:i], offset + start))
            start = i + 1
    parts.append((text[start:], offset + start))
    return parts


def _parse_at(text: str, offset: int, full: str) -> Formula:
    try:
        return parse_formula(text)
    except FormulaSyntaxError as e:
        raise FormulaSyntaxError(e.message, e.position + offset, full) from None


def parse_sequent(text: str) -> Sequent:
    """Parse ``F1, F2, ... |- G``; top-level commas separate antecedent formulas."""
    for turnstile in ('|-', '⊢'):
        if turnstile in text:
            break
    else:
        raise FormulaSyntaxError("missing '|-'", len(text), text)
    cut = text.index(turnstile)
    left, right = text[:cut], text[cut + len(turnstile):]
    succedent = _parse_at(right, cut + len(turnstile), text)
    antecedent = []
    if left.strip():
        for part, off in _split_top_level(left, 0):
            antecedent.append(_parse_at(part, off, text))
    return Sequent(tuple(antecedent), succedent)


########################################################################################################################
# Lexicons
########################################################################################################################

@dataclass
class Lexicon:
    entries: dict[str, list] = field(default_factory=dict)

    def add(self, word: str, formula: Formula) -> None:
        if not is_formula(formula):
            raise TypeError(f'not a formula: {formula!r}')
        self.entries.setdefault(word, []).append(formula)

    def __getitem__(self, word: str) -> list:
        return self.entries[word]

    def __contains__(self, word) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def missing(self, words: Iterable[str]) -> list[str]:
        seen, out = set(), []
        for w in words:
            if w not in self.entries and w not in seen:
                seen.add(w)
                out.append(w)
        return out

    def to_text(self) -> str:
        return ''.join(f'{w}\t{format_formula(f)}\n' for w, fs in self.entries.items() for f in fs)


def parse_lexicon(text: str) -> Lexicon:
    lex = Lexicon()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if '\t' not in raw.strip('\n'):
            raise LexiconError('expected word<TAB>formula', lineno)
        word, _, ftext = raw.partition('\t')
        word = word.strip()
        if not word:
            raise LexiconError('empty word', lineno)
        try:
            lex.add(word, parse_formula(ftext))
        except FormulaSyntaxError as e:
            raise LexiconError(f'{e.message} at column {e.position + len(word) + 2}', lineno) from None
    return lex


def load_lexicon(path) -> Lexicon:
    with open(path, encoding='utf-8') as fh:
        return parse_lexicon(fh.read())
