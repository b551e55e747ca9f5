"""Disambiguation of parasitic-gap phrases "A's the B C'ed Prep D'ing" with copy-object word meanings.

Nouns are vectors, verbs are matrices.  Writing ``C(B, X) = X * (C @ B)`` and
``D(X) = D @ X`` (``*`` elementwise), the four copy models are::

    cogebra-a   Prep(C(B, A), D(1))
    cogebra-b   Prep(C(B, 1), D(A))
    cofree      Prep(C(B, A) + D(1), C(B, 1) + D(A))
    full        Prep(C(B, A), D(A))

where ``1`` is the all-ones vector.  For each entry the phrase with the
ambiguous verb is compared with the phrases built from each of its two
meanings; the entry counts as correct when it is closer to the right one.
"""
from __future__ import annotations

import csv
import enum
import json
import warnings
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field

import numpy as np

from .tensor import ZeroVectorError, cosine, euclidean

DATASET_COLUMNS = ('group_id', 'head_noun', 'subject', 'amb_verb', 'prep', 'gerund_verb', 'meaning1', 'meaning2',
                   'correct')


class DataError(ValueError):
    def __init__(self, message: str, line: int = None):
        self.line = line
        super().__init__(f'line {line}: {message}' if line is not None else message)


class MissingWordError(KeyError):
    def __str__(self):
        return self.args[0]


class CopyModel(enum.Enum):
    CogebraA = 'cogebra-a'
    CogebraB = 'cogebra-b'
    CofreeInspired = 'cofree'
    Full = 'full'

    @classmethod
    def parse(cls, text: str) -> CopyModel:
        for m in cls:
            if text.lower() in (m.value, m.name.lower()):
                return m
        raise ValueError(f'unknown copy model {text!r}; expected one of {", ".join(m.value for m in cls)}')


@dataclass(frozen=True)
class GapEntry:
    group_id: str
    head_noun: str
    subject: tuple
    amb_verb: str
    prep: str
    gerund_verb: str
    meaning1: str
    meaning2: str
    correct: int

    def __post_init__(self):
        if isinstance(self.subject, str):
            object.__setattr__(self, 'subject', tuple(self.subject.split()))
        if self.correct not in (1, 2):
            raise ValueError(f'correct must be 1 or 2, got {self.correct!r}')
        for name in ('group_id', 'head_noun', 'amb_verb', 'prep', 'gerund_verb', 'meaning1', 'meaning2'):
            if not str(getattr(self, name)).strip():
                raise ValueError(f'{name} is empty')
        if not self.subject:
            raise ValueError('subject is empty')


########################################################################################################################
# Loading
########################################################################################################################

def load_dataset(path) -> list:
    with open(path, newline='', encoding='utf-8') as fh:
        return parse_dataset(fh.read())


def parse_dataset(text: str) -> list:
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None:
        raise DataError('missing header', 1)
    header = [h.strip() for h in reader.fieldnames]
    missing = [c for c in DATASET_COLUMNS if c not in header]
    if missing:
        raise DataError(f'header lacks column(s) {", ".join(missing)}', 1)
    entries = []
    for row in reader:
        line = reader.line_num
        row = {k.strip(): (v or '').strip() for k, v in row.items() if k is not None}
        try:
            correct = int(row['correct'])
        except ValueError:
            raise DataError(f'correct must be 1 or 2, got {row["correct"]!r}', line) from None
        try:
            entries.append(GapEntry(row['group_id'], row['head_noun'], tuple(row['subject'].split()),
                                    row['amb_verb'], row['prep'], row['gerund_verb'], row['meaning1'],
                                    row['meaning2'], correct))
        except ValueError as e:
            raise DataError(str(e), line) from None
    return entries


def parse_embeddings(text: str, format: str = 'auto') -> dict:
    """Word vectors, one ``word v1 ... vd`` per line, optionally after a ``vocab dim`` header line."""
    if format not in ('auto', 'headered', 'headerless'):
        raise ValueError(f'unknown embedding format {format!r}')
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    table: dict = {}
    dim = None
    expected_vocab = None
    if lines:
        first = lines[0][1].split()
        looks_headered = len(first) == 2 and all(p.isdigit() for p in first)
        if format == 'headered' or (format == 'auto' and looks_headered):
            if not looks_headered:
                raise DataError('expected a "vocab dim" header', lines[0][0])
            expected_vocab, dim = int(first[0]), int(first[1])
            lines = lines[1:]
    for lineno, ln in lines:
        parts = ln.split()
        word, vals = parts[0], parts[1:]
        if dim is None:
            dim = len(vals)
            if dim == 0:
                raise DataError(f'no vector for {word!r}', lineno)
        if len(vals) != dim:
            raise DataError(f'{word!r} has {len(vals)} values, expected {dim}', lineno)
        try:
            vec = np.array([float(v) for v in vals])
        except ValueError:
            raise DataError(f'non-numeric value in the vector of {word!r}', lineno) from None
        if not np.all(np.isfinite(vec)):
            raise DataError(f'non-finite value in the vector of {word!r}', lineno)
        if word in table:
            warnings.warn(f'line {lineno}: duplicate word {word!r}; the last occurrence wins', stacklevel=2)
        table[word] = vec
    if expected_vocab is not None and expected_vocab != len(table):
        warnings.warn(f'header announces {expected_vocab} words, found {len(table)}', stacklevel=2)
    return table


def load_embeddings(path, format: str = 'auto') -> dict:
    with open(path, encoding='utf-8') as fh:
        return parse_embeddings(fh.read(), format)


def load_verbs(path, dim: int = None) -> dict:
    """Verb matrices in the word-tensor file format; every entry must be a square matrix."""
    from .evalsem import load_word_tensors
    verbs = load_word_tensors(path)
    return check_verbs(verbs, dim)


def check_verbs(verbs: Mapping, dim: int = None) -> dict:
    out = {}
    for w, m in verbs.items():
        m = np.asarray(m, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DataError(f'verb {w!r} is not a square matrix (shape {m.shape})')
        if dim is not None and m.shape[0] != dim:
            raise DataError(f'verb {w!r} has dimension {m.shape[0]}, embeddings have {dim}')
        out[w] = m
    return out


def verbs_from_triples(triples, emb: Mapping) -> dict:
    """``verb -> sum of subject (x) object`` over ``(verb, subject, object)`` triples."""
    out: dict = {}
    skipped = 0
    for verb, subj, obj in triples:
        if subj not in emb or obj not in emb:
            skipped += 1
            continue
        m = np.multiply.outer(emb[subj], emb[obj])
        out[verb] = out[verb] + m if verb in out else m
    if skipped:
        warnings.warn(f'{skipped} triple(s) skipped for words without embeddings', stacklevel=2)
    return out


def load_triples(path) -> list:
    triples = []
    with open(path, encoding='utf-8') as fh:
        for lineno, ln in enumerate(fh, start=1):
            if not ln.strip() or ln.startswith('#'):
                continue
            parts = ln.replace(',', ' ').split()
            if len(parts) != 3:
                raise DataError('expected "verb subject object"', lineno)
            triples.append(tuple(parts))
    return triples


########################################################################################################################
# Composition
########################################################################################################################

def _vec(table, word, kind='word'):
    try:
        return table[word]
    except KeyError:
        raise MissingWordError(f'no {kind} for {word!r}') from None


def prep_combine(x, y, prep_mode: str = 'mult'):
    if prep_mode == 'mult':
        return x * y
    if prep_mode == 'add':
        return x + y
    raise ValueError(f'unknown prep mode {prep_mode!r}; expected mult or add')


def copy_model_vector(model: CopyModel, a, b, c, d, prep_mode: str = 'mult'):
    """The phrase vector from head noun ``a``, subject ``b``, verb matrix ``c`` and gerund matrix ``d``."""
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    c, d = np.asarray(c, dtype=np.float64), np.asarray(d, dtype=np.float64)
    if not (a.shape == b.shape and c.shape == d.shape == (a.shape[0], a.shape[0])):
        raise ValueError(f'dimension mismatch: vectors {a.shape}, {b.shape}, matrices {c.shape}, {d.shape}')
    one = np.ones_like(a)
    cb = c @ b

    def verb(x):
        return x * cb

    if model is CopyModel.CogebraA:
        return prep_combine(verb(a), d @ one, prep_mode)
    if model is CopyModel.CogebraB:
        return prep_combine(verb(one), d @ a, prep_mode)
    if model is CopyModel.CofreeInspired:
        return prep_combine(verb(a) + d @ one, verb(one) + d @ a, prep_mode)
    if model is CopyModel.Full:
        return prep_combine(verb(a), d @ a, prep_mode)
    raise ValueError(f'unknown copy model {model!r}')


def compose_phrase(entry: GapEntry, model: CopyModel, emb: Mapping, verbs: Mapping, prep_mode: str = 'mult',
                   verb: str = None):
    """Phrase vector for ``entry``, using ``verb`` in place of the ambiguous verb if given."""
    a = _vec(emb, entry.head_noun)
    b = sum(_vec(emb, w) for w in entry.subject)
    c = _vec(verbs, verb or entry.amb_verb, 'verb matrix')
    d = _vec(verbs, entry.gerund_verb, 'verb matrix')
    return copy_model_vector(model, a, b, c, d, prep_mode)


########################################################################################################################
# Scoring
########################################################################################################################

@dataclass
class EntryResult:
    group_id: str
    sim_correct: float
    sim_other: float
    score: float


@dataclass
class Report:
    model: str
    metric: str
    prep_mode: str
    entries: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    @property
    def score(self) -> float:
        """Mean correctness over scored entries (NaN if none was scored)."""
        if not self.entries:
            return float('nan')
        return float(np.mean([e.score for e in self.entries]))

    def to_dict(self) -> dict:
        return {'model': self.model, 'metric': self.metric, 'prep': self.prep_mode,
                'score': _json_float(self.score), 'scored': len(self.entries),
                'entries': [{k: _json_float(v) for k, v in asdict(e).items()} for e in self.entries],
                'skipped': [{'group_id': g, 'reason': r} for g, r in self.skipped]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_table(self) -> str:
        rows = [('group', 'sim_correct', 'sim_other', 'score')]
        rows += [(e.group_id, f'{e.sim_correct:.9g}', f'{e.sim_other:.9g}', f'{e.score:g}') for e in self.entries]
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ['  '.join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
                 for r in rows]
        lines.append(f'model {self.model}, metric {self.metric}, prep {self.prep_mode}: '
                     f'score {self.score:.9g} over {len(self.entries)} entries, {len(self.skipped)} skipped')
        for g, r in self.skipped:
            lines.append(f'skipped {g}: {r}')
        return '\n'.join(lines)


def _json_float(v):
    if isinstance(v, float) and not np.isfinite(v):
        return None
    return float(f'{v:.9g}') if isinstance(v, float) else v


def _similarity(metric: str):
    if metric == 'cosine':
        return cosine
    if metric == 'euclidean':
        # closer means smaller distance; negate so that larger is always closer
        def neg_distance(a, b):
            if not np.any(a) or not np.any(b):
                raise ZeroVectorError('zero phrase vector')
            return -euclidean(a, b)
        return neg_distance
    raise ValueError(f'unknown metric {metric!r}; expected cosine or euclidean')


def run_disambiguation(dataset, model: CopyModel, emb: Mapping, verbs: Mapping, metric: str = 'cosine',
                       prep_mode: str = 'mult') -> Report:
    dataset = list(dataset)
    if not dataset:
        raise ValueError('empty dataset')
    sim = _similarity(metric)
    report = Report(model.value, metric, prep_mode)
    for entry in dataset:
        try:
            p = compose_phrase(entry, model, emb, verbs, prep_mode)
            p1 = compose_phrase(entry, model, emb, verbs, prep_mode, verb=entry.meaning1)
            p2 = compose_phrase(entry, model, emb, verbs, prep_mode, verb=entry.meaning2)
            s1, s2 = sim(p, p1), sim(p, p2)
        except (MissingWordError, ZeroVectorError, ValueError) as e:
            report.skipped.append((entry.group_id, str(e)))
            continue
        right, other = (s1, s2) if entry.correct == 1 else (s2, s1)
        score = 1.0 if right > other else 0.5 if right == other else 0.0
        report.entries.append(EntryResult(entry.group_id, right, other, score))
    return report
