"""Character trigram emission models.

Each supported language gets its own trigram model trained on a monolingual
corpus, completely independent of the other languages.  A model stores a
dense table of smoothed conditional log-probabilities over its alphabet
(whitespace included as a first-class symbol, plus one reserved slot for
out-of-alphabet characters).

Words are scored with a leading space: the first character is conditioned
on whitespace, every later character on the two preceding ones.  Because
normalized text never contains two adjacent spaces, the (space, space)
context row can never be produced by real trigram counts, so that row is
used to hold the space-conditioned first-character distribution.  This
keeps the whole model in a single dense cube.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Sequence

WHITESPACE = " "

DEFAULT_ALPHA = 0.5
DEFAULT_RECENCY = 0.7


class _CharTable(dict):
    """Lazy str.translate table; classification is cached per codepoint."""

    def __init__(self, classify):
        super().__init__()
        self._classify = classify

    def __missing__(self, codepoint):
        result = self._classify(chr(codepoint))
        self[codepoint] = result
        return result


def _normalize_class(ch: str):
    if ch.isspace():
        return WHITESPACE
    category = unicodedata.category(ch)
    if category[0] in ("N", "P"):
        return None
    return ch


_NORMALIZE_TABLE = _CharTable(_normalize_class)


def normalize_text(raw: str) -> str:
    """Lowercase, drop digits/punctuation, collapse runs of whitespace.

    Characters that are not part of any alphabet (e.g. foreign-script
    letters) are kept; they map to the reserved out-of-alphabet symbol
    at scoring time.
    """
    return " ".join(raw.lower().translate(_NORMALIZE_TABLE).split())


class Alphabet:
    """Ordered character set with whitespace pinned at index 0.

    Characters outside the set share a single reserved index (`oov`) just
    past the last real symbol, so a model table has `size` = len(symbols)+1
    slots per axis.
    """

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Sequence[str]):
        symbols = tuple(symbols)
        if len(symbols) < 2:
            raise ValueError("alphabet needs whitespace plus at least one letter")
        if symbols[0] != WHITESPACE:
            raise ValueError("alphabet must have whitespace at index 0")
        if WHITESPACE in symbols[1:]:
            raise ValueError("whitespace may appear only once")
        if len(set(symbols)) != len(symbols):
            raise ValueError("duplicate symbols in alphabet")
        for sym in symbols:
            if len(sym) != 1:
                raise ValueError(f"alphabet symbols are single characters, got {sym!r}")
        self.symbols = symbols
        self._index = {ch: i for i, ch in enumerate(symbols)}

    @property
    def oov(self) -> int:
        return len(self.symbols)

    @property
    def size(self) -> int:
        """Number of table slots per axis: the symbols plus the oov slot."""
        return len(self.symbols) + 1

    def index_of(self, ch: str) -> int:
        return self._index.get(ch, len(self.symbols))

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __repr__(self) -> str:
        return f"Alphabet({''.join(self.symbols[1:])!r})"


def build_alphabet(corpus: Iterable[str], max_symbols: int = 26) -> Alphabet:
    """Pick the most frequent normalized characters of a corpus.

    Keeps whitespace plus up to `max_symbols` characters, most frequent
    first (ties broken by codepoint).  Everything else maps to oov.
    """
    counts: dict[str, int] = {}
    for chunk in corpus:
        for ch in normalize_text(chunk):
            if ch != WHITESPACE:
                counts[ch] = counts.get(ch, 0) + 1
    if not counts:
        raise ValueError("empty corpus")
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    kept = [ch for ch, _ in ranked[:max_symbols]]
    return Alphabet((WHITESPACE, *kept))


@dataclass
class TrigramModel:
    """Dense smoothed conditional log-probability cube for one language.

    `table` is flat, row-major over (c_{k-2}, c_{k-1}, c_k) with each axis
    of length `alphabet.size`.  Immutable after training apart from the
    `reads` instrumentation counter.
    """

    language: str
    alphabet: Alphabet
    table: list[float]
    alpha: float
    order: int = 3
    reads: int = field(default=0, compare=False)

    def __post_init__(self):
        v = self.alphabet.size
        if len(self.table) != v * v * v:
            raise ValueError(
                f"table has {len(self.table)} entries, expected {v ** 3}"
            )

    def log_prob(self, prev2: int, prev1: int, current: int) -> float:
        v = self.alphabet.size
        return self.table[(prev2 * v + prev1) * v + current]

    def word_log_prob(self, word: str) -> float:
        """Log-probability of one word, first character conditioned on space."""
        if not word:
            raise ValueError("empty token")
        table = self.table
        v = self.alphabet.size
        get = self.alphabet._index.get
        oov = v - 1
        prev2 = 0
        prev1 = 0
        total = 0.0
        for ch in word:
            cur = get(ch, oov)
            total += table[(prev2 * v + prev1) * v + cur]
            prev2 = prev1
            prev1 = cur
        self.reads += len(word)
        return total

    def sequence_log_prob(self, words: Sequence[str], r: float = DEFAULT_RECENCY) -> float:
        """Recency-weighted sum of word log-probabilities.

        Word k of n is weighted r^(n-k), so the trailing word always counts
        in full and earlier words fade geometrically.
        """
        if not words:
            raise ValueError("empty sequence")
        if not 0.0 < r <= 1.0:
            raise ValueError(f"recency factor must be in (0, 1], got {r}")
        n = len(words)
        total = 0.0
        for k, word in enumerate(words):
            total += r ** (n - 1 - k) * self.word_log_prob(word)
        return total


def _line_indices(line: str, alphabet: Alphabet) -> list[int]:
    """Index sequence for one normalized line, every word space-prefixed."""
    out: list[int] = []
    get = alphabet._index.get
    oov = alphabet.oov
    for word in line.split():
        out.append(0)
        out.extend(get(ch, oov) for ch in word)
    return out


def train_trigram(
    corpus_lines: Iterable[str],
    alphabet: Alphabet,
    smoothing_alpha: float = DEFAULT_ALPHA,
    language: str = "",
) -> TrigramModel:
    """Count trigrams over a corpus and build the smoothed log-prob cube.

    Each line is treated as space-delimited words with a leading space per
    word; the spaces between words contribute their own trigrams.  The
    first-character-after-space distribution is counted into the
    (space, space) context row.  Additive smoothing with `smoothing_alpha`
    keeps every row finite and summing to one.
    """
    if smoothing_alpha <= 0:
        raise ValueError("smoothing_alpha must be positive")
    if alphabet.symbols[0] != WHITESPACE:
        raise ValueError("alphabet missing whitespace")

    v = alphabet.size
    counts = [0] * (v * v * v)
    v2 = v * v
    language_seen = False
    for raw_line in corpus_lines:
        line = normalize_text(raw_line)
        if not line:
            continue
        language_seen = True
        seq = _line_indices(line, alphabet)
        for i in range(len(seq) - 2):
            counts[seq[i] * v2 + seq[i + 1] * v + seq[i + 2]] += 1
        # space-conditioned first characters, housed at context (space, space)
        for i, sym in enumerate(seq):
            if sym == 0:
                counts[seq[i + 1]] += 1
    if not language_seen:
        raise ValueError("empty corpus")

    log = math.log
    table = [0.0] * len(counts)
    for ctx in range(v2):
        base = ctx * v
        row_total = sum(counts[base : base + v])
        for z in range(v):
            table[base + z] = log(
                (counts[base + z] + smoothing_alpha) / (row_total + smoothing_alpha * v)
            )
    return TrigramModel(
        language=language, alphabet=alphabet, table=table, alpha=smoothing_alpha
    )


def perplexity(model: TrigramModel, lines: Iterable[str]) -> float:
    """Per-character perplexity of held-out text under the model."""
    total_lp = 0.0
    total_chars = 0
    for raw_line in lines:
        line = normalize_text(raw_line)
        for word in line.split():
            total_lp += model.word_log_prob(word)
            total_chars += len(word)
    if total_chars == 0:
        raise ValueError("no scorable text")
    return math.exp(-total_lp / total_chars)
