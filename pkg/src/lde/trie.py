"""Prefix-tree vocabulary storage with edit-distance-1 search.

Used for two things at detection time: exact membership checks (is this
token a valid word / a listed proper noun) and fetching auto-correction
candidates one edit away from a typo.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .ngram import normalize_text


class _Node:
    __slots__ = ("children", "terminal", "weight")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.terminal = False
        self.weight = 0


class Trie:
    """Character trie; weights accumulate on repeated insertion."""

    def __init__(self):
        self._root = _Node()
        self._words = 0
        self._nodes = 1
        # nodes touched by the most recent edit1_candidates call
        self.last_search_visits = 0

    def insert(self, word: str, weight: int = 1) -> None:
        if not word:
            raise ValueError("empty word")
        node = self._root
        for ch in word:
            child = node.children.get(ch)
            if child is None:
                child = _Node()
                node.children[ch] = child
                self._nodes += 1
            node = child
        if not node.terminal:
            node.terminal = True
            self._words += 1
        node.weight += weight

    def contains(self, word: str) -> bool:
        node = self._root
        for ch in word:
            node = node.children.get(ch)
            if node is None:
                return False
        return node.terminal

    __contains__ = contains

    def __len__(self) -> int:
        return self._words

    @property
    def node_count(self) -> int:
        return self._nodes

    def items(self) -> Iterator[tuple[str, int]]:
        """All (word, weight) pairs in lexicographic order."""

        def walk(node: _Node, prefix: str):
            if node.terminal:
                yield prefix, node.weight
            for ch in sorted(node.children):
                yield from walk(node.children[ch], prefix + ch)

        yield from walk(self._root, "")

    def edit1_candidates(self, word: str, max_results: int = 10) -> list[tuple[str, int]]:
        """Words in the trie within Levenshtein distance 1 of `word`.

        Distance 0 (the word itself) counts.  Results are ordered by
        descending weight, then lexicographically, and truncated to
        `max_results`.  Branches whose running edit distance already
        exceeds 1 are pruned, so the search touches only a neighborhood
        of the query.
        """
        if not word:
            raise ValueError("empty word")
        found: list[tuple[str, int]] = []
        visits = 0
        m = len(word)

        # classic DP-row descent: row[j] = distance between the current
        # trie prefix and word[:j]
        def descend(node: _Node, prefix: list[str], row: list[int]):
            nonlocal visits
            for ch, child in node.children.items():
                visits += 1
                prev = row
                cur = [prev[0] + 1]
                for j in range(1, m + 1):
                    cost = 0 if word[j - 1] == ch else 1
                    cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
                prefix.append(ch)
                if child.terminal and cur[m] <= 1:
                    found.append(("".join(prefix), child.weight))
                if min(cur) <= 1:
                    descend(child, prefix, cur)
                prefix.pop()

        descend(self._root, [], list(range(m + 1)))
        self.last_search_visits = visits
        found.sort(key=lambda item: (-item[1], item[0]))
        return found[:max_results]


def trie_from_pairs(pairs: Iterable[tuple[str, int]]) -> Trie:
    trie = Trie()
    for word, weight in pairs:
        trie.insert(word, weight)
    return trie


def word_frequencies(lines: Iterable[str]) -> list[tuple[str, int]]:
    """Corpus words with counts, most frequent first (ties by word)."""
    counts: dict[str, int] = {}
    for raw in lines:
        for word in normalize_text(raw).split():
            counts[word] = counts.get(word, 0) + 1
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


def lexicon_from_lines(lines: Iterable[str], top_k: int = 50000) -> Trie:
    """Frequency-weighted lexicon: the top_k most frequent corpus words."""
    return trie_from_pairs(word_frequencies(lines)[:top_k])


def load_lexicon(path) -> Trie:
    """Read a word<TAB>count lexicon file."""
    trie = Trie()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            try:
                word, count = line.split("\t")
                trie.insert(word, int(count))
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: bad lexicon line {line!r}") from exc
    return trie


def save_lexicon(trie: Trie, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word, weight in sorted(trie.items(), key=lambda item: (-item[1], item[0])):
            fh.write(f"{word}\t{weight}\n")


def load_word_list(path) -> Trie:
    """Read a one-word-per-line list (e.g. proper nouns), case-insensitively."""
    trie = Trie()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            for word in normalize_text(raw).split():
                trie.insert(word)
    return trie
