"""Shared fixtures: hand-built toy models and a trained bilingual setup."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import pytest

from lde import (
    Engine,
    EngineConfig,
    LanguagePack,
    SelectorParams,
    Threshold,
    TrigramModel,
    build_alphabet,
    build_training_set,
    make_pack,
    reduce_parameters,
    train_selector,
    train_trigram,
)
from lde.ngram import Alphabet
from lde.synth import SyntheticLanguage, corpus_lines, disjoint_pair, intra_sentences
from lde.trie import Trie, trie_from_pairs, word_frequencies


def model_from_probs(
    alphabet: Alphabet,
    default_p: float,
    overrides: dict[tuple[str, str, str], float] | None = None,
    language: str = "xx",
) -> TrigramModel:
    """Hand-built model: every conditional is default_p except overrides.

    Deliberately skips training so tests can pin exact table values.
    """
    v = alphabet.size
    table = [math.log(default_p)] * (v * v * v)
    for (c2, c1, c0), p in (overrides or {}).items():
        i = (alphabet.index_of(c2) * v + alphabet.index_of(c1)) * v + alphabet.index_of(c0)
        table[i] = math.log(p)
    return TrigramModel(language=language, alphabet=alphabet, table=table, alpha=0.5)


def simple_pack(model: TrigramModel, tau: float, lexicon_words=(), pronouns=()) -> LanguagePack:
    lexicon = Trie()
    for word in lexicon_words:
        lexicon.insert(word)
    nouns = Trie()
    for word in pronouns:
        nouns.insert(word)
    return make_pack(
        model, Threshold(language=model.language, tau=tau), lexicon, nouns
    )


@pytest.fixture()
def toy_alphabet() -> Alphabet:
    return Alphabet((" ", "a", "b"))


@dataclass
class BilingualSetup:
    """Everything trained end-to-end for the two synthetic languages."""

    lang_a: SyntheticLanguage
    lang_b: SyntheticLanguage
    corpora: dict[str, list[str]]
    models: dict[str, TrigramModel]
    word_lists: dict[str, list[str]]
    lexicons: dict[str, Trie]
    params: dict[str, SelectorParams]
    thresholds: dict[str, Threshold]
    packs: list[LanguagePack]
    engine: Engine
    train_seconds: float
    r: float = 0.35

    def held_out_sentences(self, n: int = 500, seed: int = 1133):
        return intra_sentences(self.lang_a, self.lang_b, n, seed=seed)


def build_bilingual(seed: int = 11, n_lines: int = 6000, r: float = 0.35) -> BilingualSetup:
    t0 = time.perf_counter()
    lang_a, lang_b = disjoint_pair("aa", "bb", vocab_size=4000, loan_fraction=0.10, seed=seed)
    corpora = {
        lang_a.code: corpus_lines(lang_a, n_lines, seed=seed * 100 + 21),
        lang_b.code: corpus_lines(lang_b, n_lines, seed=seed * 100 + 22),
    }
    models: dict[str, TrigramModel] = {}
    word_lists: dict[str, list[str]] = {}
    lexicons: dict[str, Trie] = {}
    for code, lines in corpora.items():
        alphabet = build_alphabet(lines, max_symbols=26)
        models[code] = train_trigram(lines, alphabet, 0.5, language=code)
        frequencies = word_frequencies(lines)
        word_lists[code] = [word for word, _ in frequencies]
        lexicons[code] = trie_from_pairs(frequencies[:20000])

    params: dict[str, SelectorParams] = {}
    thresholds: dict[str, Threshold] = {}
    for code in corpora:
        rows = build_training_set(word_lists, models, code, 2500, 2500)
        params[code] = train_selector(rows, language=code)
        thresholds[code] = reduce_parameters(params[code])

    packs = [make_pack(models[c], thresholds[c], lexicons[c]) for c in corpora]
    engine = Engine(packs, EngineConfig(languages=tuple(corpora), r=r))
    return BilingualSetup(
        lang_a=lang_a,
        lang_b=lang_b,
        corpora=corpora,
        models=models,
        word_lists=word_lists,
        lexicons=lexicons,
        params=params,
        thresholds=thresholds,
        packs=packs,
        engine=engine,
        train_seconds=time.perf_counter() - t0,
        r=r,
    )


@pytest.fixture(scope="session")
def bilingual() -> BilingualSetup:
    return build_bilingual()
