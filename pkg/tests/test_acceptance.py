"""Acceptance gate: one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS/FAIL line
for every criterion.  Criterion 9's whole-file size bound is expected to
fail: DEFLATE cannot fit a 50,000-word lexicon plus the trigram table in
64 KB (see README, "Known limitations"); the table-only bound passes.
"""

import math
import random
import statistics
import struct
import time
import zlib
from collections import Counter

import pytest

from lde import (
    Engine,
    EngineConfig,
    DetectionPath,
    NotAPackError,
    PackChecksumError,
    PackVersionError,
    Threshold,
    TruncatedPackError,
    eval_intra,
    make_pack,
    read_pack,
    train_trigram,
    write_pack,
)
from lde.ngram import Alphabet
from lde.pack import MAGIC
from lde.synth import LATIN, corpus_lines, make_language
from lde.trie import Trie, trie_from_pairs

from conftest import model_from_probs, simple_pack

LOG_HALF = math.log(0.5)


def verdict(cid: str, ok: bool, detail: str) -> None:
    print(f"[{cid}] {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{cid}: {detail}"


# ------------------------------------------------------------------ #
#  1. reduction equivalence
# ------------------------------------------------------------------ #

def test_c01_reduction_equivalence_oracle():
    rng = random.Random(101)
    mismatches = 0
    for _ in range(10_000):
        w = rng.uniform(1e-3, 8.0)
        b = rng.uniform(-30.0, 30.0)
        x = rng.uniform(-60.0, 5.0)
        tau = ((w - 1.0) * math.log(2.0) - b) / w
        full = w * x + b >= LOG_HALF
        reduced = x - tau >= LOG_HALF
        mismatches += full != reduced
    verdict(
        "C1",
        mismatches == 0,
        f"reduced decision == full decision on 10000 random (w,b,x): "
        f"{mismatches} mismatches",
    )


# ------------------------------------------------------------------ #
#  2. row-stochasticity
# ------------------------------------------------------------------ #

def test_c02_row_stochasticity(bilingual):
    toy_alphabet = Alphabet((" ", "a", "b"))
    models = list(bilingual.models.values()) + [
        train_trigram(["ab ab", "aba b", "bb aa"], toy_alphabet, 1.0, language="toy")
    ]
    worst = 0.0
    for model in models:
        v = model.alphabet.size
        for ctx in range(v * v):
            row = model.table[ctx * v : (ctx + 1) * v]
            worst = max(worst, abs(math.fsum(map(math.exp, row)) - 1.0))
    verdict(
        "C2",
        worst <= 1e-9,
        f"all context rows sum to 1 on {len(models)} trained models "
        f"(worst deviation {worst:.2e})",
    )


# ------------------------------------------------------------------ #
#  3. brute-force trigram oracle
# ------------------------------------------------------------------ #

def test_c03_brute_force_trigram_oracle():
    corpus = ["ab ab", "aba b", "bb aa"]  # 15 characters, well under 50
    assert sum(len(line) for line in corpus) <= 50
    alphabet = Alphabet((" ", "a", "b"))
    alpha = 1.0
    model = train_trigram(corpus, alphabet, alpha)

    # independent string-slicing oracle
    trigrams = Counter()
    first_after_space = Counter()
    for line in corpus:
        padded = "".join(" " + word for word in line.split())
        for i in range(len(padded) - 2):
            trigrams[padded[i : i + 3]] += 1
        for i, ch in enumerate(padded):
            if ch == " ":
                first_after_space[padded[i + 1]] += 1

    symbols = list(alphabet.symbols) + ["\x00"]  # index 3 = oov stand-in
    v = alphabet.size
    mismatches = 0
    for i2, c2 in enumerate(symbols):
        for i1, c1 in enumerate(symbols):
            if (i2, i1) == (0, 0):
                counts = {i0: first_after_space[c0] for i0, c0 in enumerate(symbols)}
            else:
                counts = {i0: trigrams[c2 + c1 + c0] for i0, c0 in enumerate(symbols)}
            total = sum(counts.values())
            for i0 in range(v):
                expected = math.log((counts[i0] + alpha) / (total + alpha * v))
                if model.log_prob(i2, i1, i0) != expected:
                    mismatches += 1
    verdict(
        "C3",
        mismatches == 0,
        f"every table entry equals the hand-count oracle exactly "
        f"({v ** 3} entries, {mismatches} mismatches)",
    )


# ------------------------------------------------------------------ #
#  4. edit-distance oracle
# ------------------------------------------------------------------ #

def _levenshtein(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def test_c04_edit_distance_oracle():
    rng = random.Random(404)
    mismatches = 0
    lexicons = 100
    for _ in range(lexicons):
        letters = "".join(rng.sample("abcdefghijklmnopqrstuvwxyz", rng.randint(4, 9)))
        words = {
            "".join(rng.choices(letters, k=rng.randint(1, 9)))
            for _ in range(rng.randint(50, 1000))
        }
        trie = Trie()
        for word in words:
            trie.insert(word, rng.randint(1, 99))
        for _ in range(3):
            query = "".join(rng.choices(letters, k=rng.randint(1, 10)))
            got = {w for w, _ in trie.edit1_candidates(query, max_results=10_000)}
            expected = {w for w in words if _levenshtein(query, w) <= 1}
            mismatches += got != expected
    verdict(
        "C4",
        mismatches == 0,
        f"edit1_candidates equals brute-force Levenshtein<=1 on {lexicons} "
        f"random lexicons ({mismatches} mismatches)",
    )


# ------------------------------------------------------------------ #
#  5. pack round-trip decisions + error paths
# ------------------------------------------------------------------ #

def test_c05_round_trip_decisions(bilingual, tmp_path):
    paths = {}
    for code, model in bilingual.models.items():
        path = tmp_path / f"{code}.ldep"
        write_pack(model, bilingual.thresholds[code], bilingual.lexicons[code], path)
        paths[code] = path
    engine_disk = Engine(
        [read_pack(p) for p in paths.values()],
        EngineConfig(languages=tuple(bilingual.models), r=bilingual.r),
    )
    engine_mem = bilingual.engine

    rng = random.Random(505)
    vocabularies = (bilingual.lang_a.vocabulary, bilingual.lang_b.vocabulary)
    probes = 10_000
    flips = 0
    for _ in range(probes):
        words = [rng.choice(rng.choice(vocabularies)) for _ in range(rng.randint(1, 2))]
        raw = " ".join(words)
        mem = engine_mem.detect(raw, engine_mem.new_state())
        disk = engine_disk.detect(raw, engine_disk.new_state())
        flips += mem.language != disk.language
    flip_rate = flips / probes

    # error paths: each failure mode raises its own type
    sample = paths[next(iter(paths))]
    data = sample.read_bytes()

    bad_magic = tmp_path / "bad_magic.ldep"
    bad_magic.write_bytes(b"NOTAPACK" + data[8:])
    with pytest.raises(NotAPackError):
        read_pack(bad_magic)

    corrupt = tmp_path / "corrupt.ldep"
    flipped = bytearray(data)
    flipped[-1] ^= 0x55  # CRC trailer byte
    corrupt.write_bytes(bytes(flipped))
    with pytest.raises(PackChecksumError):
        read_pack(corrupt)

    truncated = tmp_path / "truncated.ldep"
    truncated.write_bytes(data[: len(data) // 3])
    with pytest.raises(TruncatedPackError):
        read_pack(truncated)

    versioned = tmp_path / "versioned.ldep"
    payload = bytearray(zlib.decompressobj().decompress(data[8:]))
    struct.pack_into("<H", payload, 0, 2)
    versioned.write_bytes(
        MAGIC + zlib.compress(bytes(payload), 9) + struct.pack("<I", zlib.crc32(bytes(payload)))
    )
    with pytest.raises(PackVersionError):
        read_pack(versioned)

    verdict(
        "C5",
        flip_rate < 0.001,
        f"pack round trip flips {flips}/{probes} decisions "
        f"({100 * flip_rate:.3f}% < 0.1%); magic/CRC/truncation/version "
        f"errors each raised distinctly",
    )


# ------------------------------------------------------------------ #
#  6. synthetic code-switch F1
# ------------------------------------------------------------------ #

def test_c06_synthetic_code_switch_f1(bilingual):
    t0 = time.perf_counter()
    held_out = bilingual.held_out_sentences(500)
    report = eval_intra(held_out, bilingual.engine)
    eval_seconds = time.perf_counter() - t0
    total_seconds = bilingual.train_seconds + eval_seconds
    ok = report.macro_f1 >= 0.95 and total_seconds < 120.0
    verdict(
        "C6",
        ok,
        f"intra-sentential macro-F1 {report.macro_f1:.4f} >= 0.95 on 500 "
        f"held-out sentences (code-switch rate {report.code_switch_rate:.1f}%, "
        f"train+eval {total_seconds:.1f}s < 120s)",
    )


# ------------------------------------------------------------------ #
#  7. recency crossover
# ------------------------------------------------------------------ #

def test_c07_recency_crossover():
    alphabet = Alphabet((" ", "a", "b"))
    p_a2 = math.exp(-3.186) ** 0.5  # model A on word "bb", per conditional
    p_b1 = math.exp(-4.386) ** 0.5  # model B on word "aa", per conditional
    model_a = model_from_probs(
        alphabet, 0.01,
        {(" ", " ", "a"): 0.5, (" ", "a", "a"): 0.5,
         (" ", " ", "b"): p_a2, (" ", "b", "b"): p_a2},
        language="A",
    )
    model_b = model_from_probs(
        alphabet, 0.01,
        {(" ", " ", "b"): 0.5, (" ", "b", "b"): 0.5,
         (" ", " ", "a"): p_b1, (" ", "a", "a"): p_b1},
        language="B",
    )
    tau_a, tau_b = -10.0, -10.5
    w1, w2 = "aa", "bb"  # leading word A-ish, trailing word B-ish

    a1, a2 = model_a.word_log_prob(w1), model_a.word_log_prob(w2)
    b1, b2 = model_b.word_log_prob(w1), model_b.word_log_prob(w2)
    # adjusted_A > adjusted_B  <=>  r*(a1-b1-dtau) > (b2-a2+dtau)
    dtau = tau_a - tau_b
    r_star = (b2 - a2 + dtau) / (a1 - b1 - dtau)
    assert 0.05 < r_star < 0.95

    def detected(r: float) -> str:
        engine = Engine(
            [
                make_pack(model_a, Threshold("A", tau_a), Trie()),
                make_pack(model_b, Threshold("B", tau_b), Trie()),
            ],
            EngineConfig(languages=("A", "B"), r=r),
        )
        detection = engine.detect(f"{w1} {w2}", engine.new_state())
        assert detection.path is DetectionPath.NORMAL
        return detection.language

    assert detected(r_star - 1e-6) == "B"  # trailing word wins below r*
    assert detected(min(1.0, r_star + 1e-6)) == "A"

    lo, hi = 0.05, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if detected(mid) == "B":
            lo = mid
        else:
            hi = mid
    measured = (lo + hi) / 2
    error = abs(measured - r_star)
    verdict(
        "C7",
        error <= 1e-9,
        f"detection flips at r={measured:.12f}, analytic crossover "
        f"r*={r_star:.12f} (|error| {error:.2e} <= 1e-9)",
    )


# ------------------------------------------------------------------ #
#  8. latency with ten packs
# ------------------------------------------------------------------ #

@pytest.fixture(scope="module")
def ten_pack_engine():
    rng = random.Random(808)
    packs = []
    contexts = []
    for i in range(10):
        letters = "".join(rng.sample(LATIN, 13))
        lang = make_language(f"l{i}", letters, vocab_size=1200, seed=900 + i)
        lines = corpus_lines(lang, 800, seed=950 + i)
        alphabet = Alphabet((" ", *dict.fromkeys("".join(sorted(letters)))))
        model = train_trigram(lines, alphabet, 0.5, language=lang.code)
        lexicon = trie_from_pairs(
            (word, 1200 - rank) for rank, word in enumerate(lang.vocabulary[:5000])
        )
        packs.append(make_pack(model, Threshold(lang.code, -15.0), lexicon))
        contexts.extend(
            f"{rng.choice(lang.vocabulary)} {rng.choice(lang.vocabulary)}"
            for _ in range(400)
        )
    rng.shuffle(contexts)
    engine = Engine(packs, EngineConfig(languages=tuple(p.language for p in packs)))
    return engine, contexts


def test_c08_latency_ten_packs(ten_pack_engine):
    import gc

    engine, contexts = ten_pack_engine
    for raw in contexts[:300]:
        engine.detect(raw, engine.new_state())

    samples = []
    gc_enabled = gc.isenabled()
    gc.disable()
    try:
        for raw in contexts[:3000]:
            state = engine.new_state()
            t0 = time.perf_counter_ns()
            engine.detect(raw, state)
            samples.append(time.perf_counter_ns() - t0)
    finally:
        if gc_enabled:
            gc.enable()
    samples_us = sorted(ns / 1000.0 for ns in samples)
    mean_us = statistics.fmean(samples_us)
    p99_us = samples_us[int(len(samples_us) * 0.99)]
    verdict(
        "C8",
        mean_us <= 100.0 and p99_us <= 500.0,
        f"10-pack cold-cache latency mean {mean_us:.1f}us <= 100us, "
        f"p99 {p99_us:.1f}us <= 500us ({len(samples_us)} unique contexts)",
    )


# ------------------------------------------------------------------ #
#  9. pack size: table bound passes, 64 KB total is a known red
# ------------------------------------------------------------------ #

@pytest.fixture(scope="module")
def full_alphabet_pack(tmp_path_factory):
    lang = make_language("zz", LATIN, vocab_size=50_000, seed=909)
    lines = corpus_lines(lang, 4000, seed=919)
    alphabet = Alphabet((" ", *LATIN))
    model = train_trigram(lines, alphabet, 0.5, language="zz")
    lexicon = trie_from_pairs(
        (word, max(1, int(100_000 / (rank + 1) ** 1.05)))
        for rank, word in enumerate(lang.vocabulary)
    )
    assert len(lexicon) == 50_000
    assert len(alphabet) == 27
    path = tmp_path_factory.mktemp("size") / "zz.ldep"
    sizes = write_pack(model, Threshold("zz", -14.0), lexicon, path)
    return path, sizes


def test_c09_table_size_bound(full_alphabet_pack):
    _, sizes = full_alphabet_pack
    verdict(
        "C9-table",
        sizes.table_compressed <= 24 * 1024,
        f"compressed trigram table {sizes.table_compressed / 1024:.1f} KB "
        f"<= 24 KB (raw {sizes.table_raw / 1024:.1f} KB)",
    )


def test_c09_total_size_bound(full_alphabet_pack):
    # Known red: DEFLATE on flat word/count records cannot reach 64 KB for
    # 50k distinct words (information content alone is ~29 KB and zlib's
    # per-record overhead triples it).  Asserted as specified, not relaxed.
    path, sizes = full_alphabet_pack
    actual = path.stat().st_size
    verdict(
        "C9-total",
        actual <= 64 * 1024,
        f"pack with 27-symbol alphabet and 50k-word lexicon is "
        f"{actual / 1024:.1f} KB (bound 64 KB)",
    )


# ------------------------------------------------------------------ #
#  10. typo rescue scenario
# ------------------------------------------------------------------ #

def test_c10_typo_rescue_scenario():
    alphabet = Alphabet(tuple(" abkilmns"))
    model_x = model_from_probs(
        alphabet, 0.05, {(" ", " ", "a"): 0.5, (" ", "a", "b"): 0.5}, language="xx"
    )
    model_y = model_from_probs(
        alphabet, 0.05,
        {(" ", " ", "k"): 0.5, (" ", "k", "a"): 0.5, ("k", "a", "l"): 0.5},
        language="yy",
    )
    model_z = model_from_probs(
        alphabet, 0.05,
        {(" ", " ", "k"): 0.5, (" ", "k", "s"): 0.5, ("k", "s", "i"): 0.5},
        language="zz",
    )
    pack_x = simple_pack(model_x, tau=-2.0, lexicon_words=("ab",))
    pack_y = simple_pack(model_y, tau=-2.0, lexicon_words=("kal",))
    pack_z = simple_pack(model_z, tau=-2.0, lexicon_words=("ksi",))

    # (a) unique candidate: "ksl" is out-of-lexicon everywhere and one edit
    # from yy's "kal"; the corrected context passes yy's threshold
    engine = Engine([pack_x, pack_y], EngineConfig(languages=("xx", "yy")))
    rescued = engine.detect("ksl", engine.new_state())
    unique_ok = (
        rescued.path is DetectionPath.TYPO_RESCUE
        and rescued.language == "yy"
        and rescued.corrected == ("kal", "yy")
    )

    # (b) same token, candidates in two non-current languages: no rescue
    engine3 = Engine([pack_x, pack_y, pack_z], EngineConfig(languages=("xx", "yy", "zz")))
    ambiguous = engine3.detect("ksl", engine3.new_state())
    ambiguous_ok = (
        ambiguous.path is DetectionPath.FALLBACK and ambiguous.corrected is None
    )
    verdict(
        "C10",
        unique_ok and ambiguous_ok,
        f"unique candidate rescued as {rescued.corrected}, "
        f"two-language candidates fall back without rescue",
    )


# ------------------------------------------------------------------ #
#  11. cache behavior
# ------------------------------------------------------------------ #

def test_c11_cache_properties(bilingual):
    engine = Engine(
        bilingual.packs,
        EngineConfig(languages=tuple(bilingual.models), r=bilingual.r, cache_capacity=4),
    )
    state = engine.new_state()
    raw = " ".join(bilingual.lang_a.vocabulary[:2])
    engine.detect(raw, state)
    reads_before = sum(p.model.reads for p in engine.packs.values())
    repeat = engine.detect(raw, state)
    reads_after = sum(p.model.reads for p in engine.packs.values())
    zero_reads = reads_after == reads_before and repeat.path is DetectionPath.CACHE_HIT

    vocab = bilingual.lang_b.vocabulary
    contexts = [f"{vocab[i]} {vocab[i + 1]}" for i in range(6)]
    for raw in contexts:
        engine.detect(raw, state)
    capacity_ok = len(state.cache) == 4
    evicted_ok = all(
        engine.detect(raw, state).path is not DetectionPath.CACHE_HIT
        for raw in [" ".join(bilingual.lang_a.vocabulary[:2]), contexts[0]]
    )
    verdict(
        "C11",
        zero_reads and capacity_ok and evicted_ok,
        f"repeat context reads 0 table entries and is a cache hit; "
        f"LRU holds exactly 4 of 7 contexts and evicts the oldest",
    )


# ------------------------------------------------------------------ #
#  supplementary timing claims (benchmark-derived, not numbered criteria)
# ------------------------------------------------------------------ #

def _median_detect_ns(engine, calls) -> float:
    samples = []
    for raw, state in calls:
        t0 = time.perf_counter_ns()
        engine.detect(raw, state)
        samples.append(time.perf_counter_ns() - t0)
    samples.sort()
    return samples[len(samples) // 2]


def test_cached_repeat_is_much_faster_than_cold(ten_pack_engine):
    engine, contexts = ten_pack_engine
    cold_calls = [(raw, engine.new_state()) for raw in contexts[:600]]
    warm_state = engine.new_state()
    engine.detect(contexts[0], warm_state)
    warm_calls = [(contexts[0], warm_state) for _ in range(600)]

    cold_ns = _median_detect_ns(engine, cold_calls)
    warm_ns = _median_detect_ns(engine, warm_calls)
    assert warm_ns * 10 <= cold_ns, (
        f"cached repeat {warm_ns}ns should be >=10x faster than cold {cold_ns}ns"
    )


def test_latency_scales_sublinearly_in_pack_count(ten_pack_engine):
    engine10, contexts = ten_pack_engine
    first_lang = engine10.config.languages[0]
    engine1 = Engine(
        [engine10.packs[first_lang]], EngineConfig(languages=(first_lang,))
    )
    calls1 = [(raw, engine1.new_state()) for raw in contexts[:600]]
    calls10 = [(raw, engine10.new_state()) for raw in contexts[:600]]
    t1 = _median_detect_ns(engine1, calls1)
    t10 = _median_detect_ns(engine10, calls10)
    assert t10 < 10 * t1, f"10-pack {t10}ns vs 1-pack {t1}ns is not sub-linear"
