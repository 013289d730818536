"""Context-level evaluation on word-tagged code-switched test sets.

Intra-sentential mode replays each sentence word by word, detecting the
language of every growing prefix exactly the way the engine sees typing;
inter-sentential mode makes one detection per full sentence against its
majority gold label.  Both produce per-language precision/recall/F1, a
confusion matrix, and the test set's code-switch rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .engine import Engine


@dataclass
class TaggedSentence:
    """One test sentence: (word, gold language) per token."""

    id: str
    tokens: list[tuple[str, str]]

    def words(self) -> list[str]:
        return [word for word, _ in self.tokens]


@dataclass
class EvalReport:
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    macro_f1: float
    accuracy: float
    confusion: dict[str, dict[str, int]]
    total: int
    code_switch_rate: float

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
            "confusion": self.confusion,
            "total_contexts": self.total,
            "code_switch_rate": self.code_switch_rate,
        }


def code_switch_rate(sentences: Iterable[TaggedSentence]) -> float:
    """Percentage of adjacent same-sentence token pairs that switch language."""
    pairs = 0
    switches = 0
    for sentence in sentences:
        labels = [gold for _, gold in sentence.tokens]
        for a, b in zip(labels, labels[1:]):
            pairs += 1
            if a != b:
                switches += 1
    if pairs == 0:
        return 0.0
    return 100.0 * switches / pairs


def _check_labels(sentences: Sequence[TaggedSentence], engine: Engine) -> None:
    known = set(engine.languages)
    for sentence in sentences:
        for _, gold in sentence.tokens:
            if gold not in known:
                raise ValueError(
                    f"sentence {sentence.id!r}: gold label {gold!r} "
                    f"is not an evaluated language"
                )


def _finish(
    confusion: dict[str, dict[str, int]], total: int, switch_rate: float
) -> EvalReport:
    languages = sorted(
        set(confusion) | {pred for row in confusion.values() for pred in row}
    )
    tp = {lang: confusion.get(lang, {}).get(lang, 0) for lang in languages}
    gold_count = {lang: sum(confusion.get(lang, {}).values()) for lang in languages}
    pred_count = {
        lang: sum(row.get(lang, 0) for row in confusion.values()) for lang in languages
    }
    precision = {}
    recall = {}
    f1 = {}
    for lang in languages:
        p = tp[lang] / pred_count[lang] if pred_count[lang] else 0.0
        r = tp[lang] / gold_count[lang] if gold_count[lang] else 0.0
        precision[lang] = p
        recall[lang] = r
        f1[lang] = 2.0 * p * r / (p + r) if (p + r) > 0 else 0.0
    macro = sum(f1.values()) / len(f1) if f1 else 0.0
    correct = sum(tp.values())
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        macro_f1=macro,
        accuracy=correct / total if total else 0.0,
        confusion=confusion,
        total=total,
        code_switch_rate=switch_rate,
    )


def eval_intra(sentences: Sequence[TaggedSentence], engine: Engine) -> EvalReport:
    """Per-word detection over growing sentence prefixes.

    Engine state is reset for every sentence, so sentence order never
    affects the report.  The first token is evaluated with a one-token
    context.
    """
    if not sentences:
        raise ValueError("empty test set")
    _check_labels(sentences, engine)
    confusion: dict[str, dict[str, int]] = {}
    total = 0
    for sentence in sentences:
        state = engine.new_state()
        words = sentence.words()
        for k, (_, gold) in enumerate(sentence.tokens, start=1):
            detection = engine.detect(" ".join(words[:k]), state)
            row = confusion.setdefault(gold, {})
            row[detection.language] = row.get(detection.language, 0) + 1
            total += 1
    return _finish(confusion, total, code_switch_rate(sentences))


def majority_label(sentence: TaggedSentence) -> str:
    """Most frequent gold label; ties go to the earlier first occurrence."""
    counts: dict[str, int] = {}
    for _, gold in sentence.tokens:
        counts[gold] = counts.get(gold, 0) + 1
    first_seen: dict[str, int] = {}
    for i, (_, gold) in enumerate(sentence.tokens):
        first_seen.setdefault(gold, i)
    return max(counts, key=lambda lang: (counts[lang], -first_seen[lang]))


def eval_inter(sentences: Sequence[TaggedSentence], engine: Engine) -> EvalReport:
    """One detection per full sentence against its majority gold label."""
    if not sentences:
        raise ValueError("empty test set")
    _check_labels(sentences, engine)
    confusion: dict[str, dict[str, int]] = {}
    total = 0
    for sentence in sentences:
        state = engine.new_state()
        gold = majority_label(sentence)
        detection = engine.detect(" ".join(sentence.words()), state)
        row = confusion.setdefault(gold, {})
        row[detection.language] = row.get(detection.language, 0) + 1
        total += 1
    return _finish(confusion, total, code_switch_rate(sentences))


def read_tagged_tsv(path) -> list[TaggedSentence]:
    """Parse a test set: `sentence_id<TAB>token<TAB>gold_lang` per line,
    blank line between sentences."""
    sentences: list[TaggedSentence] = []
    current: list[tuple[str, str]] = []
    current_id: str | None = None
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                if current:
                    sentences.append(TaggedSentence(id=current_id, tokens=current))
                    current = []
                    current_id = None
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(
                    f"{path}:{line_no}: expected 3 tab-separated fields, "
                    f"got {len(parts)}"
                )
            sid, token, gold = parts
            if not token or not gold:
                raise ValueError(f"{path}:{line_no}: empty token or label")
            if current_id is None:
                current_id = sid
            elif sid != current_id:
                raise ValueError(
                    f"{path}:{line_no}: sentence id changed from {current_id!r} "
                    f"to {sid!r} without a blank line"
                )
            current.append((token, gold))
    if current:
        sentences.append(TaggedSentence(id=current_id, tokens=current))
    return sentences


def write_tagged_tsv(sentences: Iterable[TaggedSentence], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sentence in sentences:
            for word, gold in sentence.tokens:
                fh.write(f"{sentence.id}\t{word}\t{gold}\n")
            fh.write("\n")
