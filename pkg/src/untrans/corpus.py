"""Data model for aligned interpretation corpora and loaders for the
external lexical resources (bilingual dictionaries, frequency table,
pronunciation lexicon).

Corpus files are UTF-8 JSON Lines, one sentence triple per line::

    {"talk_id": "t01", "sentence_index": 0,
     "tokens": [["In", "IN", 0.0, 0.21], ["California", "NNP", 0.21, 0.8], ...],
     "reference": ["カリフォルニア", "で", ...],
     "interpretations": {"B": [...], "A": [...], "S": [...]},
     "glossary": {"CO2": ["CO2"]},                 # optional
     "human": [["B", 11, 13, "untranslated"]],     # optional
     "terms": [{...}],                             # written by annotation
     "gold": {"B": "OOOOOOOIOOOII"}}               # written by annotation
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import AlignmentError, ParseError, TimingError

RANKS = ("B", "A", "S")
TRANSLATOR = "T"
COVERAGE_LABELS = ("literal", "nonliteral", "untranslated")
VERDICTS = ("translated", "nonliteral", "untranslated")


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    start_time: float
    end_time: float
    talk_word_index: int = 0
    sent_word_index: int = 0


@dataclass(frozen=True)
class SourceSentence:
    tokens: tuple[Token, ...]
    sentence_index: int = 0

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    @property
    def surfaces(self):
        return [t.surface for t in self.tokens]


@dataclass(frozen=True)
class HumanAnnotation:
    talk_id: str
    sentence_index: int
    rank: str
    start: int
    end: int
    verdict: str


@dataclass(frozen=True)
class TermSpan:
    """Source span ``[start, end)`` judged against one rank's output."""

    start: int
    end: int
    rank: str = ""
    coverage: str | None = None
    matched_translation: str | None = None
    relevant: bool = False
    needs_review: bool = False

    def __len__(self):
        return self.end - self.start


@dataclass
class AlignedTriple:
    source: SourceSentence
    reference: list[str]
    interpretations: dict[str, list[str]] = field(default_factory=dict)
    human: list[HumanAnnotation] = field(default_factory=list)
    terms: list[TermSpan] = field(default_factory=list)
    gold: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def output_for(self, rank):
        """Target tokens produced by ``rank`` (``"T"`` is the translator)."""
        if rank == TRANSLATOR:
            return self.reference
        return self.interpretations.get(rank)


@dataclass
class Talk:
    talk_id: str
    triples: list[AlignedTriple] = field(default_factory=list)
    glossary: "BilingualDictionary | None" = None

    @property
    def sentences(self):
        return [t.source for t in self.triples]

    def tokens(self) -> Iterator[Token]:
        for triple in self.triples:
            yield from triple.source.tokens


class BilingualDictionary:
    """Source lemma -> set of target strings, case-insensitive on the source."""

    def __init__(self, entries=None):
        self.entries: dict[str, set[str]] = {}
        for src, targets in (entries or {}).items():
            for tgt in targets:
                self.add(src, tgt)

    def add(self, source, target):
        target = target.strip()
        if not target:
            raise ValueError(f"empty translation for {source!r}")
        self.entries.setdefault(source.strip().lower(), set()).add(target)

    def lookup(self, source) -> set[str]:
        return self.entries.get(source.lower(), set())

    def __contains__(self, source):
        return source.lower() in self.entries

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, BilingualDictionary) and self.entries == other.entries

    def __repr__(self):
        return f"BilingualDictionary({len(self)} entries)"

    def merged(self, *others):
        """Union of this dictionary with ``others`` (none are modified)."""
        out = BilingualDictionary()
        for d in (self,) + others:
            if d is None:
                continue
            for src, targets in d.entries.items():
                out.entries.setdefault(src, set()).update(targets)
        return out

    def to_json(self):
        return {src: sorted(tgts) for src, tgts in sorted(self.entries.items())}


class FrequencyTable:
    """Unigram counts keyed by lowercased word.

    ``count`` returns ``None`` for out-of-vocabulary words.
    """

    def __init__(self, counts=None):
        self.counts: dict[str, int] = {}
        for word, c in (counts or {}).items():
            self.add(word, c)

    def add(self, word, count):
        if count < 1:
            raise ValueError(f"count for {word!r} must be >= 1, got {count}")
        key = word.lower()
        self.counts[key] = self.counts.get(key, 0) + int(count)

    @property
    def total(self):
        return sum(self.counts.values())

    def count(self, word):
        return self.counts.get(word.lower())

    def __contains__(self, word):
        return word.lower() in self.counts

    def __len__(self):
        return len(self.counts)

    def log_range(self):
        """``(min, max)`` of log10 counts; ``(0, 0)`` for an empty table."""
        if not self.counts:
            return 0.0, 0.0
        return math.log10(min(self.counts.values())), math.log10(max(self.counts.values()))


_STRESSED = re.compile(r"[012]$")


class PronunciationDictionary:
    """CMU-style lexicon keeping the first pronunciation of each word."""

    def __init__(self, entries=None):
        self.entries: dict[str, list[str]] = {}
        for word, phones in (entries or {}).items():
            if not phones:
                raise ValueError(f"empty pronunciation for {word!r}")
            self.entries.setdefault(word.upper(), list(phones))

    def phonemes(self, word):
        return self.entries.get(word.upper())

    def syllables(self, word):
        """Number of stress-marked phonemes, or ``None`` when OOV."""
        phones = self.phonemes(word)
        if phones is None:
            return None
        return sum(1 for p in phones if _STRESSED.search(p))

    def __contains__(self, word):
        return word.upper() in self.entries

    def __len__(self):
        return len(self.entries)


# ---------------------------------------------------------------------------
# loaders


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            yield lineno, line


def load_bilingual_dictionary(paths) -> BilingualDictionary:
    if isinstance(paths, (str, Path)):
        paths = [paths]
    d = BilingualDictionary()
    for path in paths:
        for lineno, line in _lines(path):
            if not line.strip() or line.startswith("#"):
                continue
            if "\t" not in line:
                raise ParseError("expected source<TAB>target", path, lineno)
            src, tgt = line.split("\t", 1)
            if not src.strip() or not tgt.strip():
                raise ParseError("empty source or target", path, lineno)
            d.add(src, tgt)
    return d


def load_frequency_table(path) -> FrequencyTable:
    table = FrequencyTable()
    for lineno, line in _lines(path):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError("expected word<TAB>count", path, lineno)
        word, raw = parts
        try:
            count = int(raw)
        except ValueError:
            raise ParseError(f"non-numeric count {raw!r}", path, lineno) from None
        if count < 1:
            raise ParseError(f"count must be >= 1, got {count}", path, lineno)
        table.add(word, count)
    return table


_VARIANT = re.compile(r"\(\d+\)$")


def load_pronunciation_dict(path) -> PronunciationDictionary:
    pd = PronunciationDictionary()
    with open(path, encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith(";;;"):
                continue
            parts = line.split()
            word, phones = parts[0], parts[1:]
            if not phones:
                raise ParseError(f"empty pronunciation for {word!r}", path, lineno)
            word = _VARIANT.sub("", word).upper()
            pd.entries.setdefault(word, phones)
    return pd


def _parse_tokens(raw, path, lineno):
    tokens = []
    prev_start = -math.inf
    for i, item in enumerate(raw):
        if isinstance(item, dict):
            item = [item.get("surface"), item.get("pos"), item.get("start"), item.get("end")]
        if not isinstance(item, (list, tuple)) or len(item) != 4:
            raise ParseError(f"token {i}: expected [surface, pos, start, end]", path, lineno)
        surface, pos, start, end = item
        if not isinstance(surface, str) or not isinstance(pos, str):
            raise ParseError(f"token {i}: surface and pos must be strings", path, lineno)
        try:
            start, end = float(start), float(end)
        except (TypeError, ValueError):
            raise ParseError(f"token {i}: non-numeric timing", path, lineno) from None
        if not (math.isfinite(start) and math.isfinite(end)) or start < 0:
            raise TimingError(f"token {i}: invalid timing ({start}, {end})", path, lineno)
        if end < start:
            raise TimingError(f"token {i}: end_time {end} < start_time {start}", path, lineno)
        if start < prev_start:
            raise TimingError(f"token {i}: start_time decreases within sentence", path, lineno)
        prev_start = start
        tokens.append((surface, pos, start, end))
    return tokens


def _parse_record(rec, path, lineno):
    if not isinstance(rec, dict):
        raise ParseError("record must be a JSON object", path, lineno)
    for key in ("talk_id", "sentence_index", "tokens"):
        if key not in rec:
            raise ParseError(f"missing field {key!r}", path, lineno)
    if "reference" not in rec or rec["reference"] is None:
        raise AlignmentError("triple lacks a reference translation", path, lineno)
    if not isinstance(rec["sentence_index"], int) or rec["sentence_index"] < 0:
        raise ParseError("sentence_index must be a non-negative integer", path, lineno)
    if not isinstance(rec["reference"], list):
        raise ParseError("reference must be a token list", path, lineno)
    interps = rec.get("interpretations") or {}
    if not isinstance(interps, dict):
        raise ParseError("interpretations must be an object", path, lineno)
    for rank in interps:
        if rank not in RANKS:
            raise ParseError(f"unknown interpreter rank {rank!r}", path, lineno)
    return rec


def _human_from(rec, talk_id, sentence_index, n, path, lineno):
    out = []
    for item in rec.get("human") or []:
        try:
            rank, start, end, verdict = item
        except (TypeError, ValueError):
            raise ParseError("human annotation must be [rank, start, end, verdict]", path, lineno) from None
        ann = HumanAnnotation(str(talk_id), sentence_index, rank, int(start), int(end), verdict)
        _check_human(ann, n, path, lineno)
        out.append(ann)
    return out


def _check_human(ann, n, path=None, lineno=None):
    if ann.rank not in RANKS + (TRANSLATOR,):
        raise ParseError(f"unknown rank {ann.rank!r}", path, lineno)
    if ann.verdict not in VERDICTS:
        raise ParseError(f"unknown verdict {ann.verdict!r}", path, lineno)
    if not (0 <= ann.start < ann.end <= n):
        raise ParseError(f"span [{ann.start}, {ann.end}) out of range for {n} tokens", path, lineno)


def _terms_from(rec, path, lineno):
    out = []
    for item in rec.get("terms") or []:
        try:
            out.append(TermSpan(
                start=int(item["start"]), end=int(item["end"]), rank=item["rank"],
                coverage=item.get("coverage"), matched_translation=item.get("translation"),
                relevant=bool(item.get("relevant", False)),
                needs_review=bool(item.get("needs_review", False)),
            ))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed term record: {exc}", path, lineno) from None
    return out


def _gold_from(rec, n, path, lineno):
    gold = {}
    for rank, tags in (rec.get("gold") or {}).items():
        tags = tuple(tags)
        if len(tags) != n or any(t not in ("I", "O") for t in tags):
            raise ParseError(f"gold tags for rank {rank} must be {n} I/O labels", path, lineno)
        gold[rank] = tags
    return gold


def read_corpus(lines: Iterable[str], path=None) -> list[Talk]:
    talks: dict[str, Talk] = {}
    word_counter: dict[str, int] = {}
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path, lineno) from None
        rec = _parse_record(rec, path, lineno)
        talk_id = str(rec["talk_id"])
        talk = talks.get(talk_id)
        if talk is None:
            talk = talks[talk_id] = Talk(talk_id)
            word_counter[talk_id] = 0
        sidx = rec["sentence_index"]
        if talk.triples and sidx <= talk.triples[-1].source.sentence_index:
            raise ParseError(f"sentence_index {sidx} not increasing in talk {talk_id}", path, lineno)

        raw = _parse_tokens(rec["tokens"], path, lineno)
        base = word_counter[talk_id]
        tokens = tuple(
            Token(s, p, st, en, talk_word_index=base + i, sent_word_index=i)
            for i, (s, p, st, en) in enumerate(raw)
        )
        word_counter[talk_id] = base + len(tokens)
        n = len(tokens)

        gloss = rec.get("glossary")
        if gloss:
            if not isinstance(gloss, dict):
                raise ParseError("glossary must map source -> [targets]", path, lineno)
            g = BilingualDictionary(
                {k: [v] if isinstance(v, str) else v for k, v in gloss.items()}
            )
            talk.glossary = g if talk.glossary is None else talk.glossary.merged(g)

        talk.triples.append(AlignedTriple(
            source=SourceSentence(tokens, sidx),
            reference=[str(x) for x in rec["reference"]],
            interpretations={r: [str(x) for x in toks] for r, toks in (rec.get("interpretations") or {}).items()},
            human=_human_from(rec, talk_id, sidx, n, path, lineno),
            terms=_terms_from(rec, path, lineno),
            gold=_gold_from(rec, n, path, lineno),
        ))
    return list(talks.values())


def load_corpus(path) -> list[Talk]:
    """Load a JSON Lines corpus; talks are returned in first-appearance order."""
    with open(path, encoding="utf-8") as fh:
        return read_corpus(fh, path=str(path))


def triple_to_record(talk_id, triple: AlignedTriple, glossary=None) -> dict:
    rec = {
        "talk_id": talk_id,
        "sentence_index": triple.source.sentence_index,
        "tokens": [[t.surface, t.pos, t.start_time, t.end_time] for t in triple.source],
        "reference": list(triple.reference),
        "interpretations": {r: list(v) for r, v in triple.interpretations.items()},
    }
    if glossary is not None and len(glossary):
        rec["glossary"] = glossary.to_json()
    if triple.human:
        rec["human"] = [[h.rank, h.start, h.end, h.verdict] for h in triple.human]
    if triple.terms:
        rec["terms"] = [
            {"rank": s.rank, "start": s.start, "end": s.end, "coverage": s.coverage,
             "relevant": s.relevant, "translation": s.matched_translation,
             "needs_review": s.needs_review}
            for s in triple.terms
        ]
    if triple.gold:
        rec["gold"] = {r: "".join(tags) for r, tags in triple.gold.items()}
    return rec


def iter_records(talks: Iterable[Talk]):
    for talk in talks:
        for i, triple in enumerate(talk.triples):
            yield triple_to_record(talk.talk_id, triple, talk.glossary if i == 0 else None)


def dump_corpus(talks, fh):
    for rec in iter_records(talks):
        fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def save_corpus(talks, path):
    with open(path, "w", encoding="utf-8") as fh:
        dump_corpus(talks, fh)
