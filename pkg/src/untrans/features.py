"""Delexicalized sliding-window features for candidate (noun/number) tokens.

Feature names are stable strings; every name belongs to exactly one group so
ablations can switch a group off wholesale:

=====================  ===================================================
group                  names
=====================  ===================================================
elapsed_time           minutes_elapsed, talk_word_index, sent_word_index
word_timing            words_in_past_m, time_delta@-j
word_freq              freq_bin=<b>, freq_bin=oov, loanword
characteristic_syntax  char_count, syllable_count, pos=<tag>, is_numeral,
                       pos@-j=<tag>, is_numeral@-j, char_count@-j
history                label@-j
=====================  ===================================================

``@-j`` marks the j-th predecessor inside the window (``@-1`` is the
immediately preceding token).
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field, replace

from .annotate import NUMERAL_RE, TERM_POS, lemmatize, number_to_words
from .corpus import BilingualDictionary, FrequencyTable, PronunciationDictionary, Token
from .errors import DomainError

FEATURE_VERSION = "untrans-features/1"
GROUPS = ("elapsed_time", "word_timing", "word_freq", "characteristic_syntax", "history")
ABLATION_GROUPS = GROUPS[:4]
POS_VALUES = tuple(sorted(TERM_POS)) + ("other",)

_GROUP_OF_BASE = {
    "minutes_elapsed": "elapsed_time",
    "talk_word_index": "elapsed_time",
    "sent_word_index": "elapsed_time",
    "words_in_past_m": "word_timing",
    "time_delta": "word_timing",
    "freq_bin": "word_freq",
    "loanword": "word_freq",
    "char_count": "characteristic_syntax",
    "syllable_count": "characteristic_syntax",
    "pos": "characteristic_syntax",
    "is_numeral": "characteristic_syntax",
    "label": "history",
}


def group_of(name: str) -> str:
    base = name.split("@", 1)[0].split("=", 1)[0]
    try:
        return _GROUP_OF_BASE[base]
    except KeyError:
        raise DomainError(f"unregistered feature name {name!r}") from None


@dataclass(frozen=True)
class FeatureConfig:
    window_size: int = 8
    frequency_bins: int = 9
    timing_horizon: float = 5.0
    enabled_groups: frozenset = frozenset(GROUPS)

    def __post_init__(self):
        if self.window_size < 1:
            raise DomainError("window_size must be >= 1")
        if self.frequency_bins < 2:
            raise DomainError("frequency_bins must be >= 2")
        if not self.timing_horizon > 0:
            raise DomainError("timing_horizon must be > 0")
        groups = frozenset(self.enabled_groups)
        unknown = groups - set(GROUPS)
        if unknown:
            raise DomainError(f"unknown feature group(s): {', '.join(sorted(unknown))}")
        object.__setattr__(self, "enabled_groups", groups)

    def without(self, *groups):
        unknown = set(groups) - set(GROUPS)
        if unknown:
            raise DomainError(f"unknown feature group(s): {', '.join(sorted(unknown))}")
        return replace(self, enabled_groups=self.enabled_groups - set(groups))

    def to_dict(self):
        return {
            "window_size": self.window_size,
            "frequency_bins": self.frequency_bins,
            "timing_horizon": self.timing_horizon,
            "enabled_groups": [g for g in GROUPS if g in self.enabled_groups],
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "enabled_groups" in d:
            d["enabled_groups"] = frozenset(d["enabled_groups"])
        return cls(**d)


@dataclass
class Resources:
    """Read-only lexical resources shared by all extraction passes."""

    frequencies: FrequencyTable = field(default_factory=FrequencyTable)
    dictionary: BilingualDictionary = field(default_factory=BilingualDictionary)
    pronunciations: PronunciationDictionary = field(default_factory=PronunciationDictionary)


class WindowState:
    """The k-1 most recent tokens of the current pass and their labels."""

    def __init__(self, window_size):
        self.size = max(window_size - 1, 0)
        self.tokens: deque = deque(maxlen=self.size)
        self.slots: deque = deque(maxlen=self.size)
        self.labels: deque = deque(maxlen=self.size)

    def push(self, token: Token, label: str):
        if self.size == 0:
            return
        self.tokens.append(token)
        self.slots.append(_slot_features(token))
        self.labels.append(label)

    def predecessors(self):
        """``(distance, token, slot, label)`` from the nearest predecessor outwards."""
        n = len(self.tokens)
        for j in range(1, n + 1):
            yield j, self.tokens[n - j], self.slots[n - j], self.labels[n - j]

    def __len__(self):
        return len(self.tokens)


def is_numeral(surface):
    return NUMERAL_RE.match(surface) is not None


def _pos_value(pos):
    return pos if pos in TERM_POS else "other"


def _slot_features(token):
    return (_pos_value(token.pos), 1.0 if is_numeral(token.surface) else 0.0, float(len(token.surface)))


def elapsed_time_features(token: Token) -> dict:
    return {
        "minutes_elapsed": token.start_time / 60.0,
        "talk_word_index": float(token.talk_word_index),
        "sent_word_index": float(token.sent_word_index),
    }


def word_timing_features(window, token: Token, horizon: float) -> dict:
    """Speech-rate features. ``window`` holds the predecessor tokens, oldest first."""
    t = token.start_time
    lo = t - horizon
    feats = {"words_in_past_m": float(1 + sum(1 for p in window if lo < p.start_time <= t))}
    n = len(window)
    for j in range(1, n + 1):
        feats[f"time_delta@-{j}"] = t - window[n - j].start_time
    return feats


_KATAKANA = re.compile("^[\u30a0-\u30ff\uff66-\uff9f]+$")


def is_katakana(text):
    return bool(_KATAKANA.match(text.replace(" ", "")))


def frequency_bin(count, table: FrequencyTable, bins: int):
    """Equal-width bin of log10(count) over the table's log range; ``None`` for OOV."""
    if count is None:
        return None
    lo, hi = table.log_range()
    if hi <= lo:
        return 0
    b = int((math.log10(count) - lo) / (hi - lo) * bins)
    return min(max(b, 0), bins - 1)


def is_loanword(word, dictionary: BilingualDictionary | None):
    if dictionary is None:
        return False
    targets = dictionary.lookup(lemmatize(word)) | dictionary.lookup(word)
    return any(is_katakana(t) for t in targets)


def frequency_features(word: str, table: FrequencyTable, bins: int,
                       dictionary: BilingualDictionary | None = None) -> dict:
    b = frequency_bin(table.count(word), table, bins)
    name = "freq_bin=oov" if b is None else f"freq_bin={b}"
    return {name: 1.0, "loanword": 1.0 if is_loanword(word, dictionary) else 0.0}


_VOWEL_GROUPS = re.compile(r"[aeiouy]+")


def syllable_count(surface: str, pronunciations: PronunciationDictionary | None) -> int:
    """CMU syllable count; numerals are read as English words first.

    Words missing from the lexicon fall back to counting vowel-letter groups
    (at least one per word).
    """
    words = number_to_words(surface).split() if is_numeral(surface) else [surface]
    total = 0
    for w in words:
        n = pronunciations.syllables(w) if pronunciations is not None else None
        if n is None:
            n = max(1, len(_VOWEL_GROUPS.findall(w.lower())))
        total += n
    return total


def characteristic_features(token: Token, pronunciations: PronunciationDictionary | None) -> dict:
    return {
        "char_count": float(len(token.surface)),
        "syllable_count": float(syllable_count(token.surface, pronunciations)),
        f"pos={_pos_value(token.pos)}": 1.0,
        "is_numeral": 1.0 if is_numeral(token.surface) else 0.0,
    }


def extract(config: FeatureConfig, state: WindowState, token: Token, resources: Resources) -> dict:
    """Feature vector for ``token`` given its window of predecessors."""
    if token.pos not in TERM_POS:
        raise DomainError(f"{token.surface!r} has POS {token.pos}; only noun/number tokens are scored")
    groups = config.enabled_groups
    preds = list(state.predecessors())
    v = {}
    if "elapsed_time" in groups:
        v.update(elapsed_time_features(token))
    if "word_timing" in groups:
        window = [p[1] for p in reversed(preds)]
        v.update(word_timing_features(window, token, config.timing_horizon))
    if "word_freq" in groups:
        v.update(frequency_features(token.surface, resources.frequencies,
                                    config.frequency_bins, resources.dictionary))
    if "characteristic_syntax" in groups:
        v.update(characteristic_features(token, resources.pronunciations))
        for j, _, (pos, num, chars), _ in preds:
            v[f"pos@-{j}={pos}"] = 1.0
            v[f"is_numeral@-{j}"] = num
            v[f"char_count@-{j}"] = chars
    if "history" in groups:
        for j, _, _, label in preds:
            v[f"label@-{j}"] = 1.0 if label == "I" else 0.0
    return v


def gold_examples(talks, rank, config: FeatureConfig, resources: Resources):
    """``(vector, label, sentence_id)`` for every candidate token, with gold history.

    Sentences without gold tags for ``rank`` are skipped.
    """
    out = []
    for talk in talks:
        for triple in talk.triples:
            tags = triple.gold.get(rank)
            if tags is None:
                continue
            sid = (talk.talk_id, triple.source.sentence_index)
            state = WindowState(config.window_size)
            for tok, tag in zip(triple.source.tokens, tags):
                if tok.pos in TERM_POS:
                    out.append((extract(config, state, tok, resources), tag, sid))
                state.push(tok, tag)
    return out


def write_feature_matrix(examples, fh):
    """TSV dump: header of feature names, one row per candidate plus gold label."""
    names = sorted({n for v, *_ in examples for n in v})
    fh.write("\t".join(names + ["gold"]) + "\n")
    for v, label, *_ in examples:
        fh.write("\t".join([repr(v.get(n, 0.0)) for n in names] + [label]) + "\n")
