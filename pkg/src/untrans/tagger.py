"""Left-to-right tagging with a trained model, streaming replay, and the two
heuristic baselines.

Only tokens whose POS is a noun/number tag are scored; all other tokens are
forced to ``O``. The window's label history always uses threshold-0
predictions so that one pass yields a threshold-independent score stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .annotate import TERM_POS
from .corpus import SourceSentence, Token
from .errors import StreamError
from .features import FeatureConfig, Resources, WindowState, extract
from .model import LinearModel, decision_score


@dataclass(frozen=True)
class TokenPrediction:
    token: Token
    score: float | None
    label: str
    is_candidate: bool


@dataclass(frozen=True)
class TokenEvent:
    """A timed source token arriving on a stream."""

    talk_id: str
    sentence_index: int
    token: Token


class SentenceTagger:
    """Incremental tagger for one sentence; ``push`` one token at a time."""

    def __init__(self, model: LinearModel, config: FeatureConfig, resources: Resources,
                 threshold: float = 0.0):
        self.model = model
        self.config = config
        self.resources = resources
        self.threshold = threshold
        self.state = WindowState(config.window_size)

    def push(self, token: Token) -> TokenPrediction:
        if token.pos in TERM_POS:
            v = extract(self.config, self.state, token, self.resources)
            score = decision_score(self.model, v)
            history_label = "I" if score > 0.0 else "O"
            pred = TokenPrediction(token, score, "I" if score > self.threshold else "O", True)
        else:
            history_label = "O"
            pred = TokenPrediction(token, None, "O", False)
        self.state.push(token, history_label)
        return pred


def tag_sentence(model, config, sentence: SourceSentence, resources=None,
                 threshold: float = 0.0) -> list[TokenPrediction]:
    tagger = SentenceTagger(model, config, resources or Resources(), threshold)
    return [tagger.push(tok) for tok in sentence.tokens]


def tag_stream(model, config, events: Iterable[TokenEvent], resources=None,
               threshold: float = 0.0) -> Iterator[TokenPrediction]:
    """Yield one prediction per event as soon as it arrives.

    Window state resets whenever the (talk, sentence) pair changes. Start
    times must not decrease within a talk.
    """
    resources = resources or Resources()
    current = None
    tagger = None
    last_start = {}
    for ev in events:
        prev = last_start.get(ev.talk_id)
        if prev is not None and ev.token.start_time < prev:
            raise StreamError(
                f"out-of-order event in talk {ev.talk_id}: {ev.token.start_time} after {prev}")
        last_start[ev.talk_id] = ev.token.start_time
        key = (ev.talk_id, ev.sentence_index)
        if key != current:
            current = key
            tagger = SentenceTagger(model, config, resources, threshold)
        yield tagger.push(ev.token)


def talk_events(talk) -> Iterator[TokenEvent]:
    for triple in talk.triples:
        for tok in triple.source.tokens:
            yield TokenEvent(talk.talk_id, triple.source.sentence_index, tok)


def baseline_select_pos(sentence: SourceSentence) -> list[TokenPrediction]:
    return [
        TokenPrediction(t, 1.0, "I", True) if t.pos in TERM_POS else TokenPrediction(t, None, "O", False)
        for t in sentence.tokens
    ]


def rarity(word, table) -> float:
    """``-log10(count)``; OOV words rank one unit above the rarest known word."""
    c = table.count(word)
    if c is not None:
        return -math.log10(c)
    if len(table):
        return -math.log10(min(table.counts.values())) + 1.0
    return 1.0


def baseline_frequency(sentence: SourceSentence, table, threshold: float = -math.inf) -> list[TokenPrediction]:
    """Rank candidates by rarity; ``I`` when rarity exceeds ``threshold``."""
    out = []
    for t in sentence.tokens:
        if t.pos in TERM_POS:
            r = rarity(t.surface, table)
            out.append(TokenPrediction(t, r, "I" if r > threshold else "O", True))
        else:
            out.append(TokenPrediction(t, None, "O", False))
    return out
