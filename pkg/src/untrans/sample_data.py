"""Small built-in datasets.

``snowpack_talk`` is a hand-built three-sentence talk with dictionary and
human verdicts. ``planted_corpus`` generates a synthetic multi-talk corpus in
which untranslated terms are planted to correlate with word rarity and with
a fast local speech rate.
"""

from __future__ import annotations

import math

import numpy as np

from .annotate import annotate_corpus
from .corpus import (
    AlignedTriple,
    BilingualDictionary,
    FrequencyTable,
    HumanAnnotation,
    PronunciationDictionary,
    SourceSentence,
    Talk,
    Token,
)
from .features import Resources


def _sentence(rows, sentence_index, talk_offset=0):
    return SourceSentence(tuple(
        Token(s, p, st, en, talk_word_index=talk_offset + i, sent_word_index=i)
        for i, (s, p, st, en) in enumerate(rows)
    ), sentence_index)


SNOWPACK_ROWS = [
    ("In", "IN", 0.00, 0.15), ("California", "NNP", 0.15, 0.80), (",", ",", 0.80, 0.80),
    ("there", "EX", 0.95, 1.10), ("has", "VBZ", 1.10, 1.25), ("been", "VBN", 1.25, 1.40),
    ("a", "DT", 1.40, 1.45), ("40", "CD", 1.45, 1.90), ("percent", "NN", 1.90, 2.35),
    ("decline", "NN", 2.35, 2.80), ("in", "IN", 2.80, 2.90), ("the", "DT", 2.90, 3.00),
    ("Sierra", "NNP", 3.00, 3.40), ("snowpack", "NN", 3.40, 3.95), (".", ".", 3.95, 3.95),
]

CO2_ROWS = [
    ("We", "PRP", 4.80, 4.95), ("'ve", "VBP", 4.95, 5.05), ("added", "VBN", 5.05, 5.40),
    ("70000000", "CD", 5.40, 6.60), ("tons", "NNS", 6.60, 6.90), ("of", "IN", 6.90, 7.00),
    ("CO2", "NN", 7.00, 7.60), ("every", "DT", 7.60, 7.85), ("day", "NN", 7.85, 8.10),
    (".", ".", 8.10, 8.10),
]

PLAIN_ROWS = [
    ("It", "PRP", 9.00, 9.10), ("is", "VBZ", 9.10, 9.20), ("so", "RB", 9.20, 9.40),
    ("fast", "JJ", 9.40, 9.80), (".", ".", 9.80, 9.80),
]

SNOWPACK_DICTIONARY = {
    "california": ["カリフォルニア"],
    "percent": ["パーセント", "百分率"],
    "decline": ["減少", "低下"],
    "sierra": ["シエラ"],
    "snowpack": ["積雪"],
    "ton": ["トン"],
    "day": ["日"],
    "seventy million": ["7000万"],
}

SNOWPACK_GLOSSARY = {"co2": ["CO2"]}


def snowpack_sentence() -> SourceSentence:
    return _sentence(SNOWPACK_ROWS, 0)


def snowpack_talk() -> tuple[Talk, BilingualDictionary, list[HumanAnnotation]]:
    """Three-sentence talk, its dictionary, and human verdicts for rank B."""
    s0 = _sentence(SNOWPACK_ROWS, 0)
    s1 = _sentence(CO2_ROWS, 1, len(SNOWPACK_ROWS))
    s2 = _sentence(PLAIN_ROWS, 2, len(SNOWPACK_ROWS) + len(CO2_ROWS))
    triples = [
        AlignedTriple(
            s0,
            reference="カリフォルニア で は シエラ の 積雪 量 が 40 パーセント 減少 し まし た 。".split(),
            interpretations={"B": "カリフォルニア で は 、 4 パーセント 少な く な っ て しま い ま し た 。".split()},
        ),
        AlignedTriple(
            s1,
            reference="私 たち は 毎 日 7000万 トン の CO2 を 加え て き まし た 。".split(),
            interpretations={"B": "毎日 7000万 トン の CO2 を 出し て い ます 。".split()},
        ),
        AlignedTriple(
            s2,
            reference="それ は とても 速い 。".split(),
            interpretations={"B": "速い です 。".split()},
        ),
    ]
    talk = Talk("snowpack", triples, BilingualDictionary(SNOWPACK_GLOSSARY))
    human = [
        HumanAnnotation("snowpack", 0, "B", 7, 8, "untranslated"),
        HumanAnnotation("snowpack", 0, "B", 9, 10, "nonliteral"),
        HumanAnnotation("snowpack", 0, "B", 12, 14, "untranslated"),
    ]
    return talk, BilingualDictionary(SNOWPACK_DICTIONARY), human


def snowpack_pronunciations() -> PronunciationDictionary:
    return PronunciationDictionary({
        "PERCENT": "P ER0 S EH1 N T".split(),
        "SEVENTY": "S EH1 V AH0 N T IY0".split(),
        "MILLION": "M IH1 L Y AH0 N".split(),
        "FORTY": "F AO1 R T IY0".split(),
        "SNOWPACK": "S N OW1 P AE2 K".split(),
        "CALIFORNIA": "K AE2 L AH0 F AO1 R N Y AH0".split(),
    })


# ---------------------------------------------------------------------------
# planted-signal generator

_FUNCTION_WORDS = [
    ("the", "DT"), ("a", "DT"), ("of", "IN"), ("in", "IN"), ("to", "TO"), ("and", "CC"),
    ("we", "PRP"), ("is", "VBZ"), ("have", "VBP"), ("made", "VBN"), ("very", "RB"),
    ("new", "JJ"), ("that", "IN"), ("with", "IN"), ("this", "DT"), ("see", "VB"),
]
_SYLLABLES = [c + v for c in "bdfgklmnprstvz" for v in "aeiou"]
_KATAKANA = [chr(c) for c in range(0x30A2, 0x30F3)]
_KANJI = [chr(c) for c in range(0x4E00, 0x4E00 + 400)]
_PARTICLES = ["は", "の", "を", "が", "に", "で", "て", "ます"]


def planted_corpus(n_talks=6, sentences_per_talk=40, seed=0, vocab_size=400,
                   rarity_weight=2.5, speed_weight=2.0, noise=0.5, cutoff=2.4):
    """Synthetic talks whose untranslated terms depend on rarity and speech rate.

    Each candidate word gets a latent difficulty
    ``rarity_weight * rarity + speed_weight * fast + noise``; the interpreter
    output omits it when the difficulty exceeds ``cutoff``. ``rarity`` is the
    word's log-count position in [0, 1] (1 = rarest) and ``fast`` is 1 for
    sentences spoken at a fast rate.

    Returns ``(talks, dictionary, resources)``; talks are not yet annotated.
    """
    rng = np.random.default_rng(seed)

    vocab = []
    seen = set()
    while len(vocab) < vocab_size:
        kind = rng.choice(["NN", "NNS", "NNP", "CD"], p=[0.55, 0.15, 0.2, 0.1])
        if kind == "CD":
            surface = str(int(rng.integers(2, 10 ** int(rng.integers(1, 8)))))
        else:
            surface = "".join(rng.choice(_SYLLABLES, size=int(rng.integers(2, 5))))
            if kind == "NNS":
                surface += "s"
            if kind == "NNP":
                surface = surface.capitalize()
        if surface.lower() in seen:
            continue
        seen.add(surface.lower())
        log_count = float(rng.uniform(1.0, 9.0))
        vocab.append((surface, str(kind), log_count))

    table = FrequencyTable()
    for word, _ in _FUNCTION_WORDS:
        table.add(word, int(10 ** rng.uniform(8.0, 9.0)))
    dictionary = BilingualDictionary()
    translation = {}
    for surface, kind, log_count in vocab:
        table.add(surface, max(1, int(round(10 ** log_count))))
        if kind == "CD":
            translation[surface] = surface
            continue
        alphabet = _KATAKANA if rng.random() < 0.5 else _KANJI
        tgt = "".join(rng.choice(alphabet, size=4))
        translation[surface] = tgt
        key = surface.lower()
        if kind == "NNS":
            key = key[:-1]
        dictionary.add(key, tgt)

    talks = []
    for t in range(n_talks):
        talk = Talk(f"talk{t:02d}")
        clock = float(rng.uniform(0.0, 2.0))
        word_index = 0
        for s in range(sentences_per_talk):
            fast = bool(rng.random() < 0.5)
            gap = 0.22 if fast else 0.55
            length = int(rng.integers(8, 16))
            rows = []
            ref = []
            interp = []
            for _ in range(length):
                if rng.random() < 0.4:
                    surface, kind, log_count = vocab[int(rng.integers(len(vocab)))]
                    rarity = (9.0 - log_count) / 8.0
                    difficulty = rarity_weight * rarity + speed_weight * fast + rng.normal(0.0, noise)
                    tgt = translation[surface]
                    ref.append(tgt)
                    if difficulty <= cutoff:
                        interp.append(tgt)
                    pos = kind
                else:
                    surface, pos = _FUNCTION_WORDS[int(rng.integers(len(_FUNCTION_WORDS)))]
                    particle = _PARTICLES[int(rng.integers(len(_PARTICLES)))]
                    ref.append(particle)
                    interp.append(particle)
                dur = gap * float(rng.uniform(0.7, 1.3))
                rows.append((surface, pos, round(clock, 3), round(clock + 0.9 * dur, 3)))
                clock += dur
            rows.append((".", ".", round(clock, 3), round(clock, 3)))
            ref.append("。")
            interp.append("。")
            clock += float(rng.uniform(0.4, 1.2))
            talk.triples.append(AlignedTriple(_sentence(rows, s, word_index), ref, {"B": interp}))
            word_index += len(rows)
        talks.append(talk)
    return talks, dictionary, Resources(frequencies=table, dictionary=dictionary)


def planted_dataset(**kwargs):
    """``planted_corpus`` with rank-B gold tags filled in by annotation."""
    talks, dictionary, resources = planted_corpus(**kwargs)
    return annotate_corpus(talks, dictionary), resources
