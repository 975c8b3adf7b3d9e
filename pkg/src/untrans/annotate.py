"""Untranslated-term annotation.

A source term is *untranslated* for an interpreter rank when it

* consists only of nouns and numbers (POS in ``TERM_POS``),
* has a dictionary translation occurring in the offline reference, and
* is not rendered, literally or non-literally, in that rank's output.

The automatic pass uses bilingual-dictionary string matching; anything it
cannot confirm as literal is resolved by human verdicts, and otherwise
defaults to untranslated with ``needs_review`` set.
"""

from __future__ import annotations

import copy
import re
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, NamedTuple

from .corpus import (
    RANKS,
    TRANSLATOR,
    AlignedTriple,
    BilingualDictionary,
    HumanAnnotation,
    SourceSentence,
    Talk,
    TermSpan,
    _check_human,
)
from .errors import DomainError, InvariantError, ParseError

TERM_POS = frozenset({"CD", "NN", "NNS", "NNP", "NNPS"})
NUMERAL_RE = re.compile(r"^[0-9]+([.,][0-9]+)*$")


def _load_stopwords():
    text = resources.files("untrans").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return frozenset(
        line.strip().lower() for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


STOPWORDS = _load_stopwords()


@dataclass(frozen=True)
class TagSequence:
    tags: tuple[str, ...]
    rank: str = ""

    def __len__(self):
        return len(self.tags)


def is_term_token(token, stopwords=STOPWORDS):
    return token.pos in TERM_POS and token.surface.lower() not in stopwords


def candidate_spans(sentence: SourceSentence, stopwords=STOPWORDS) -> list[TermSpan]:
    """Maximal runs of adjacent noun/number tokens."""
    spans = []
    start = None
    for i, tok in enumerate(sentence.tokens):
        if is_term_token(tok, stopwords):
            if start is None:
                start = i
        elif start is not None:
            spans.append(TermSpan(start, i))
            start = None
    if start is not None:
        spans.append(TermSpan(start, len(sentence.tokens)))
    return spans


_NO_LEMMA = frozenset({"series", "species", "news", "means", "physics", "mathematics", "economics"})


def lemmatize(word: str) -> str:
    w = word.lower()
    if w in _NO_LEMMA or len(w) <= 3:
        return w
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith(("sses", "xes", "ches", "shes", "zzes")):
        return w[:-2]
    if w.endswith(("ss", "us", "is")):
        return w
    if w.endswith("s"):
        return w[:-1]
    return w


_ONES = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
         "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
         "seventeen", "eighteen", "nineteen"]
_TENS = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]
_SCALES = ["", "thousand", "million", "billion", "trillion", "quadrillion", "quintillion",
           "sextillion", "septillion", "octillion", "nonillion", "decillion"]


def _below_thousand(n):
    words = []
    if n >= 100:
        words += [_ONES[n // 100], "hundred"]
        n %= 100
    if n >= 20:
        words.append(_TENS[n // 10])
        n %= 10
        if n:
            words.append(_ONES[n])
    elif n or not words:
        words.append(_ONES[n])
    return words


def _integer_words(digits):
    n = int(digits)
    if n == 0:
        return ["zero"]
    if n >= 1000 ** len(_SCALES):
        return [_ONES[int(d)] for d in digits]
    words = []
    for scale in range(len(_SCALES) - 1, -1, -1):
        chunk = (n // 1000 ** scale) % 1000
        if chunk:
            words += _below_thousand(chunk)
            if _SCALES[scale]:
                words.append(_SCALES[scale])
    return words


def number_to_words(token: str) -> str:
    """English short-scale words for a numeral, e.g. ``"24" -> "twenty four"``.

    Commas are read as thousands separators when every group after the first
    has three digits, otherwise as a decimal mark.
    """
    if not NUMERAL_RE.match(token):
        raise DomainError(f"not a numeral: {token!r}")
    groups = token.split(",")
    if len(groups) > 1 and all(len(g.split(".")[0]) == 3 for g in groups[1:]) and "." not in "".join(groups[:-1]):
        token = "".join(groups)
    else:
        token = token.replace(",", ".")
    parts = token.split(".")
    words = _integer_words(parts[0])
    for frac in parts[1:]:
        words.append("point")
        words += [_ONES[int(d)] for d in frac]
    return " ".join(words)


def _as_dicts(dictionaries):
    if dictionaries is None:
        return []
    if isinstance(dictionaries, BilingualDictionary):
        return [dictionaries]
    return [d for d in dictionaries if d is not None]


def _lookup_keys(surfaces):
    low = [s.lower() for s in surfaces]
    lemmas = [s if NUMERAL_RE.match(s) else lemmatize(s) for s in low]
    worded = [number_to_words(s) if NUMERAL_RE.match(s) else s for s in lemmas]
    keys = []
    for form in (low, lemmas, worded):
        key = " ".join(form)
        if key not in keys:
            keys.append(key)
    return keys


def translations(surfaces, dictionaries) -> list[str]:
    """Candidate target strings for exactly this source word sequence.

    A single numeral additionally matches its own digit string.
    """
    dicts = _as_dicts(dictionaries)
    out = []
    for key in _lookup_keys(surfaces):
        for d in dicts:
            for t in sorted(d.lookup(key)):
                if t not in out:
                    out.append(t)
    if len(surfaces) == 1 and NUMERAL_RE.match(surfaces[0]):
        for digits in (surfaces[0], surfaces[0].replace(",", "")):
            if digits not in out:
                out.append(digits)
    return out


def _joined(tokens):
    return "".join(tokens).replace(" ", "")


def _occurs(target, joined):
    t = target.replace(" ", "")
    return bool(t) and t in joined


def _first_occurring(surfaces, joined, dictionaries):
    for t in translations(surfaces, dictionaries):
        if _occurs(t, joined):
            return t
    return None


def relevance_test(span_surfaces, reference, dictionaries) -> str | None:
    """First dictionary translation of the span found in the reference.

    Sub-spans are tried longest first, leftmost first, down to single words.
    """
    joined = _joined(reference)
    n = len(span_surfaces)
    for length in range(n, 0, -1):
        for i in range(n - length + 1):
            hit = _first_occurring(span_surfaces[i:i + length], joined, dictionaries)
            if hit is not None:
                return hit
    return None


def segment_terms(sentence: SourceSentence, run: TermSpan, reference, dictionaries) -> list[TermSpan]:
    """Split a candidate run into term units.

    Greedy longest-first, leftmost-first matching against the reference; each
    token is consumed at most once. Tokens left over become single-word units
    that failed the relevance test.
    """
    joined = _joined(reference)
    surfaces = sentence.surfaces
    taken = [False] * len(surfaces)
    units = []
    width = run.end - run.start
    for length in range(width, 0, -1):
        for i in range(run.start, run.end - length + 1):
            if any(taken[i:i + length]):
                continue
            hit = _first_occurring(surfaces[i:i + length], joined, dictionaries)
            if hit is not None:
                units.append(TermSpan(i, i + length, matched_translation=hit, relevant=True))
                for j in range(i, i + length):
                    taken[j] = True
    for i in range(run.start, run.end):
        if not taken[i]:
            units.append(TermSpan(i, i + 1, relevant=False))
    return sorted(units, key=lambda s: s.start)


class Coverage(NamedTuple):
    label: str
    needs_review: bool = False


_VERDICT_TO_COVERAGE = {
    "translated": "literal",
    "nonliteral": "nonliteral",
    "untranslated": "untranslated",
}


def _human_verdict(span: TermSpan, human: Iterable[HumanAnnotation]):
    enclosing = None
    for h in human:
        if h.rank != span.rank:
            continue
        if h.start == span.start and h.end == span.end:
            return h.verdict
        if enclosing is None and h.start <= span.start and span.end <= h.end:
            enclosing = h.verdict
    return enclosing


def coverage_test(sentence: SourceSentence, span: TermSpan, output, dictionaries,
                  human: Iterable[HumanAnnotation] = ()) -> Coverage:
    """Judge how ``span.rank``'s output covers the span.

    ``human`` should hold the annotations for this sentence; they are matched
    by rank and exact (or else enclosing) span.
    """
    surfaces = sentence.surfaces[span.start:span.end]
    if output is not None and _first_occurring(surfaces, _joined(output), dictionaries) is not None:
        return Coverage("literal")
    verdict = _human_verdict(span, human)
    if verdict is not None:
        return Coverage(_VERDICT_TO_COVERAGE[verdict])
    return Coverage("untranslated", needs_review=True)


def assign_io_tags(sentence: SourceSentence, spans: Iterable[TermSpan], rank="") -> TagSequence:
    n = len(sentence.tokens)
    tags = ["O"] * n
    for span in sorted(spans, key=lambda s: s.start):
        if not (0 <= span.start < span.end <= n):
            raise InvariantError(f"span [{span.start}, {span.end}) out of range for {n} tokens")
        for i in range(span.start, span.end):
            if tags[i] == "I":
                raise InvariantError(f"overlapping spans at token {i}")
            if sentence.tokens[i].pos not in TERM_POS:
                raise InvariantError(
                    f"token {i} ({sentence.tokens[i].surface!r}) has POS {sentence.tokens[i].pos}, not a term tag")
            tags[i] = "I"
    return TagSequence(tuple(tags), rank)


def spans_from_tags(tags: TagSequence) -> list[TermSpan]:
    """Maximal I runs of a tag sequence."""
    spans = []
    start = None
    for i, t in enumerate(tags.tags):
        if t == "I" and start is None:
            start = i
        elif t != "I" and start is not None:
            spans.append(TermSpan(start, i, rank=tags.rank, coverage="untranslated", relevant=True))
            start = None
    if start is not None:
        spans.append(TermSpan(start, len(tags.tags), rank=tags.rank, coverage="untranslated", relevant=True))
    return spans


# ---------------------------------------------------------------------------
# corpus-level pipeline


def load_human_annotations(path) -> list[HumanAnnotation]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 6:
                raise ParseError("expected 6 tab-separated fields", path, lineno)
            talk_id, sidx, rank, start, end, verdict = parts
            try:
                ann = HumanAnnotation(talk_id, int(sidx), rank, int(start), int(end), verdict)
            except ValueError:
                raise ParseError("non-integer index field", path, lineno) from None
            if ann.rank not in RANKS + (TRANSLATOR,) or ann.verdict not in _VERDICT_TO_COVERAGE:
                raise ParseError(f"bad rank or verdict: {rank!r}, {verdict!r}", path, lineno)
            out.append(ann)
    return out


def annotate_triple(triple: AlignedTriple, dictionaries, ranks=None, stopwords=STOPWORDS):
    """Fill ``triple.terms`` and ``triple.gold`` in place.

    Terms are recorded for the translator and each interpreter rank present;
    gold I/O tags only for interpreter ranks.
    """
    sentence = triple.source
    if ranks is None:
        ranks = [r for r in RANKS if r in triple.interpretations]
    units = []
    for run in candidate_spans(sentence, stopwords):
        units.extend(segment_terms(sentence, run, triple.reference, dictionaries))

    terms = []
    gold = {}
    for rank in (TRANSLATOR, *ranks):
        output = triple.output_for(rank)
        if rank != TRANSLATOR and output is None:
            continue
        untranslated = []
        for unit in units:
            span = TermSpan(unit.start, unit.end, rank=rank,
                            matched_translation=unit.matched_translation, relevant=unit.relevant)
            cov = coverage_test(sentence, span, output, dictionaries, triple.human)
            span = TermSpan(span.start, span.end, rank, cov.label, span.matched_translation,
                            span.relevant, cov.needs_review)
            terms.append(span)
            if rank != TRANSLATOR and span.relevant and cov.label == "untranslated":
                untranslated.append(span)
        if rank != TRANSLATOR:
            gold[rank] = assign_io_tags(sentence, untranslated, rank).tags
    triple.terms = terms
    triple.gold = gold
    return triple


def attach_human(talks: list[Talk], human: Iterable[HumanAnnotation]):
    index = {(t.talk_id, tr.source.sentence_index): tr for t in talks for tr in t.triples}
    for ann in human:
        triple = index.get((ann.talk_id, ann.sentence_index))
        if triple is None:
            raise DomainError(f"annotation refers to unknown sentence {ann.talk_id}:{ann.sentence_index}")
        _check_human(ann, len(triple.source))
        if ann not in triple.human:
            triple.human.append(ann)


def annotate_corpus(talks: list[Talk], dictionary: BilingualDictionary | None,
                    human: Iterable[HumanAnnotation] = (), ranks=None,
                    stopwords=STOPWORDS) -> list[Talk]:
    """Annotate a deep copy of ``talks``; each talk's glossary joins the dictionary."""
    talks = copy.deepcopy(talks)
    attach_human(talks, human)
    for talk in talks:
        dicts = _as_dicts(dictionary) + _as_dicts(talk.glossary)
        for triple in talk.triples:
            annotate_triple(triple, dicts, ranks, stopwords)
    return talks


# ---------------------------------------------------------------------------
# statistics


@dataclass
class AnnotationStats:
    coverage: dict = field(default_factory=dict)
    final: dict = field(default_factory=dict)
    overlap: dict = field(default_factory=dict)

    def to_dict(self):
        return {"coverage": self.coverage, "final": self.final, "overlap": self.overlap}

    def key_values(self):
        """Flat ``key -> value`` pairs, sorted by key."""
        flat = {}
        for section, table in self.to_dict().items():
            for k, v in table.items():
                if isinstance(v, dict):
                    for k2, v2 in v.items():
                        flat[f"{section}.{k}.{k2}"] = v2
                else:
                    flat[f"{section}.{k}"] = v
        return dict(sorted(flat.items()))

    def format_text(self):
        lines = ["Term coverage (raw, before relevance filtering)",
                 f"{'':4}{'trans.#':>9}{'%':>6}{'non-lit.#':>11}{'%':>6}{'untrans.#':>11}{'%':>6}{'review#':>9}"]
        for rank, row in self.coverage.items():
            lines.append(
                f"{rank:4}{row['literal']:>9,}{row['literal_pct']:>6.0f}{row['nonliteral']:>11,}"
                f"{row['nonliteral_pct']:>6.0f}{row['untranslated']:>11,}{row['untranslated_pct']:>6.0f}"
                f"{row['needs_review']:>9,}")
        lines += ["", "Untranslated terms after relevance filtering",
                  f"{'SI':8}{'# terms':>9}{'% I all':>9}{'% I noun/#':>12}"]
        for rank, row in self.final.items():
            lines.append(f"{rank + '-rank':8}{row['terms']:>9,}{row['itag_pct_all']:>9.1f}{row['itag_pct_noun']:>12.1f}")
        lines += ["", "Untranslated term overlap"]
        for k, v in self.overlap.items():
            lines.append(f"  {k:10} {v}")
        return "\n".join(lines)


def _pct(a, b):
    return 100.0 * a / b if b else 0.0


def annotation_stats(talks: list[Talk]) -> AnnotationStats:
    cov = defaultdict(lambda: {"literal": 0, "nonliteral": 0, "untranslated": 0, "needs_review": 0})
    final_sets = defaultdict(set)
    final = {}
    itags = defaultdict(int)
    n_tokens = 0
    n_q = 0
    ranks_seen = set()

    for talk in talks:
        for triple in talk.triples:
            n_tokens += len(triple.source)
            n_q += sum(1 for t in triple.source if t.pos in TERM_POS)
            for rank, tags in triple.gold.items():
                ranks_seen.add(rank)
                itags[rank] += tags.count("I")
            for span in triple.terms:
                row = cov[span.rank]
                row[span.coverage] += 1
                if span.needs_review:
                    row["needs_review"] += 1
                if span.rank in RANKS and span.relevant and span.coverage == "untranslated":
                    final_sets[span.rank].add((talk.talk_id, triple.source.sentence_index, span.start, span.end))

    coverage = {}
    for rank in (TRANSLATOR,) + RANKS:
        if rank not in cov:
            continue
        row = dict(cov[rank])
        total = row["literal"] + row["nonliteral"] + row["untranslated"]
        row["total"] = total
        for k in ("literal", "nonliteral", "untranslated"):
            row[f"{k}_pct"] = _pct(row[k], total)
        row["untranslated_reviewed"] = row["untranslated"] - row["needs_review"]
        reviewed_total = total - row["needs_review"]
        row["untranslated_reviewed_pct"] = _pct(row["untranslated_reviewed"], reviewed_total)
        coverage[rank] = row

    for rank in RANKS:
        if rank not in ranks_seen and rank not in final_sets:
            continue
        final[rank] = {
            "terms": len(final_sets[rank]),
            "itags": itags[rank],
            "tokens": n_tokens,
            "noun_tokens": n_q,
            "itag_pct_all": _pct(itags[rank], n_tokens),
            "itag_pct_noun": _pct(itags[rank], n_q),
        }

    b, a, s = (final_sets[r] for r in RANKS)
    overlap = {
        "B": len(b), "A": len(a), "S": len(s),
        "B&A": len(b & a), "B&S": len(b & s), "A&S": len(a & s),
        "B&A&S": len(b & a & s),
        "B_only": len(b - a - s), "A_only": len(a - b - s), "S_only": len(s - a - b),
    }
    return AnnotationStats(coverage, final, overlap)
