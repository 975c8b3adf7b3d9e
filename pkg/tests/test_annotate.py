import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from untrans.annotate import (
    TERM_POS,
    TagSequence,
    annotation_stats,
    assign_io_tags,
    candidate_spans,
    coverage_test,
    lemmatize,
    load_human_annotations,
    number_to_words,
    relevance_test,
    spans_from_tags,
)
from untrans.corpus import BilingualDictionary, HumanAnnotation, SourceSentence, TermSpan, Token
from untrans.errors import DomainError, InvariantError, ParseError
from untrans.sample_data import snowpack_sentence


def _sent(*pos, surfaces=None):
    surfaces = surfaces or [f"w{i}" for i in range(len(pos))]
    return SourceSentence(tuple(Token(s, p, float(i), float(i) + 0.5, i, i)
                                for i, (s, p) in enumerate(zip(surfaces, pos))))


class TestCandidateSpans:
    def test_snowpack_runs(self):
        s = snowpack_sentence()
        runs = [[s[i].surface for i in range(sp.start, sp.end)] for sp in candidate_spans(s)]
        assert runs == [["California"], ["40", "percent", "decline"], ["Sierra", "snowpack"]]

    def test_no_nouns(self):
        assert candidate_spans(_sent("DT", "VB", "JJ")) == []

    def test_all_nouns(self):
        spans = candidate_spans(_sent("NN", "NNS", "CD"))
        assert [(s.start, s.end) for s in spans] == [(0, 3)]

    def test_stopword_breaks_run(self):
        s = _sent("NN", "CD", "NN", surfaces=["apple", "one", "pear"])
        assert [(x.start, x.end) for x in candidate_spans(s)] == [(0, 1), (2, 3)]


class TestLemmatize:
    @pytest.mark.parametrize("word, lemma", [
        ("oceans", "ocean"), ("studies", "study"), ("snowpack", "snowpack"),
        ("Boxes", "box"), ("classes", "class"), ("houses", "house"), ("gas", "gas"),
        ("virus", "virus"), ("series", "series"),
    ])
    def test_rules(self, word, lemma):
        assert lemmatize(word) == lemma


class TestNumberToWords:
    @pytest.mark.parametrize("digits, words", [
        ("40", "forty"),
        ("24", "twenty four"),
        ("25000000", "twenty five million"),
        ("70000000", "seventy million"),
        ("0", "zero"),
        ("105", "one hundred five"),
        ("1,000", "one thousand"),
        ("3.14", "three point one four"),
        ("2018", "two thousand eighteen"),
    ])
    def test_words(self, digits, words):
        assert number_to_words(digits) == words

    def test_non_numeral(self):
        with pytest.raises(DomainError):
            number_to_words("forty")


class TestRelevance:
    def test_percent(self):
        d = BilingualDictionary({"percent": ["パーセント"]})
        ref = "40 パーセント 減少".split()
        assert relevance_test(["percent"], ref, d) == "パーセント"

    def test_no_translation(self):
        d = BilingualDictionary({"percent": ["パーセント"]})
        assert relevance_test(["Sierra", "snowpack"], ["雪"], d) is None

    def test_glossary_term(self):
        glossary = BilingualDictionary({"CO2": ["CO2"]})
        assert relevance_test(["CO2"], "毎日 CO2 を".split(), [BilingualDictionary(), glossary]) == "CO2"

    def test_longest_subspan_first(self):
        d = BilingualDictionary({"sierra snowpack": ["シエラ積雪"], "snowpack": ["積雪"]})
        assert relevance_test(["Sierra", "snowpack"], ["シエラ", "積雪", "が"], d) == "シエラ積雪"

    def test_lemmatized_lookup(self):
        d = BilingualDictionary({"ocean": ["海"]})
        assert relevance_test(["oceans"], ["海", "へ"], d) == "海"

    def test_numbers_as_words_and_digits(self):
        d = BilingualDictionary({"forty": ["四十"]})
        assert relevance_test(["40"], ["四十"], d) == "四十"
        assert relevance_test(["40"], ["40", "%"], BilingualDictionary()) == "40"

    @settings(max_examples=50, deadline=None)
    @given(st.dictionaries(st.sampled_from(["a", "b", "c", "a b", "b c"]),
                           st.sets(st.sampled_from(["x", "y", "z", "xy"]), min_size=1), max_size=5),
           st.dictionaries(st.sampled_from(["a", "b", "c"]),
                           st.sets(st.sampled_from(["x", "y", "w"]), min_size=1), max_size=3),
           st.lists(st.sampled_from(["x", "y", "z", "q"]), max_size=4))
    def test_monotone_in_dictionary(self, base, extra, reference):
        small = BilingualDictionary(base)
        big = small.merged(BilingualDictionary(extra))
        span = ["a", "b", "c"]
        if relevance_test(span, reference, small) is not None:
            assert relevance_test(span, reference, big) is not None


class TestCoverage:
    def setup_method(self):
        self.s = snowpack_sentence()
        self.d = BilingualDictionary({"percent": ["パーセント"], "snowpack": ["積雪"], "sierra": ["シエラ"]})
        self.interp = "カリフォルニア で は 、 4 パーセント 少な く な っ て".split()

    def test_literal(self):
        cov = coverage_test(self.s, TermSpan(8, 9, "B"), self.interp, self.d)
        assert cov.label == "literal" and not cov.needs_review

    def test_human_untranslated(self):
        human = [HumanAnnotation("t", 0, "B", 12, 14, "untranslated")]
        assert coverage_test(self.s, TermSpan(12, 14, "B"), self.interp, self.d, human).label == "untranslated"

    def test_mistranslated_number(self):
        human = [HumanAnnotation("t", 0, "B", 7, 8, "untranslated")]
        cov = coverage_test(self.s, TermSpan(7, 8, "B"), self.interp, self.d, human)
        assert cov == ("untranslated", False)

    def test_nonliteral_verdict(self):
        human = [HumanAnnotation("t", 0, "B", 9, 10, "nonliteral")]
        assert coverage_test(self.s, TermSpan(9, 10, "B"), self.interp, self.d, human).label == "nonliteral"

    def test_enclosing_verdict(self):
        human = [HumanAnnotation("t", 0, "B", 12, 14, "translated")]
        assert coverage_test(self.s, TermSpan(13, 14, "B"), self.interp, self.d, human).label == "literal"

    def test_verdict_for_other_rank_ignored(self):
        human = [HumanAnnotation("t", 0, "S", 12, 14, "translated")]
        cov = coverage_test(self.s, TermSpan(12, 14, "B"), self.interp, self.d, human)
        assert cov == ("untranslated", True)


class TestIOTags:
    def test_snowpack(self):
        s = snowpack_sentence()
        tags = assign_io_tags(s, [TermSpan(7, 8), TermSpan(12, 14)], "B")
        tagged = [tok.surface for tok, t in zip(s.tokens, tags.tags) if t == "I"]
        assert tagged == ["40", "Sierra", "snowpack"]

    def test_no_spans(self):
        assert assign_io_tags(_sent("NN", "DT"), []).tags == ("O", "O")

    def test_full_cover(self):
        assert assign_io_tags(_sent("NN", "NNS"), [TermSpan(0, 2)]).tags == ("I", "I")

    def test_overlap_rejected(self):
        with pytest.raises(InvariantError):
            assign_io_tags(_sent("NN", "NN", "NN"), [TermSpan(0, 2), TermSpan(1, 3)])

    def test_non_term_pos_rejected(self):
        with pytest.raises(InvariantError):
            assign_io_tags(_sent("NN", "VB"), [TermSpan(0, 2)])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sampled_from(["NN", "CD", "DT", "VB", "NNP"]), min_size=1, max_size=15), st.data())
    def test_roundtrip_through_spans(self, pos, data):
        s = _sent(*pos)
        tags = tuple(data.draw(st.sampled_from("IO")) if p in TERM_POS else "O" for p in pos)
        seq = TagSequence(tags, "B")
        assert assign_io_tags(s, spans_from_tags(seq), "B") == seq


class TestPipeline:
    def test_snowpack_gold(self, annotated_snowpack):
        triples = annotated_snowpack[0].triples
        s0 = triples[0]
        assert [t.surface for t, g in zip(s0.source.tokens, s0.gold["B"]) if g == "I"] == ["40", "Sierra", "snowpack"]
        assert "I" not in triples[1].gold["B"]
        assert triples[2].gold["B"] == ("O",) * 5

    def test_tags_only_on_term_pos(self, planted):
        talks, _ = planted
        for talk in talks:
            for tr in talk.triples:
                for tok, tag in zip(tr.source.tokens, tr.gold["B"]):
                    assert tag == "O" or tok.pos in TERM_POS

    def test_human_file(self, tmp_path):
        p = tmp_path / "h.tsv"
        p.write_text("snowpack\t0\tB\t12\t14\tuntranslated\n", encoding="utf-8")
        assert load_human_annotations(p) == [HumanAnnotation("snowpack", 0, "B", 12, 14, "untranslated")]
        p.write_text("snowpack\t0\tB\t12\t14\tmaybe\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_human_annotations(p)


class TestStats:
    def test_empty(self):
        stats = annotation_stats([])
        assert stats.coverage == {} and stats.final == {}
        assert set(stats.overlap.values()) == {0}

    def test_snowpack(self, annotated_snowpack):
        stats = annotation_stats(annotated_snowpack)
        b = stats.coverage["B"]
        # california, percent, ton(s), 70000000, CO2, day literal; decline non-literal
        assert (b["literal"], b["nonliteral"], b["untranslated"]) == (6, 1, 3)
        assert stats.final["B"]["terms"] == 3
        assert stats.final["B"]["itags"] == 3
        assert stats.final["B"]["itag_pct_all"] == pytest.approx(100 * 3 / 30)
        assert stats.final["B"]["itag_pct_noun"] == pytest.approx(100 * 3 / 10)
        assert stats.overlap["B"] == 3 and stats.overlap["B_only"] == 3

    def test_percentages_sum(self, planted):
        talks, _ = planted
        for row in annotation_stats(talks).coverage.values():
            total = row["literal_pct"] + row["nonliteral_pct"] + row["untranslated_pct"]
            assert total == pytest.approx(100.0)

    def test_overlap_counts(self):
        from untrans.corpus import AlignedTriple, Talk

        s = _sent("NN", "NN", "NN")
        terms = [TermSpan(0, 1, r, "untranslated", "x", True) for r in "BAS"]
        terms += [TermSpan(1, 2, "B", "untranslated", "y", True), TermSpan(1, 2, "A", "untranslated", "y", True)]
        terms += [TermSpan(2, 3, "S", "untranslated", "z", True)]
        talk = Talk("t", [AlignedTriple(s, [], {r: [] for r in "BAS"}, terms=terms,
                                         gold={"B": ("I", "I", "O"), "A": ("I", "I", "O"), "S": ("I", "O", "I")})])
        ov = annotation_stats([talk]).overlap
        assert (ov["B"], ov["A"], ov["S"]) == (2, 2, 2)
        assert (ov["B&A"], ov["B&S"], ov["A&S"], ov["B&A&S"]) == (2, 1, 1, 1)
        assert (ov["B_only"], ov["A_only"], ov["S_only"]) == (0, 0, 1)

    def test_kv_and_text(self, annotated_snowpack):
        stats = annotation_stats(annotated_snowpack)
        kv = stats.key_values()
        assert kv["final.B.terms"] == 3
        assert "B-rank" in stats.format_text()
        assert np.isclose(kv["coverage.T.literal_pct"], 100.0)
