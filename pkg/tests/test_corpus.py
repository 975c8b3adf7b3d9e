import io
import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from untrans.corpus import (
    dump_corpus,
    load_bilingual_dictionary,
    load_corpus,
    load_frequency_table,
    load_pronunciation_dict,
    read_corpus,
)
from untrans.errors import AlignmentError, ParseError, TimingError
from untrans.sample_data import planted_corpus


def _record(**over):
    rec = {
        "talk_id": "t1", "sentence_index": 0,
        "tokens": [["Ocean", "NN", 0.0, 0.4], ["rises", "VBZ", 0.4, 0.9]],
        "reference": ["海", "が", "上がる"],
        "interpretations": {"B": ["海", "が"]},
    }
    rec.update(over)
    return json.dumps(rec, ensure_ascii=False)


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadCorpus:
    def test_minimal(self, tmp_path):
        talks = load_corpus(_write(tmp_path, "c.jsonl", _record() + "\n"))
        assert len(talks) == 1
        assert len(talks[0].triples) == 1
        triple = talks[0].triples[0]
        assert triple.source.tokens[1].surface == "rises"
        assert triple.interpretations == {"B": ["海", "が"]}

    def test_empty_interpretations_accepted(self, tmp_path):
        talks = load_corpus(_write(tmp_path, "c.jsonl", _record(interpretations={}) + "\n"))
        assert talks[0].triples[0].interpretations == {}

    def test_word_indices(self):
        lines = [_record(sentence_index=0), _record(sentence_index=3), _record(talk_id="t2")]
        talks = read_corpus(lines)
        assert [t.talk_id for t in talks] == ["t1", "t2"]
        idx = [tok.talk_word_index for tok in talks[0].tokens()]
        assert idx == [0, 1, 2, 3]
        assert [tok.sent_word_index for tok in talks[0].tokens()] == [0, 1, 0, 1]

    def test_parse_error_has_line(self):
        with pytest.raises(ParseError) as err:
            read_corpus([_record(), "{not json"], path="c.jsonl")
        assert err.value.line == 2

    def test_missing_reference(self):
        rec = json.loads(_record())
        del rec["reference"]
        with pytest.raises(AlignmentError):
            read_corpus([json.dumps(rec)])

    def test_end_before_start(self):
        with pytest.raises(TimingError):
            read_corpus([_record(tokens=[["a", "DT", 1.0, 0.5]])])

    def test_decreasing_starts(self):
        with pytest.raises(TimingError):
            read_corpus([_record(tokens=[["a", "DT", 1.0, 1.5], ["b", "NN", 0.5, 0.9]])])

    def test_unknown_rank(self):
        with pytest.raises(ParseError):
            read_corpus([_record(interpretations={"X": []})])

    def test_sentence_index_must_increase(self):
        with pytest.raises(ParseError):
            read_corpus([_record(sentence_index=2), _record(sentence_index=2)])

    def test_glossary_attached_to_talk(self):
        talks = read_corpus([_record(glossary={"CO2": ["CO2"]})])
        assert talks[0].glossary.lookup("co2") == {"CO2"}


class TestRoundTrip:
    def test_planted_corpus(self):
        talks, _, _ = planted_corpus(n_talks=2, sentences_per_talk=5, seed=3)
        buf = io.StringIO()
        dump_corpus(talks, buf)
        again = read_corpus(io.StringIO(buf.getvalue()))
        assert again == talks

    def test_annotated_snowpack(self, annotated_snowpack):
        buf = io.StringIO()
        dump_corpus(annotated_snowpack, buf)
        again = read_corpus(io.StringIO(buf.getvalue()))
        assert again == annotated_snowpack

    @settings(max_examples=30, deadline=None)
    @given(st.lists(
        st.tuples(st.text(min_size=1, max_size=6), st.sampled_from(["NN", "CD", "DT", "NNP"]),
                  st.floats(0, 100, allow_nan=False), st.floats(0, 3, allow_nan=False)),
        min_size=0, max_size=8))
    def test_property(self, rows):
        starts = sorted(r[2] for r in rows)
        tokens = [[s, p, st_, st_ + d] for (s, p, _, d), st_ in zip(rows, starts)]
        line = json.dumps({"talk_id": "x", "sentence_index": 0, "tokens": tokens,
                           "reference": ["r"], "interpretations": {"S": ["i"]}})
        talks = read_corpus([line])
        buf = io.StringIO()
        dump_corpus(talks, buf)
        assert read_corpus(io.StringIO(buf.getvalue())) == talks


class TestDictionary:
    def test_union(self, tmp_path):
        a = _write(tmp_path, "a.tsv", "ocean\t海\nocean\t海洋\n")
        b = _write(tmp_path, "b.tsv", "Ocean\tオーシャン\n")
        d = load_bilingual_dictionary([a, b])
        assert d.lookup("OCEAN") == {"海", "海洋", "オーシャン"}

    def test_percent_fixture(self, tmp_path):
        d = load_bilingual_dictionary(_write(tmp_path, "d.tsv", "percent\tパーセント\n"))
        assert "パーセント" in d.lookup("percent")

    def test_order_independent(self, tmp_path):
        files = [
            _write(tmp_path, "a.tsv", "x\t1\ny\t2\n"),
            _write(tmp_path, "b.tsv", "x\t3\nz\t4\n"),
            _write(tmp_path, "c.tsv", "y\t2\nZ\t5\n"),
        ]
        dicts = [load_bilingual_dictionary(list(p)) for p in itertools.permutations(files)]
        assert all(d == dicts[0] for d in dicts)

    def test_malformed_line(self, tmp_path):
        with pytest.raises(ParseError) as err:
            load_bilingual_dictionary(_write(tmp_path, "d.tsv", "a\tb\nno tab here\n"))
        assert err.value.line == 2

    def test_large_file(self, tmp_path):
        n = 200_000
        p = tmp_path / "big.tsv"
        with open(p, "w", encoding="utf-8") as fh:
            for i in range(n):
                fh.write(f"w{i}\tt{i}\n")
        assert len(load_bilingual_dictionary(p)) == n


class TestFrequencyTable:
    def test_total(self, tmp_path):
        t = load_frequency_table(_write(tmp_path, "f.tsv", "the\t1000\nsnowpack\t2\n"))
        assert t.total == 1002

    def test_duplicates_summed(self, tmp_path):
        t = load_frequency_table(_write(tmp_path, "f.tsv", "the\t5\nThe\t7\n"))
        assert t.count("the") == 12

    def test_oov(self, tmp_path):
        t = load_frequency_table(_write(tmp_path, "f.tsv", "the\t5\n"))
        assert t.count("zyzzyva") is None

    def test_non_numeric(self, tmp_path):
        with pytest.raises(ParseError):
            load_frequency_table(_write(tmp_path, "f.tsv", "the\tmany\n"))


class TestPronunciations:
    def test_syllables(self, tmp_path):
        p = load_pronunciation_dict(_write(tmp_path, "cmu.txt",
                                           ";;; comment\nPERCENT  P ER0 S EH1 N T\nA  AH0\n"))
        assert p.syllables("percent") == 2
        assert p.syllables("a") == 1
        assert p.syllables("snowpack") is None

    def test_variants_keep_first(self, tmp_path):
        p = load_pronunciation_dict(_write(tmp_path, "cmu.txt",
                                           "EITHER  IY1 DH ER0\nEITHER(2)  AY1 DH ER0\n"))
        assert p.phonemes("either") == ["IY1", "DH", "ER0"]

    def test_empty_pronunciation(self, tmp_path):
        with pytest.raises(ParseError):
            load_pronunciation_dict(_write(tmp_path, "cmu.txt", "WORD\n"))
