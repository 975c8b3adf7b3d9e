"""Turn a small aligned talk into IO-tagged training data.

The built-in three-sentence talk has a reference translation and one
interpreter (rank B) output per sentence. A term counts as untranslated when
it is made of nouns/numbers, some dictionary translation of it appears in the
reference, and the interpreter output does not contain one.
"""

from untrans.annotate import annotate_corpus, annotation_stats
from untrans.sample_data import snowpack_talk

talk, dictionary, human = snowpack_talk()

# Without human verdicts, every term whose translation is missing from the
# interpreter output defaults to "untranslated" and is flagged for review.
draft = annotate_corpus([talk], dictionary)
flagged = [t for tr in draft[0].triples for t in tr.terms if t.needs_review]
print(f"{len(flagged)} judgements need human review")

# With verdicts, "decline" becomes a non-literal rendering rather than a miss.
final = annotate_corpus([talk], dictionary, human)
for triple in final[0].triples:
    tagged = [f"{tok.surface}/{tag}" for tok, tag in zip(triple.source.tokens, triple.gold["B"])]
    print(" ".join(tagged))

print()
print(annotation_stats(final).format_text())
