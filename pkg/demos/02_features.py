"""Inspect the feature vector the tagger sees for one word.

Features only look backwards: the word itself plus a window of its
predecessors in the same sentence.
"""

from untrans.corpus import FrequencyTable
from untrans.features import FeatureConfig, Resources, WindowState, extract, group_of
from untrans.sample_data import snowpack_pronunciations, snowpack_sentence, snowpack_talk

sentence = snowpack_sentence()
_, dictionary, _ = snowpack_talk()
freq = FrequencyTable({"california": 10 ** 7, "percent": 10 ** 8, "decline": 10 ** 6,
                       "sierra": 10 ** 5, "snowpack": 10 ** 2, "the": 10 ** 9})
resources = Resources(freq, dictionary, snowpack_pronunciations())

config = FeatureConfig()
state = WindowState(config.window_size)
for tok in sentence.tokens[:13]:
    state.push(tok, "O")

word = sentence[13]
vector = extract(config, state, word, resources)
print(f"features for {word.surface!r} ({len(vector)} active)")
for name in sorted(vector, key=lambda n: (group_of(n), n)):
    print(f"  {group_of(name):22} {name:24} {vector[name]:g}")

# Dropping a group removes exactly its features.
smaller = extract(config.without("word_timing"), state, word, resources)
print(f"\nwithout word_timing: {len(smaller)} active")
