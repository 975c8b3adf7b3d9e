"""Train the tagger on synthetic talks and tag a held-out sentence."""

from untrans.features import FeatureConfig, gold_examples
from untrans.model import TrainConfig, decision_score, dumps, train
from untrans.sample_data import planted_dataset
from untrans.tagger import tag_sentence

talks, resources = planted_dataset(n_talks=4, sentences_per_talk=30)
config = FeatureConfig()
examples = [(v, y) for v, y, _ in gold_examples(talks[:3], "B", config, resources)]
print(f"{len(examples)} training words, {sum(y == 'I' for _, y in examples)} untranslated")

model = train(examples, TrainConfig(C=1.0))
print(f"objective per epoch: {[round(x, 4) for x in model.loss_history[:5]]} ...")

top = sorted(model.weights.items(), key=lambda kv: -abs(kv[1]))[:8]
print("largest weights:")
for name, w in top:
    print(f"  {name:20} {w:+.3f}")

triple = talks[3].triples[0]
print()
for pred, gold in zip(tag_sentence(model, config, triple.source, resources), triple.gold["B"]):
    score = "" if pred.score is None else f"{pred.score:+.2f}"
    print(f"{pred.token.surface:12} {score:>6}  predicted={pred.label} gold={gold}")

# The model file is plain text and byte-stable for a fixed seed.
print()
print("\n".join(dumps(model).splitlines()[:6]))
assert decision_score(model, {}) == model.bias
