"""Replay a talk word by word, as an interpreter's assistant would see it.

Each word is scored the moment it arrives, using only what was already said.
The output is identical to tagging whole sentences offline.
"""

import io

from untrans.cli import stream_replay
from untrans.features import FeatureConfig, gold_examples
from untrans.model import TrainConfig, train
from untrans.sample_data import planted_dataset
from untrans.tagger import tag_sentence, tag_stream, talk_events

talks, resources = planted_dataset(n_talks=3, sentences_per_talk=20)
config = FeatureConfig()
model = train([(v, y) for v, y, _ in gold_examples(talks[:2], "B", config, resources)], TrainConfig())

talk = talks[2]
streamed = list(tag_stream(model, config, talk_events(talk), resources))
offline = [p for tr in talk.triples for p in tag_sentence(model, config, tr.source, resources)]
print(f"stream and batch agree on {len(streamed)} words: {streamed == offline}")

# Timed replay at 10x speed; sleeping is recorded instead of performed here.
waits = []
out = io.StringIO()
stream_replay([talk], model, config, resources, threshold=0.5, speed=10.0, out=out, sleep=waits.append)
alerts = [line for line in out.getvalue().splitlines() if line.endswith("ALERT")]
print(f"replay would take {sum(waits):.1f}s; {len(alerts)} alerts, first few:")
for line in alerts[:5]:
    print("  " + line)
