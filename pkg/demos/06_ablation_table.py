"""Drop one feature group at a time and compare average precision.

The synthetic talks hide untranslated terms behind rare words and fast
speech, so removing word timing should hurt the most.
"""

import io

from untrans.evaluation import ablation, format_table, write_pr_csv
from untrans.sample_data import planted_dataset

talks, resources = planted_dataset(n_talks=6)
report = ablation(talks, "B", resources=resources, bootstrap_iterations=300)
print(format_table({"B": report}))

buf = io.StringIO()
write_pr_csv({"B": report}, buf)
print(f"\n{len(buf.getvalue().splitlines()) - 1} precision-recall points available for plotting")
