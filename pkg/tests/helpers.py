"""Write in-memory resources to the on-disk formats the CLI reads."""

from untrans.corpus import dump_corpus


def write_corpus(talks, path):
    with open(path, "w", encoding="utf-8") as fh:
        dump_corpus(talks, fh)
    return path


def write_dictionary(dictionary, path):
    with open(path, "w", encoding="utf-8") as fh:
        for src in sorted(dictionary.entries):
            for tgt in sorted(dictionary.entries[src]):
                fh.write(f"{src}\t{tgt}\n")
    return path


def write_frequencies(table, path):
    with open(path, "w", encoding="utf-8") as fh:
        for word in sorted(table.counts):
            fh.write(f"{word}\t{table.counts[word]}\n")
    return path


def write_pronunciations(pron, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(";;; test lexicon\n")
        for word in sorted(pron.entries):
            fh.write(f"{word}  {' '.join(pron.entries[word])}\n")
    return path


def write_human(annotations, path):
    with open(path, "w", encoding="utf-8") as fh:
        for h in annotations:
            fh.write(f"{h.talk_id}\t{h.sentence_index}\t{h.rank}\t{h.start}\t{h.end}\t{h.verdict}\n")
    return path
