#!/usr/bin/env python3
"""Regenerate data/pos_lexicon.tsv.

Takes the most frequent English words (wordfreq) and records, for each
open-class word, the parts of speech it can take (lemminflect) plus a
default tag used when context does not disambiguate.

    pip install wordfreq lemminflect
    python3 tools/gen_pos_lexicon.py --size 5000 > data/pos_lexicon.tsv
"""
import argparse
import pathlib
import re

import lemminflect
import wordfreq

TAGS = {"NOUN": "Noun", "PROPN": "Noun", "VERB": "Verb", "ADJ": "Adjective", "ADV": "Other"}
WORD = re.compile(r"^[a-z]+(?:['-][a-z]+)*$")


def closed_class(root):
    words = set()
    for line in (root / "data" / "closed_class.tsv").read_text().splitlines():
        if line and not line.startswith("#"):
            words.add(line.split("\t")[0])
    return words


def default_tag(word, lemmas):
    tags = {TAGS[k] for k in lemmas if k in TAGS}
    if len(tags) == 1:
        return next(iter(tags))
    verb_lemmas = lemmas.get("VERB", ())
    if "Verb" in tags and (word.endswith("ed") or word.endswith("ing")):
        return "Verb"
    if "Noun" in tags and word.endswith("s") and not word.endswith("ss"):
        return "Noun"  # plural rather than third-person verb: eyes, hands
    if "Verb" in tags and any(lemma != word for lemma in verb_lemmas):
        return "Verb"  # inflected form: saw, found, left
    for tag in ("Adjective", "Noun", "Verb", "Other"):
        if tag in tags:
            return tag
    return None


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=5000)
    args = ap.parse_args()
    root = pathlib.Path(__file__).resolve().parent.parent
    closed = closed_class(root)

    print("# Open-class ambiguity table. Format: word<TAB>default<TAB>possible tags")
    print("# Generated by tools/gen_pos_lexicon.py; do not edit by hand.")
    emitted = 0
    for word in wordfreq.iter_wordlist("en"):
        if emitted >= args.size:
            break
        if word in closed or not WORD.match(word) or len(word) < 2 and word != "a":
            continue
        lemmas = lemminflect.getAllLemmas(word)
        tag = default_tag(word, lemmas)
        if tag is None:
            continue
        possible = sorted({TAGS[k] for k in lemmas if k in TAGS})
        print(f"{word}\t{tag}\t{','.join(possible)}")
        emitted += 1


if __name__ == "__main__":
    main()
