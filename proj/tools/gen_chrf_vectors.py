#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes chrF reference values computed by sacrebleu (CHRF(), default settings).

Each vector is {"hyp", "ref", "chrf"} with chrf in [0, 1]. Identical strings are
skipped: the library scores them 1.0 by definition, sacrebleu scores two empty
strings 0.0.
"""

import argparse
import json
import pathlib
import random

from sacrebleu.metrics import CHRF

HAND = [
    ("the iron sword", "an iron sword"),
    ("Welcome, traveler!", "Welcome traveller."),
    ("abc", "xyz"),
    ("a", "ab"),
    ("", "something"),
    ("short", ""),
    ("Das Schwert ist scharf.", "Das Schwert ist stumpf."),
    ("铁剑很锋利", "这把铁剑很锋利"),
    ("tab\tand\nnewline", "tab and newline"),
    ("non breaking　spaces", "non breaking spaces"),
    ("emoji 🗡️ blade", "emoji blade 🗡️"),
    ("aaaaaaa", "aaaa"),
]

ALPHABET = list("abcdefgh ijk lmn  opq,.!?") + ["é", "ß", "剑", "铁", "🗡", " "]


def random_text(rng):
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 40)))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path, required=True)
    ap.add_argument("--random", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    pairs = list(HAND)
    while len(pairs) < len(HAND) + args.random:
        hyp, ref = random_text(rng), random_text(rng)
        if "".join(hyp.split()) != "".join(ref.split()):
            pairs.append((hyp, ref))

    metric = CHRF()
    vectors = [{"hyp": h, "ref": r, "chrf": metric.sentence_score(h, [r]).score / 100.0}
               for h, r in pairs]
    args.out.write_text(json.dumps(vectors, indent=1, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
