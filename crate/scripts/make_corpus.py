#!/usr/bin/env python3
"""Generate the bundled synthetic corpus at assets/corpus.txt.

Draws ~60k pseudo-word tokens from a Zipf(1.1) law over an 8000-word
vocabulary with mild local stickiness, so the token stream has the
heavy-tailed unigram profile and short-range repetition of natural prose
while remaining fully deterministic and license-free.
"""

import random

SEED = 20240817
VOCAB = 8000
TOKENS = 60000
EXPONENT = 1.1
STICKY = 0.08  # chance to repeat one of the last few words
LINE_WORDS = 12

ONSETS = ["b", "br", "c", "ch", "d", "dr", "f", "fl", "g", "gr", "h", "j",
          "k", "l", "m", "n", "p", "pl", "qu", "r", "s", "sh", "st", "t",
          "th", "tr", "v", "w", "z"]
NUCLEI = ["a", "e", "i", "o", "u", "ai", "ea", "ou", "ie"]
CODAS = ["", "n", "r", "s", "t", "l", "nd", "st", "m", "ck"]


def word(i: int) -> str:
    parts = []
    n = i
    while True:
        o = ONSETS[n % len(ONSETS)]
        n //= len(ONSETS)
        v = NUCLEI[n % len(NUCLEI)]
        n //= len(NUCLEI)
        c = CODAS[n % len(CODAS)]
        n //= len(CODAS)
        parts.append(o + v + c)
        if n == 0:
            break
    return "".join(parts)


def main() -> None:
    rng = random.Random(SEED)
    weights = [1.0 / (rank + 1) ** EXPONENT for rank in range(VOCAB)]
    total = sum(weights)
    cdf = []
    acc = 0.0
    for w in weights:
        acc += w / total
        cdf.append(acc)
    cdf[-1] = 1.0

    import bisect

    vocab = [word(i) for i in range(VOCAB)]
    assert len(set(vocab)) == VOCAB

    out = []
    recent = []
    for _ in range(TOKENS):
        if recent and rng.random() < STICKY:
            tok = rng.choice(recent)
        else:
            tok = vocab[bisect.bisect_left(cdf, rng.random())]
        out.append(tok)
        recent.append(tok)
        if len(recent) > 5:
            recent.pop(0)

    lines = []
    for i in range(0, len(out), LINE_WORDS):
        lines.append(" ".join(out[i:i + LINE_WORDS]))
    with open("assets/corpus.txt", "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"tokens={len(out)} vocab_used={len(set(out))}")


if __name__ == "__main__":
    main()
