#!/usr/bin/env python3
"""Regenerate the bundled toy corpus (deterministic).

Emits src/subtok/data/toy_train.txt and toy_valid.txt: 2000 pre-tokenized
sentences, one per line — templated sentences over a morphologically
patterned lexicon (prefixes, inflections, -ness/-less/-ful derivations)
plus a short public-domain excerpt (Lewis Carroll, "Alice's Adventures in
Wonderland", 1865; lightly edited and pre-tokenized).
"""

from __future__ import annotations

import random
from pathlib import Path

SEED = 20190801
TOTAL = 2000
VALID = 200

VERB_STEMS = [
    "play", "walk", "jump", "read", "sing", "paint", "watch", "follow",
    "help", "teach", "learn", "climb", "dance", "laugh", "clean", "cook",
    "open", "close", "count", "dream", "gather", "wander", "whisper",
    "listen", "answer", "wonder", "visit", "repair", "discover", "build",
    "carry", "deliver", "explore", "greet", "hammer", "iron", "juggle",
    "knit", "measure", "notice", "observe", "polish", "question", "remember",
    "search", "travel", "unload", "varnish", "welcome", "yawn",
]

NOUNS = [
    "cat", "dog", "bird", "fish", "horse", "mouse", "tiger", "rabbit",
    "farmer", "baker", "singer", "teacher", "child", "garden", "river",
    "forest", "mountain", "village", "market", "castle", "painter",
    "builder", "driver", "sailor", "doctor", "sister", "brother", "window",
    "basket", "bottle", "candle", "flower", "stone", "bridge", "tower",
    "meadow", "valley", "lantern", "harbour", "orchard", "kitchen",
    "library", "mirror", "pocket", "ribbon", "saddle", "thimble", "wagon",
    "anchor", "barrel", "cottage", "engine", "feather", "goblet", "hammock",
    "island", "jacket", "kettle", "ladder", "magnet", "needle", "oven",
    "pebble", "quilt", "rooster", "shovel", "trumpet", "umbrella", "violin",
    "weaver", "xylophone", "yarn", "zebra", "chimney", "dresser", "fiddle",
]

COMPOUND_COUNT = 400

ADJ_BASE = [
    "happy", "kind", "usual", "helpful", "useful", "useless", "careful",
    "careless", "quiet", "bright", "little", "golden", "gentle", "clever",
    "tidy", "lucky", "brave", "calm", "steady", "merry", "hopeful",
    "hopeless", "restful", "restless", "cheerful", "thankful", "fearless",
]

NESS_NOUNS = [
    "happiness", "kindness", "usefulness", "uselessness", "carefulness",
    "carelessness", "quietness", "brightness", "gentleness", "cleverness",
    "braveness", "calmness", "steadiness", "merriness", "hopefulness",
    "hopelessness", "restfulness", "restlessness", "cheerfulness",
    "thankfulness", "fearlessness",
]

ADVERBS = [
    "slowly", "quickly", "quietly", "brightly", "gently", "bravely",
    "calmly", "gladly", "softly", "neatly", "loudly", "warmly", "sweetly",
    "kindly", "proudly", "rarely", "daily", "early", "together", "alone",
]

PREFIXES = ["un", "re", "over"]

ALICE_LINES = """\
Alice was beginning to get very tired of sitting by her sister on the bank
and of having nothing to do
once or twice she had peeped into the book her sister was reading
but it had no pictures or conversations in it
and what is the use of a book thought Alice
without pictures or conversations
so she was considering in her own mind
whether the pleasure of making a daisy chain
would be worth the trouble of getting up and picking the daisies
when suddenly a white rabbit with pink eyes ran close by her
there was nothing so very remarkable in that
nor did Alice think it so very much out of the way
to hear the rabbit say to itself
oh dear oh dear I shall be late
but when the rabbit actually took a watch out of its waistcoat pocket
and looked at it and then hurried on
Alice started to her feet
for it flashed across her mind
that she had never before seen a rabbit with either a waistcoat pocket
or a watch to take out of it
and burning with curiosity she ran across the field after it
and fortunately was just in time to see it pop down a large rabbit hole
under the hedge
in another moment down went Alice after it
never once considering how in the world she was to get out again
the rabbit hole went straight on like a tunnel for some way
and then dipped suddenly down
so suddenly that Alice had not a moment to think about stopping herself
before she found herself falling down a very deep well
either the well was very deep or she fell very slowly
for she had plenty of time as she went down to look about her
and to wonder what was going to happen next
first she tried to look down and make out what she was coming to
but it was too dark to see anything
then she looked at the sides of the well
and noticed that they were filled with cupboards and book shelves
here and there she saw maps and pictures hung upon pegs
she took down a jar from one of the shelves as she passed
it was labelled orange marmalade
but to her great disappointment it was empty
she did not like to drop the jar for fear of killing somebody
so managed to put it into one of the cupboards as she fell past it
well thought Alice to herself
after such a fall as this I shall think nothing of tumbling down stairs
how brave they will all think me at home
why I would not say anything about it
even if I fell off the top of the house
down down down
would the fall never come to an end
I wonder how many miles I have fallen by this time
she said aloud
I must be getting somewhere near the centre of the earth
presently she began again
I wonder if I shall fall right through the earth
how funny it will seem to come out among the people
that walk with their heads downward
""".strip().split("\n")


def verb_forms(stem: str) -> list[str]:
    if stem.endswith("e"):
        return [stem, stem + "s", stem + "d", stem[:-1] + "ing"]
    return [stem, stem + "s", stem + "ed", stem + "ing"]


def build_lexicon(rng: random.Random) -> dict[str, list[str]]:
    verbs = []
    for stem in VERB_STEMS:
        verbs.extend(verb_forms(stem))
        for prefix in PREFIXES[:2]:
            verbs.extend(verb_forms(prefix + stem)[:2])
    adjectives = list(ADJ_BASE)
    adjectives.extend("un" + a for a in ADJ_BASE if not a.startswith("un"))
    for adj in ADJ_BASE:
        if adj.endswith("y"):
            adjectives.extend([adj[:-1] + "ier", adj[:-1] + "iest"])
        elif not adj.endswith("ss"):
            adjectives.extend([adj + "er", adj + "est"])
    compounds = []
    while len(compounds) < COMPOUND_COUNT:
        a, b = rng.choice(NOUNS), rng.choice(NOUNS)
        if a != b and a + b not in compounds:
            compounds.append(a + b)
    nouns = list(NOUNS) + [n + "s" for n in NOUNS] + NESS_NOUNS + compounds
    return {"verb": verbs, "noun": nouns, "adj": adjectives, "adv": ADVERBS}


TEMPLATES = [
    ("the", "noun", "verb", "adv"),
    ("the", "adj", "noun", "verb"),
    ("a", "noun", "verb", "the", "noun"),
    ("the", "noun", "verb", "in", "the", "noun"),
    ("noun", "verb", "adv"),
    ("the", "noun", "is", "adj"),
    ("her", "noun", "verb", "with", "noun"),
    ("the", "adj", "noun", "verb", "the", "noun"),
    ("noun", "and", "noun", "verb"),
    ("a", "adj", "noun", "verb", "adv"),
    ("the", "noun", "of", "the", "noun", "verb"),
    ("his", "adj", "noun", "verb"),
]


def generate() -> list[str]:
    rng = random.Random(SEED)
    lexicon = build_lexicon(rng)
    synthetic = TOTAL - len(ALICE_LINES)
    lines = []
    for _ in range(synthetic):
        template = rng.choice(TEMPLATES)
        words = [rng.choice(lexicon[slot]) if slot in lexicon else slot for slot in template]
        lines.append(" ".join(words))
    lines.extend(ALICE_LINES)
    rng.shuffle(lines)
    return lines


def main() -> None:
    out_dir = Path(__file__).resolve().parent.parent / "src" / "subtok" / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = generate()
    train, valid = lines[VALID:], lines[:VALID]
    (out_dir / "toy_train.txt").write_text("\n".join(train) + "\n", encoding="utf-8")
    (out_dir / "toy_valid.txt").write_text("\n".join(valid) + "\n", encoding="utf-8")
    print(f"wrote {len(train)} train / {len(valid)} valid lines to {out_dir}")


if __name__ == "__main__":
    main()
