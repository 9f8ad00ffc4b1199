#!/usr/bin/env python3
"""Generate the bundled mini-corpus fixture.

Writes a synthetic Early-New-High-German-flavoured corpus in the vertical
format together with matching clause and referent annotations. The output is
deterministic for a given seed.

    python3 contrib/make_fixture.py fixtures/mini
"""
import json
import random
import sys
from pathlib import Path

NOUNS = [
    # lemma, surface (sg), grammatical gender (m/f/n)
    ("Gott", "Gott", "m"), ("HErr", "HErrn", "m"), ("Seele", "Seele", "f"),
    ("Leib", "Leib", "m"), ("Tod", "Tod", "m"), ("Kind", "Kind", "n"),
    ("Vater", "Vater", "m"), ("Mutter", "Mutter", "f"), ("Trost", "Trost", "m"),
    ("Himmel", "Himmel", "m"), ("Grab", "Grab", "n"), ("Glaube", "Glauben", "m"),
    ("Gnade", "Gnade", "f"), ("Wort", "Wort", "n"), ("Predigt", "Predigt", "f"),
    ("Welt", "Welt", "f"), ("Sünde", "Sünde", "f"), ("Leben", "Leben", "n"),
    ("Freude", "Freude", "f"), ("Trübsal", "Trübsal", "f"), ("Herz", "Hertz", "n"),
    ("Christus", "Christum", "m"), ("Kirche", "Kirche", "f"), ("Gemeine", "Gemeine", "f"),
    ("Witwe", "Witwe", "f"), ("Bruder", "Bruder", "m"), ("Schwester", "Schwester", "f"),
    ("Engel", "Engel", "m"), ("Erbe", "Erbe", "n"), ("Hoffnung", "Hoffnung", "f"),
    ("Ruhe", "Ruhe", "f"), ("Stunde", "Stunde", "f"), ("Heiland", "Heiland", "m"),
    ("Schrift", "Schrifft", "f"), ("Knecht", "Knecht", "m"), ("Haus", "Hauß", "n"),
    ("Ende", "Ende", "n"), ("Rahel", "Rahel", "f"), ("Jacob", "Jacob", "m"),
    ("Pfarrer", "Pfarrer", "m"),
]
ART = {"m": ("den", "der"), "f": ("die", "die"), "n": ("das", "das")}
REL = {"m": "der", "f": "die", "n": "das"}
VERBS = [
    # lemma, finite 3sg, participle
    ("trösten", "tröstet", "getröstet"), ("lieben", "liebet", "geliebet"),
    ("preisen", "preiset", "gepreiset"), ("bewahren", "bewahret", "bewahret"),
    ("erlösen", "erlöset", "erlöset"), ("sehen", "siehet", "gesehen"),
    ("geben", "gibt", "gegeben"), ("nehmen", "nimpt", "genommen"),
    ("hören", "höret", "gehöret"), ("suchen", "suchet", "gesuchet"),
    ("loben", "lobet", "gelobet"), ("segnen", "segnet", "gesegnet"),
    ("rufen", "ruffet", "geruffen"), ("lehren", "lehret", "gelehret"),
    ("verlassen", "verlässet", "verlassen"), ("finden", "findet", "gefunden"),
    ("beweinen", "beweinet", "beweinet"), ("begraben", "begräbt", "begraben"),
    ("erkennen", "erkennet", "erkennet"), ("behüten", "behütet", "behütet"),
]
ADJS = [("selig", "seligen"), ("fromm", "frommen"), ("ewig", "ewigen"),
        ("lieb", "lieben"), ("gnädig", "gnädigen"), ("traurig", "traurigen"),
        ("heilig", "heiligen"), ("christlich", "christlichen")]
ADVS = ["heute", "allezeit", "gewißlich", "herzlich", "täglich", "selig", "sehr"]


class Doc:
    def __init__(self, doc_id, rng):
        self.id = doc_id
        self.rng = rng
        self.lines = []
        self.pos = 0
        self.mentions = []
        self.clauses = []
        self.recent = []

    def word(self, surface, lemma, tag):
        self.lines.append(f"{surface}\t{lemma}\t{tag}")
        self.pos += 1
        return self.pos - 1

    def punct(self, mark):
        tag = "$." if mark == "." else "$,"
        self.lines.append(f"{mark}\t{mark}\t{tag}")

    def end_sentence(self):
        self.punct(".")
        self.lines.append("")

    def pick_noun(self):
        # Favour recently mentioned referents so givenness varies.
        if self.recent and self.rng.random() < 0.45:
            lemma = self.rng.choice(self.recent[-12:])
            return next(n for n in NOUNS if n[0] == lemma)
        return self.rng.choice(NOUNS)

    def np(self, case, topic=False):
        lemma, surface, gender = self.pick_noun()
        start = self.pos
        self.word(ART[gender][0 if case == "acc" else 1], "der", "ART")
        if self.rng.random() < 0.3:
            adj_lemma, adj_surface = self.rng.choice(ADJS)
            self.word(adj_surface, adj_lemma, "ADJA")
        self.word(surface, lemma, "NN")
        self.mentions.append({
            "start": start, "end": self.pos, "ref": lemma,
            "inferable": int(self.rng.random() < 0.2), "topic": int(topic),
        })
        self.recent.append(lemma)
        return lemma, gender

    def verb(self):
        return self.rng.choice(VERBS)

    def simple(self):
        self.np("nom", topic=True)
        v = self.verb()
        self.word(v[1], v[0], "VVFIN")
        self.np("acc")
        if self.rng.random() < 0.5:
            adv = self.rng.choice(ADVS)
            self.word(adv, adv, "ADV")
        self.end_sentence()

    def relative_clause(self, head_lemma, gender):
        start = self.pos
        self.word(REL[gender], "der", "PRELS")
        self.mentions.append({"start": start, "end": self.pos, "ref": head_lemma,
                              "inferable": 0, "topic": 0})
        self.np("acc")
        if self.rng.random() < 0.4:
            adv = self.rng.choice(ADVS)
            self.word(adv, adv, "ADV")
        v = self.verb()
        self.word(v[2], v[0], "VVPP")
        self.word("hat", "haben", "VAFIN")
        return start, self.pos

    def in_situ(self, n):
        m1_start = self.pos
        self.np("nom", topic=True)
        self.word("hat", "haben", "VAFIN")
        head_lemma, gender = self.np("acc")
        m1_end = self.pos
        self.punct(self.rng.choice([",", "/"]))
        rc = self.relative_clause(head_lemma, gender)
        self.punct(self.rng.choice([",", "/"]))
        v = self.verb()
        m2_start = self.pos
        self.word(v[2], v[0], "VVPP")
        m2_end = self.pos
        self.end_sentence()
        self.clauses.append({
            "id": f"{self.id}-c{n:02d}", "doc": self.id, "variant": "in_situ",
            "matrix": [[m1_start, m1_end], [m2_start, m2_end]],
            "rc": list(rc), "attachment": rc[0],
        })

    def extraposed(self, n):
        m_start = self.pos
        self.np("nom", topic=True)
        self.word("hat", "haben", "VAFIN")
        head_lemma, gender = self.np("acc")
        attachment = self.pos
        v = self.verb()
        self.word(v[2], v[0], "VVPP")
        m_end = self.pos
        self.punct(self.rng.choice([",", "/"]))
        rc = self.relative_clause(head_lemma, gender)
        self.end_sentence()
        self.clauses.append({
            "id": f"{self.id}-c{n:02d}", "doc": self.id, "variant": "extraposed",
            "matrix": [[m_start, m_end]], "rc": list(rc), "attachment": attachment,
        })


def main(out_dir, seed=1614):
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    docs = []
    for doc_id in ["albinus", "barthisius", "briaeus", "zuckwolf"]:
        d = Doc(doc_id, rng)
        n = 0
        for _ in range(110):
            r = rng.random()
            if r < 0.08:
                d.in_situ(n)
                n += 1
            elif r < 0.16:
                d.extraposed(n)
                n += 1
            else:
                d.simple()
        docs.append(d)

    with open(out / "corpus.vert", "w", encoding="utf-8") as f:
        for d in docs:
            f.write(f"# doc: {d.id}\n")
            f.write("\n".join(d.lines))
            f.write("\n")
    with open(out / "clauses.json", "w", encoding="utf-8") as f:
        json.dump([c for d in docs for c in d.clauses], f, ensure_ascii=False, indent=1)
        f.write("\n")
    with open(out / "referents.tsv", "w", encoding="utf-8") as f:
        f.write("doc\tstart\tend\treferent_id\tinferable\ttopic\n")
        for d in docs:
            for m in d.mentions:
                f.write(f"{d.id}\t{m['start']}\t{m['end']}\t{m['ref']}\t{m['inferable']}\t{m['topic']}\n")
    words = sum(d.pos for d in docs)
    clauses = sum(len(d.clauses) for d in docs)
    print(f"{len(docs)} documents, {words} words, {clauses} clauses")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/mini")
