#!/usr/bin/env python3
"""Regenerates the desk-scale fixture knowledge graphs under data/.

The output is checked in; rerun only when the fixture layout changes:

    python3 scripts/gen_fixtures.py
"""

import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"


def lit(value):
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def iri(value):
    return "<" + value + ">"


class Writer:
    def __init__(self):
        self.lines = []

    def add(self, s, p, o):
        self.lines.append(f"{iri(s)} {iri(p)} {o} .")

    def save(self, path, header):
        with open(path, "w", encoding="utf-8") as f:
            f.write(header)
            f.write("\n".join(self.lines))
            f.write("\n")


def pseudo_names(rng, count, suffixes, taken):
    syllables = ["ra", "to", "vi", "zen", "lo", "pra", "mex", "ti", "do", "qui",
                 "nor", "sal", "bu", "fen", "cor", "ami", "lev", "dex", "ox", "ter"]
    out = []
    while len(out) < count:
        n = rng.randint(2, 3)
        stem = "".join(rng.choice(syllables) for _ in range(n))
        name = (stem + rng.choice(suffixes)).capitalize()
        if name not in taken:
            taken.add(name)
            out.append(name)
    return out


def biokg():
    rng = random.Random(20240601)
    ns = "http://www.biokg.com/"
    cls = ns + "class/"
    prop = ns + "property/"
    w = Writer()

    kingdoms = ["Organic", "Non-Organic"]
    for k in kingdoms:
        w.add(ns + "kingdom/" + k, RDF_TYPE, iri(cls + "Kingdom"))
        w.add(ns + "kingdom/" + k, ns + "NAME", lit(k))

    superclasses = ["Alkaloids", "Benzenoids", "Lipids", "Organoheterocyclic compounds",
                    "Organic acids", "Organohalogen compounds", "Phenylpropanoids",
                    "Nucleosides", "Organic oxygen compounds", "Organic nitrogen compounds",
                    "Homogeneous metal compounds", "Mixed metal compounds", "Hydrocarbons"]
    for i, s in enumerate(superclasses):
        node = ns + f"superclass/SC{i:02d}"
        w.add(node, RDF_TYPE, iri(cls + "Superclass"))
        w.add(node, ns + "NAME", lit(s))

    species = ["Homo sapiens", "Mus musculus", "Rattus norvegicus", "Arabidopsis thaliana",
               "Saccharomyces cerevisiae", "Escherichia coli", "Danio rerio",
               "Drosophila melanogaster", "Bos taurus", "Sus scrofa", "Gallus gallus",
               "Oryza sativa", "Xenopus laevis", "Caenorhabditis elegans",
               "Bacillus subtilis", "Canis lupus", "Zea mays", "Plasmodium falciparum"]
    for i, s in enumerate(species):
        node = ns + f"species/SP{i:02d}"
        w.add(node, RDF_TYPE, iri(cls + "Species"))
        w.add(node, ns + "NAME", lit(s))

    families = ["Kinase", "Transporter", "Protease", "Receptor"]
    for f in families:
        node = ns + "family/" + f
        w.add(node, RDF_TYPE, iri(cls + "Family"))
        w.add(node, ns + "NAME", lit(f))

    proteins = ["Q9LTJ2"] + [f"P{rng.randint(10000, 99999)}" for _ in range(59)]
    proteins = list(dict.fromkeys(proteins))
    for i, p in enumerate(proteins):
        node = ns + "protein/" + p
        w.add(node, RDF_TYPE, iri(cls + "Protein"))
        sp = 3 if p == "Q9LTJ2" else rng.randrange(len(species))
        w.add(node, prop + "SPECIES", iri(ns + f"species/SP{sp:02d}"))
        w.add(node, prop + "FAMILY", iri(ns + "family/" + rng.choice(families)))

    taken = {"Yohimbine", "Aprindine"}
    names = ["Yohimbine", "Aprindine"] + pseudo_names(rng, 78, ["ine", "ol", "ide", "ate", "one", "ib"], taken)
    ids = ["DB01392", "DB13677"]
    while len(ids) < len(names):
        cand = f"DB{rng.randint(12000, 19999):05d}"
        if cand not in ids:
            ids.append(cand)

    pubs = [ns + f"pubmed/{rng.randint(1000000, 9999999)}" for _ in range(40)]
    for pub in pubs:
        w.add(pub, RDF_TYPE, iri(cls + "Publication"))

    for i, (db, name) in enumerate(zip(ids, names)):
        node = ns + "drug/" + db
        w.add(node, RDF_TYPE, iri(cls + "Drug"))
        # DB13677 stays unnamed so it displays by its identifier.
        if db != "DB13677":
            w.add(node, ns + "NAME", lit(name))
        if db == "DB01392":
            kingdom = "Organic"
        else:
            kingdom = "Organic" if rng.random() < 0.8 else "Non-Organic"
        w.add(node, ns + "KINGDOM", iri(ns + "kingdom/" + kingdom))
        w.add(node, ns + "SUPERCLASS", iri(ns + f"superclass/SC{rng.randrange(len(superclasses)):02d}"))
        w.add(node, ns + "DESCRIPTION", lit("A small molecule listed in the fixture formulary."))
        for p in rng.sample(proteins, rng.randint(2, 6)):
            w.add(node, ns + "TARGET", iri(ns + "protein/" + p))
        for pub in rng.sample(pubs, rng.randint(2, 5)):
            w.add(node, ns + "RelatedPubMed", iri(pub))

    # Interaction edges dominate drug neighbourhoods, so retrieved contexts hit the caps.
    drug_nodes = [ns + "drug/" + db for db in ids]
    w.add(drug_nodes[0], ns + "DDI", iri(drug_nodes[1]))
    # DB13677 must be Yohimbine's first interaction partner in IRI order.
    for i, node in enumerate(drug_nodes):
        others = [d for d in drug_nodes if d != node]
        if node == drug_nodes[0]:
            others = [d for d in others if d > drug_nodes[1]]
        elif node < drug_nodes[1]:
            others = [d for d in others if d != drug_nodes[0]]
        for other in rng.sample(others, rng.randint(20, 45)):
            w.add(node, ns + "DDI", iri(other))

    w.save(os.path.join(ROOT, "biokg", "biokg.nt"),
           "# BioKG-style fixture graph (synthetic). Generated by scripts/gen_fixtures.py.\n")


def linkedmdb():
    rng = random.Random(20240602)
    ns = "http://data.linkedmdb.org/"
    cls = ns + "class/"
    movie = ns + "movie/"
    w = Writer()

    genres = ["Drama", "Comedy", "Thriller", "Documentary", "Animation", "Horror", "Science Fiction"]
    languages = ["English", "French", "German", "Hindi", "Japanese", "Spanish", "Italian",
                 "Korean", "Mandarin", "Russian", "Swedish", "Portuguese", "Danish", "Polish", "Turkish"]
    countries = ["USA", "UK", "France", "Germany", "India", "Japan", "Spain", "Italy", "Canada"]

    def entities(kind, labels):
        nodes = []
        for i, label in enumerate(labels):
            node = ns + f"{kind.lower()}/{i}"
            w.add(node, RDF_TYPE, iri(cls + kind))
            w.add(node, RDFS_LABEL, lit(label))
            nodes.append(node)
        return nodes

    genre_nodes = entities("Genre", genres)
    language_nodes = entities("Language", languages)
    country_nodes = entities("Country", countries)
    taken = set()
    producer_nodes = entities("Producer", [n + " Pictures" for n in pseudo_names(rng, 39, ["", "ex", "on"], taken)])
    actor_nodes = entities("Actor", pseudo_names(rng, 150, ["a", "o", "el", "is"], taken))

    titles = ["Avatar", "Avatar"] + pseudo_names(rng, 118, [" Rising", " Returns", "", " Nights", " Road"], taken)
    films = [ns + f"film/{1000 + i}" for i in range(len(titles))]
    for node, title in zip(films, titles):
        w.add(node, RDF_TYPE, iri(cls + "Film"))
        w.add(node, movie + "title", lit(title))
        w.add(node, movie + "genre", iri(rng.choice(genre_nodes)))
        w.add(node, movie + "language", iri(rng.choice(language_nodes)))
        w.add(node, movie + "country", iri(rng.choice(country_nodes)))
        for p in rng.sample(producer_nodes, rng.randint(1, 2)):
            w.add(node, movie + "producer", iri(p))
        for a in rng.sample(actor_nodes, rng.randint(25, 40)):
            w.add(node, movie + "actor", iri(a))
        w.add(node, movie + "runtime", lit(str(rng.randint(80, 180))))

    for i, node in enumerate(films):
        if rng.random() < 0.6:
            w.add(node, movie + "sequel", iri(films[(i + 1 + rng.randrange(len(films) - 1)) % len(films)]))

    w.save(os.path.join(ROOT, "linkedmdb", "linkedmdb.nt"),
           "# LinkedMDB-style fixture graph (synthetic). Generated by scripts/gen_fixtures.py.\n")


if __name__ == "__main__":
    biokg()
    linkedmdb()
