"""Regenerate the bundled offline fixture corpus (deterministic).

    python scripts/build_fixture_corpus.py

Writes crossref/openalex/pubmed JSONL files of raw API-shaped records into
src/doctypeclf/data/fixtures/.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "doctypeclf" / "data" / "fixtures"
N_CROSSREF = 220
NR_SHARE = 0.25

PUBLISHERS = [("Elsevier BV", 0.5), ("Springer Science and Business Media LLC", 0.27),
              ("Wiley", 0.13), ("Small Press", 0.1)]
WORDS = ("analysis study effect clinical patients model data role response novel "
         "protein cell therapy outcomes review risk evidence network structure method").split()
RESEARCH_TYPES = [["Journal Article"], ["Journal Article"], ["Journal Article", "Review"],
                  ["Journal Article", "Randomized Controlled Trial"],
                  ["Journal Article", "Comparative Study"], ["Meta-Analysis", "Journal Article"]]
NR_TYPES = [["Editorial"], ["Letter"], ["Journal Article", "Case Reports"], ["Comment", "Letter"],
            ["News"], ["Published Erratum"], ["Journal Article", "Case Reports"]]


def pick_publisher(rng):
    r, acc = rng.random(), 0.0
    for name, w in PUBLISHERS:
        acc += w
        if r < acc:
            return name
    return PUBLISHERS[-1][0]


def title(rng, n):
    return " ".join(rng.choice(WORDS) for _ in range(n)).capitalize()


def crossref_item(rng, doi, nr, year, publisher):
    # noisy but learnable: non-research items are short, sparse, and thinly referenced
    noisy = rng.random() < 0.12
    short = nr != noisy
    item = {
        "DOI": doi,
        "type": "journal-article",
        "title": [title(rng, rng.randint(1, 6) if short else rng.randint(7, 18))],
        "publisher": publisher,
        "container-title": [f"Journal of {rng.choice(WORDS).capitalize()}"],
        "published": {"date-parts": [[year, rng.randint(1, 12)]]},
        "author": [{"given": "A", "family": f"Author{j}"}
                   for j in range(rng.randint(0, 2) if short else rng.randint(2, 9))],
        "is-referenced-by-count": rng.randint(0, 4) if short else rng.randint(0, 120),
        "reference-count": rng.randint(0, 4) if short else rng.randint(12, 70),
        "issue": str(rng.randint(1, 12)),
    }
    first = rng.randint(1, 900)
    if short:
        if rng.random() < 0.5:
            item["page"] = str(first) if rng.random() < 0.5 else f"{first}-{first + 1}"
    else:
        item["page"] = f"{first}-{first + rng.randint(5, 20)}"
    if rng.random() < (0.15 if short else 0.9):
        item["abstract"] = "<jats:p>" + title(rng, 30) + "</jats:p>"
    if rng.random() < (0.3 if short else 0.75):
        item["license"] = [{"URL": "http://creativecommons.org/licenses/by/4.0/"}]
    if rng.random() < (0.05 if short else 0.5):
        item["funder"] = [{"name": "Some Foundation"}]
    return item, short


def openalex_item(rng, doi, year, short):
    n_auth = rng.randint(0, 1) if short else rng.randint(1, 5)
    authorships = []
    for _ in range(n_auth):
        insts = [{"id": f"https://openalex.org/I{rng.randint(1, 40)}"}
                 for _ in range(rng.randint(0, 1) if short else rng.randint(1, 2))]
        authorships.append({"institutions": insts})
    oa = rng.random() < (0.3 if short else 0.6)
    return {
        "id": f"https://openalex.org/W{rng.randint(10**9, 10**10)}",
        "doi": f"https://doi.org/{doi}",
        "type": "article",
        "publication_year": year,
        "authorships": authorships,
        "open_access": {"is_oa": oa, "oa_url": f"https://example.org/{doi}" if oa else None},
        "primary_location": {"source": {"type": "journal"}},
    }


def main():
    rng = random.Random(20250206)
    crossref, openalex, pubmed = [], [], []

    # hand-built anchor records
    crossref.append({
        "DOI": "10.5555/FX.FULL", "type": "journal-article",
        "title": ["A Study of Classifiers for Metadata"], "abstract": "<jats:p>x</jats:p>",
        "page": "10-19", "author": [{"family": "A"}, {"family": "B"}, {"family": "C"}],
        "license": [{"URL": "http://creativecommons.org/licenses/by/4.0/"}],
        "is-referenced-by-count": 5, "reference-count": 12, "funder": [{"name": "DFG"}],
        "issue": "4", "publisher": "Elsevier BV", "container-title": ["Fixture Journal"],
        "published": {"date-parts": [[2019, 3, 1]]}, "extra-unknown-field": {"ignored": True},
    })
    openalex.append({
        "id": "https://openalex.org/W1", "doi": "https://doi.org/10.5555/fx.full",
        "type": "article", "publication_year": 2019,
        "authorships": [{"institutions": [{"id": "https://openalex.org/I1"}]},
                        {"institutions": [{"id": "https://openalex.org/I1"},
                                          {"id": "https://openalex.org/I2"}]}],
        "open_access": {"is_oa": True, "oa_url": "https://example.org/full.pdf"},
        "primary_location": {"source": {"type": "journal"}},
    })
    pubmed.append({"pmid": "90000001", "doi": "10.5555/fx.full",
                   "publication_types": ["Journal Article"]})
    crossref.append({"DOI": "10.5555/fx.bare", "type": "journal-article", "publisher": "Small Press",
                     "published": {"date-parts": [[2016]]}})
    pubmed.append({"pmid": "90000002", "doi": "10.5555/fx.bare", "publication_types": ["Editorial"]})

    for i in range(N_CROSSREF - 2):
        doi = f"10.5555/fx.{i:04d}"
        nr = rng.random() < NR_SHARE
        year = rng.randint(2014, 2023)
        item, short = crossref_item(rng, doi.upper() if i % 17 == 0 else doi, nr, year,
                                    pick_publisher(rng))
        if i % 23 == 5:
            item["issue"] = rng.choice(["Suppl 1", "Meeting Abstracts", "Suppl. 2"])
        crossref.append(item)
        if i % 11 != 3:
            openalex.append(openalex_item(rng, doi, year, short))
        if i % 9 == 4:
            continue  # no PubMed counterpart
        types = rng.choice(NR_TYPES if nr else RESEARCH_TYPES)
        if i % 61 == 7:
            types = ["Weird New Type"]
        pubmed.append({"pmid": str(30000000 + i), "doi": doi, "publication_types": list(types)})

    for j in range(8):
        openalex.append(openalex_item(rng, f"10.5555/oa-only.{j}", 2020, False))
    openalex.append({**openalex_item(rng, "10.5555/nodoi", 2020, False), "doi": None})
    for j in range(5):
        pubmed.append({"pmid": str(40000000 + j), "doi": f"10.5555/pm-only.{j}",
                       "publication_types": ["Journal Article"]})
    for j in range(3):
        pubmed.append({"pmid": str(50000000 + j), "doi": None, "publication_types": ["Letter"]})

    OUT.mkdir(parents=True, exist_ok=True)
    for name, rows in (("crossref", crossref), ("openalex", openalex), ("pubmed", pubmed)):
        with (OUT / f"{name}.jsonl").open("w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
        print(name, len(rows))


if __name__ == "__main__":
    main()
