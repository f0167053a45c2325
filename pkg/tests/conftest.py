import numpy as np
import pytest

from doctypeclf.featurize import FeatureVector
from doctypeclf.harvest.fixture_server import FixtureServer
from doctypeclf.label import LabeledExample
from doctypeclf.records import Label

ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def fixture_server():
    with FixtureServer() as srv:
        yield srv


@pytest.fixture
def api_env(fixture_server, monkeypatch):
    monkeypatch.setenv("CONTACT_MAILTO", "tests@example.org")
    for src, env in (("crossref", "CROSSREF_BASE_URL"), ("openalex", "OPENALEX_BASE_URL"),
                     ("pubmed", "PUBMED_BASE_URL")):
        monkeypatch.setenv(env, fixture_server.url(src))
    return fixture_server


def make_fv(values):
    """FeatureVector from ten numbers in f1..f10 order."""
    v = [int(x) for x in values]
    return FeatureVector(bool(v[0]), v[1], v[2], v[3], bool(v[4]), v[5], v[6], bool(v[7]), v[8],
                         bool(v[9]))


def make_examples(X, y, prefix="k", publisher="P"):
    return [LabeledExample(f"{prefix}{i:06d}", make_fv(x), Label.from_int(int(t)), publisher, 2020)
            for i, (x, t) in enumerate(zip(X, y))]


def random_examples(n, prevalence, seed, publisher="P"):
    """Synthetic corpus: research share ``prevalence``, weakly informative features."""
    rng = np.random.default_rng(seed)
    n_res = int(round(n * prevalence))
    y = np.array([0] * n_res + [1] * (n - n_res))
    X = rng.integers(0, 20, size=(n, 10))
    X[:, [0, 4, 7, 9]] %= 2
    return make_examples(X, y, prefix=f"s{seed}-", publisher=publisher)


def run_cli(*argv):
    from doctypeclf.cli import main
    return main([str(a) for a in argv])


@pytest.fixture
def pipeline(api_env, tmp_path):
    """Run harvest -> merge -> featurize -> label -> split into ``tmp_path``; returns paths."""

    def run(workdir=None, seed=42):
        d = workdir or tmp_path
        d.mkdir(parents=True, exist_ok=True)
        p = {name: d / f"{name}.jsonl" for name in
             ("crossref", "openalex", "pubmed", "merged", "features", "labels", "splits")}
        for source in ("crossref", "openalex", "pubmed"):
            assert run_cli("harvest", "--source", source, "--rps", "1000", "--out", p[source]) == 0
        assert run_cli("merge", "--crossref", p["crossref"], "--openalex", p["openalex"],
                       "--pubmed", p["pubmed"], "--out", p["merged"]) == 0
        assert run_cli("featurize", "--merged", p["merged"], "--out", p["features"]) == 0
        assert run_cli("label", "--merged", p["merged"], "--out", p["labels"]) == 0
        assert run_cli("split", "--features", p["features"], "--labels", p["labels"], "--merged",
                       p["merged"], "--ratios", "0.8,0.1,0.1", "--seed", seed,
                       "--min-publisher-works", "0", "--out", p["splits"]) == 0
        p["dir"] = d
        return p

    return run
