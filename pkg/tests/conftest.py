import json
import pathlib

import pytest

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def corpus_manifest():
    return json.loads((CORPUS / "manifest.json").read_text())


@pytest.fixture(scope="session")
def corpus_docs(corpus_manifest):
    return {e["file"]: json.loads((CORPUS / e["file"]).read_text())
            for e in corpus_manifest}


def load_corpus_measure(name):
    from sobolevcurves import parse_measure
    return parse_measure(json.loads((CORPUS / f"{name}.json").read_text()))
