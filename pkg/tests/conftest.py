import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "data" / "fixtures"
CORPUS = REPO / "data" / "corpus" / "questions.jsonl"
GOLD = REPO / "data" / "gold"

RUNNING_EXAMPLE = (
    "Show me all images taken in January 2021 with rivers less than 2km away "
    "from towns and forests in the Emilia Romagna region, having cloud coverage "
    "less than 10%"
)


@pytest.fixture(scope="session")
def store():
    from geoask.kg import load_kg_dir

    return load_kg_dir(FIXTURES)


@pytest.fixture(scope="session")
def engine():
    from geoask.pipeline import build_engine

    return build_engine(FIXTURES)


@pytest.fixture(scope="session")
def materialized_relations(store):
    from geoask.materialize import materialize

    return materialize(store)


@pytest.fixture(scope="session")
def materialized_engine(tmp_path_factory, materialized_relations):
    from geoask.materialize import to_ntriples
    from geoask.pipeline import build_engine

    path = tmp_path_factory.mktemp("mat") / "materialized.nt"
    path.write_text(to_ntriples(materialized_relations), encoding="utf-8")
    return build_engine(FIXTURES, path)
