import pytest

from qtind.corpus import Collection, Document


def make_collection(docs: dict[int, str]) -> Collection:
    """Build a collection from {doc_id: space-separated terms}."""
    return Collection(
        Document(doc_id, tuple(text.split())) for doc_id, text in docs.items()
    )


@pytest.fixture
def two_doc_collection() -> Collection:
    return make_collection({0: "a b", 1: "a"})
