import random

import pytest

from annkit.corpus import CorpusStore, Document, Sentence, SubcorpusPath, Token
from annkit.tagset import Provenance, load_default_tagset, make_assignment


@pytest.fixture(scope="session")
def tagset():
    return load_default_tagset()


@pytest.fixture
def store(tagset):
    return CorpusStore(tagset)


SURFACE_CHARS = "abcdefghijklmnopqrstuvwxyzəʰãɽʈ"
PUNCT_SURFACES = ["!", "?", ",", "।", "॥", "...", "?!"]
SUBCORPORA = [
    SubcorpusPath.indirect("book", "prose"),
    SubcorpusPath.indirect("magazine", "poetry"),
    SubcorpusPath.direct("cmc_asynchronous"),
    SubcorpusPath.direct("non_cmc_personal"),
    SubcorpusPath.spoken("personal"),
    SubcorpusPath.spoken("public"),
]


def random_surface(rng: random.Random) -> str:
    if rng.random() < 0.15:
        return rng.choice(PUNCT_SURFACES)
    return "".join(rng.choice(SURFACE_CHARS) for _ in range(rng.randint(1, 7)))


def random_sentence(rng: random.Random, sid: str, tagset, forms=None) -> Sentence:
    n_tokens = rng.randint(1, 10)
    labels = [n.label for n in tagset.walk()]
    text = " " * rng.randint(0, 2)
    tokens = []
    for i in range(n_tokens):
        if i > 0:
            text += " " * rng.randint(1, 3)
        surface = rng.choice(forms) if forms else random_surface(rng)
        start = len(text)
        text += surface
        tok = Token(surface=surface, span=(start, len(text)))
        roll = rng.random()
        if roll < 0.45:
            prov = rng.choice([Provenance.MANUAL, Provenance.AUTO, Provenance.SUGGESTED])
            tok.tag = make_assignment(rng.choice(labels), tagset, prov)
        tokens.append(tok)
    text += " " * rng.randint(0, 2)
    return Sentence(id=sid, text=text, tokens=tokens)


def random_document(rng: random.Random, doc_id: str, tagset,
                    max_sentences: int = 6, forms=None) -> Document:
    doc = Document(doc_id=doc_id, subcorpus=rng.choice(SUBCORPORA))
    if rng.random() < 0.3:
        doc.metadata_ref = f"rec-{rng.randint(1, 99)}"
    for i in range(rng.randint(1, max_sentences)):
        doc.sentences.append(random_sentence(rng, f"{doc_id}.{i + 1:04d}", tagset, forms))
    return doc


def docs_equal(a: Document, b: Document) -> bool:
    """Equality on the fields serialization must preserve."""
    if (a.doc_id, str(a.subcorpus), a.metadata_ref) != (b.doc_id, str(b.subcorpus), b.metadata_ref):
        return False
    if len(a.sentences) != len(b.sentences):
        return False
    for sa, sb in zip(a.sentences, b.sentences):
        if (sa.id, sa.text) != (sb.id, sb.text):
            return False
        if sa.tokens != sb.tokens:
            return False
    return True
