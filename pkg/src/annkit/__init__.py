"""Corpus annotation toolkit for hierarchical POS tagging.

Pieces: a data-driven hierarchical tagset with automatic upper-level tag
derivation, a corpus store with unique sentence IDs and a three-way
subcorpus taxonomy, typed metadata catalogs, a lexicon-based autotagger,
TSV/XML serialization, and an HTTP annotation service with document
claiming.
"""

from .autotag import (
    AutotagLexicon,
    AutotagPolicy,
    PolicyMode,
    autotag_document,
    autotag_sentence,
    build_lexicon,
    confirm_suggestion,
    dump_lexicon,
    load_lexicon,
    suggest,
)
from .corpus import (
    CorpusStats,
    CorpusStore,
    Document,
    Mode,
    Sentence,
    SentenceStatus,
    SubcorpusPath,
    Token,
    tokenize,
)
from .metadata import (
    MetadataStore,
    build_general_meta,
    create_record,
    validate_catalog,
)
from .serialization import (
    export_tsv,
    export_xml,
    import_legacy_csv,
    import_tsv,
    load_corpus,
    save_corpus,
    validate_corpus_xml,
)
from .tagset import (
    Provenance,
    TagAssignment,
    TagNode,
    Tagset,
    derive_full_tag,
    is_leaf,
    list_children,
    load_default_tagset,
    load_tagset,
    load_tagset_file,
    parse_tag,
    validate_assignment,
)

__version__ = "0.1.0"
