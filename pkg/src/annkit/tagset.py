"""Hierarchical POS tagset: loading, navigation, derivation, validation.

A tagset is a tree of category nodes at most three levels deep. Each node
carries a short uppercase label ("NN", "VF", ...). The tag actually written
into annotated data is the *convention string*: the labels on the path from
the top-level category down to the node, joined with double underscores,
e.g. ``V__VM__VF``. Labels are unique across the whole tree, so a bare leaf
label determines its full convention string; upper levels are filled in
automatically.

Tagsets are data, not code: they load from a plain-text definition file
(one line per category, ``depth<TAB>label<TAB>name<TAB>examples``) so that
sibling tagsets in the same standard family can be swapped in without any
code change. The default definition bundled with the package is the Magahi
tagset: 11 top-level categories with numeral classifiers (RP__CL) and
word-level verb finiteness (V__VM__{VF,VNF,VNP}).
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from enum import Enum

SEPARATOR = "__"
MAX_DEPTH = 3

DEFAULT_TAGSET_VERSION = "magahi-bis"


class TagsetFormatError(ValueError):
    """Malformed tagset definition (bad line, bad depth sequence, bad label)."""


class DuplicateLabel(TagsetFormatError):
    def __init__(self, label: str):
        super().__init__(f"duplicate label {label!r}")
        self.label = label


class DepthExceeded(TagsetFormatError):
    def __init__(self, depth: int):
        super().__init__(f"depth {depth} exceeds maximum of {MAX_DEPTH}")
        self.depth = depth


class EmptyTagset(TagsetFormatError):
    def __init__(self):
        super().__init__("tagset definition contains no categories")


class UnknownTag(LookupError):
    """A convention string that names no node in the tagset."""

    def __init__(self, convention: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"unknown tag {convention!r}{where}")
        self.convention = convention
        self.line = line


class UnknownLabel(LookupError):
    def __init__(self, label: str):
        super().__init__(f"unknown label {label!r}")
        self.label = label


class Provenance(str, Enum):
    """How a token came to carry its tag."""

    MANUAL = "manual"
    AUTO = "auto"
    SUGGESTED = "suggested"


@dataclass(eq=False)
class TagNode:
    """One category in the tagset tree.

    Nodes compare by identity; within a loaded tagset every label maps to
    exactly one node object.
    """

    label: str
    name: str
    examples: list[str] = field(default_factory=list)
    parent: TagNode | None = field(default=None, repr=False)
    children: list[TagNode] = field(default_factory=list, repr=False)

    @property
    def depth(self) -> int:
        """1 for a top-level category, up to MAX_DEPTH for the deepest."""
        d, node = 0, self
        while node.parent is not None:
            d += 1
            node = node.parent
        return d

    @property
    def convention(self) -> str:
        """Root-to-node labels joined with the double-underscore separator."""
        return SEPARATOR.join(n.label for n in self.path())

    def path(self) -> list[TagNode]:
        nodes: list[TagNode] = []
        node: TagNode | None = self
        while node is not None and node.parent is not None:
            nodes.append(node)
            node = node.parent
        return list(reversed(nodes))


@dataclass
class Tagset:
    """An immutable category tree plus label/convention lookup tables."""

    root: TagNode
    version: str = "unversioned"
    by_label: dict[str, TagNode] = field(default_factory=dict, repr=False)
    by_convention: dict[str, TagNode] = field(default_factory=dict, repr=False)

    @property
    def top_level(self) -> list[TagNode]:
        return list(self.root.children)

    def walk(self):
        """All nodes in definition order (preorder), root excluded."""
        stack = list(reversed(self.root.children))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def conventions(self) -> list[str]:
        return [node.convention for node in self.walk()]


@dataclass
class TagAssignment:
    """A concrete tag on a token: full convention plus bookkeeping."""

    convention: str
    leaf_label: str
    provenance: Provenance
    is_leaf: bool = True

    def to_dict(self) -> dict:
        return {
            "convention": self.convention,
            "leaf_label": self.leaf_label,
            "provenance": self.provenance.value,
            "is_leaf": self.is_leaf,
        }


@dataclass
class Finding:
    """One validation finding; findings are data, never raised."""

    severity: str  # "error" | "warning"
    code: str
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == "error"


def _parse_examples(text: str) -> list[str]:
    return [e.strip() for e in text.split(",") if e.strip()]


def load_tagset(definition: str, version: str = "unversioned") -> Tagset:
    """Build a Tagset from definition text.

    Lines are ``depth<TAB>label<TAB>name[<TAB>examples]`` with depth in
    1..3 and children listed immediately after their parent. Blank lines
    and ``#`` comments are skipped.
    """
    root = TagNode(label="", name="")
    by_label: dict[str, TagNode] = {}
    stack: list[TagNode] = [root]  # stack[d] = most recent node at depth d

    for lineno, raw in enumerate(definition.splitlines(), start=1):
        line = raw.rstrip()
        if not line or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (3, 4):
            raise TagsetFormatError(
                f"line {lineno}: expected 3 or 4 tab-separated fields, got {len(parts)}")
        try:
            depth = int(parts[0])
        except ValueError:
            raise TagsetFormatError(f"line {lineno}: depth {parts[0]!r} is not an integer")
        label = parts[1].strip()
        name = parts[2].strip()
        examples = _parse_examples(parts[3]) if len(parts) == 4 else []

        if depth > MAX_DEPTH:
            raise DepthExceeded(depth)
        if depth < 1 or depth > len(stack):
            raise TagsetFormatError(
                f"line {lineno}: depth {depth} has no parent at depth {depth - 1}")
        if not label or not (label.isascii() and label.isalpha() and label.isupper()):
            raise TagsetFormatError(
                f"line {lineno}: label {label!r} must be uppercase ASCII letters")
        if label in by_label:
            raise DuplicateLabel(label)

        parent = stack[depth - 1]
        node = TagNode(label=label, name=name, examples=examples, parent=parent)
        parent.children.append(node)
        by_label[label] = node
        del stack[depth:]
        stack.append(node)

    if not by_label:
        raise EmptyTagset()

    tagset = Tagset(root=root, version=version, by_label=by_label)
    tagset.by_convention = {node.convention: node for node in tagset.walk()}
    return tagset


def load_tagset_file(path, version: str | None = None) -> Tagset:
    from pathlib import Path

    p = Path(path)
    return load_tagset(p.read_text(encoding="utf-8"), version=version or p.stem)


def load_default_tagset() -> Tagset:
    """The bundled Magahi tagset."""
    text = (importlib.resources.files("annkit.data") / "magahi.tagset").read_text("utf-8")
    return load_tagset(text, version=DEFAULT_TAGSET_VERSION)


def parse_tag(convention: str, tagset: Tagset) -> TagNode:
    """Resolve a full convention string to its node.

    Raises UnknownTag for paths that do not exist, including paths whose
    segments all exist but not in a parent-child chain (e.g. "N__VF").
    """
    node = tagset.by_convention.get(convention)
    if node is None:
        raise UnknownTag(convention)
    return node


def derive_full_tag(leaf_label: str, tagset: Tagset) -> str:
    """Expand a bare label to its full convention string.

    Works for a node at any depth; the upper levels come for free because
    labels are globally unique within the tagset.
    """
    node = tagset.by_label.get(leaf_label)
    if node is None:
        raise UnknownLabel(leaf_label)
    return node.convention


def is_leaf(node: TagNode) -> bool:
    return not node.children


def list_children(node: TagNode) -> list[TagNode]:
    """Children in definition order (the order the standard prints them)."""
    return list(node.children)


def make_assignment(leaf_label: str, tagset: Tagset,
                    provenance: Provenance = Provenance.MANUAL) -> TagAssignment:
    """Build a TagAssignment from a bare label, deriving the upper levels."""
    convention = derive_full_tag(leaf_label, tagset)
    node = tagset.by_label[leaf_label]
    return TagAssignment(convention=convention, leaf_label=leaf_label,
                         provenance=provenance, is_leaf=is_leaf(node))


def assignment_from_convention(convention: str, tagset: Tagset,
                               provenance: Provenance) -> TagAssignment:
    node = parse_tag(convention, tagset)
    return TagAssignment(convention=convention, leaf_label=node.label,
                         provenance=provenance, is_leaf=is_leaf(node))


def validate_assignment(assignment: TagAssignment, tagset: Tagset,
                        strict: bool = True) -> list[Finding]:
    """Check one assignment against the tagset.

    Unparseable conventions are errors. In strict mode a tag that stops at
    a non-leaf category (say "V__VM" when level-2 subtypes exist) is
    flagged as a warning: the definition prints convention strings for
    non-leaf rows, but annotation is expected to bottom out.
    """
    findings: list[Finding] = []
    try:
        node = parse_tag(assignment.convention, tagset)
    except UnknownTag:
        findings.append(Finding("error", "UnknownTag",
                                f"tag {assignment.convention!r} is not in the tagset"))
        return findings
    if assignment.leaf_label != node.label:
        findings.append(Finding("error", "LeafLabelMismatch",
                                f"leaf label {assignment.leaf_label!r} does not match "
                                f"convention {assignment.convention!r}"))
    if strict and not is_leaf(node):
        findings.append(Finding("warning", "NonLeafTag",
                                f"tag {assignment.convention!r} has finer subtypes"))
    return findings
