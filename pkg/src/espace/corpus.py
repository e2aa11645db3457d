"""Document corpus model and loaders.

A corpus is a set of documents, each made of ordered paragraphs of plain
text plus a dependency-annotated CoNLL-U file covering the same text.
Everything downstream (graph extraction, taxonomy, overview generation)
consumes the normalized model built here. Dependency annotations are an
input, never produced internally: the corpus stays deterministic given
identical bytes.

The corpus is immutable after loading and safe to share across threads.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ParseError, ValidationError

_BLANK_SPLIT = re.compile(r"\n\s*\n")


@dataclass(frozen=True)
class Token:
    """One token of a dependency-parsed sentence.

    ``index`` is 1-based within the sentence, ``head`` is the index of the
    governing token (0 for the root). ``space_after`` mirrors the CoNLL-U
    ``SpaceAfter=No`` MISC flag and drives detokenization.
    """

    index: int
    surface: str
    lemma: str
    pos: str
    head: int
    deprel: str
    space_after: bool = True


@dataclass
class Sentence:
    tokens: list[Token]
    sentence_id: str
    paragraph_ref: str
    char_span: tuple[int, int] = (0, 0)

    def text(self) -> str:
        return detokenize(self.tokens)

    def root(self) -> Token:
        return next(t for t in self.tokens if t.head == 0)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def children(self, index: int) -> list[Token]:
        return [t for t in self.tokens if t.head == index]


@dataclass
class Paragraph:
    paragraph_id: str
    text: str
    document_ref: str
    order: int


@dataclass
class Document:
    document_id: str
    title: str
    url: str | None
    paragraphs: list[Paragraph]
    sentences: list[Sentence]


@dataclass
class Corpus:
    documents: list[Document]
    meta: dict = field(default_factory=dict)

    def paragraphs(self):
        for doc in self.documents:
            yield from doc.paragraphs

    def sentences(self):
        for doc in self.documents:
            yield from doc.sentences

    def paragraph_by_id(self, paragraph_id: str) -> Paragraph:
        for par in self.paragraphs():
            if par.paragraph_id == paragraph_id:
                return par
        raise KeyError(paragraph_id)


def detokenize(tokens) -> str:
    """Rebuild surface text, honoring SpaceAfter=No."""
    parts = []
    for i, tok in enumerate(tokens):
        parts.append(tok.surface)
        if tok.space_after and i + 1 < len(tokens):
            parts.append(" ")
    return "".join(parts)


def parse_conllu(stream, doc_id: str = "d0") -> list[Sentence]:
    """Parse a CoNLL-U byte stream into sentences.

    Accepts bytes, text, or a file-like object. Sentence blocks are
    separated by blank lines; token lines carry ten tab-separated columns.
    Multiword-token ranges (``i-j`` ids) and empty nodes (``i.j``) are
    skipped. ``# sent_id`` and ``# newpar id`` comments populate
    sentence_id and paragraph_ref; missing ids are synthesized as
    ``<doc>_p<par>`` / ``<par>_s<idx>`` so parsing stays deterministic.

    Raises ParseError for malformed lines and ValidationError when a head
    graph is not a single-rooted tree.
    """
    if hasattr(stream, "read"):
        data = stream.read()
    else:
        data = stream
    if isinstance(data, bytes):
        data = data.decode("utf-8")

    sentences: list[Sentence] = []
    par_ref = f"{doc_id}_p0"
    par_count = 0
    sent_in_par = 0

    block: list[tuple[int, str]] = []  # (line number, line)

    def flush(block):
        nonlocal par_ref, par_count, sent_in_par
        if not block:
            return
        sent_id = None
        new_par = None
        rows = []
        for lineno, line in block:
            if line.startswith("#"):
                comment = line[1:].strip()
                if comment.startswith("sent_id"):
                    sent_id = comment.split("=", 1)[1].strip() if "=" in comment else None
                elif comment.startswith("newpar"):
                    if "=" in comment:
                        new_par = comment.split("=", 1)[1].strip()
                    else:
                        new_par = f"{doc_id}_p{par_count + 1}"
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise ParseError(f"expected 10 columns, got {len(cols)}", line=lineno)
            rows.append((lineno, cols))
        if new_par is not None:
            par_ref = new_par
            par_count += 1
            sent_in_par = 0
        tokens = []
        for lineno, cols in rows:
            tid = cols[0]
            if "-" in tid or "." in tid:
                continue  # multiword range / empty node
            try:
                index = int(tid)
            except ValueError:
                raise ParseError(f"non-integer token id {tid!r}", line=lineno) from None
            try:
                head = int(cols[6])
            except ValueError:
                raise ParseError(f"non-integer head {cols[6]!r}", line=lineno) from None
            surface = cols[1]
            lemma = cols[2]
            if lemma == "_" or not lemma:
                lemma = surface.lower()
            tokens.append(
                Token(
                    index=index,
                    surface=surface,
                    lemma=lemma,
                    pos=cols[3],
                    head=head,
                    deprel=cols[7],
                    space_after="SpaceAfter=No" not in cols[9],
                )
            )
        if not tokens:
            return
        if sent_id is None:
            sent_id = f"{par_ref}_s{sent_in_par}"
        sent_in_par += 1
        sentence = Sentence(tokens=tokens, sentence_id=sent_id, paragraph_ref=par_ref)
        _validate_tree(sentence)
        sentences.append(sentence)

    lineno = 0
    for lineno, raw in enumerate(data.split("\n"), start=1):
        line = raw.rstrip("\r")
        if line.strip() == "":
            flush(block)
            block = []
        else:
            block.append((lineno, line))
    flush(block)
    return sentences


def _validate_tree(sentence: Sentence) -> None:
    n = len(sentence.tokens)
    ids = [t.index for t in sentence.tokens]
    if ids != list(range(1, n + 1)):
        raise ValidationError(
            f"sentence {sentence.sentence_id}: token indices not contiguous 1..{n}"
        )
    roots = [t for t in sentence.tokens if t.head == 0]
    for tok in sentence.tokens:
        if tok.head < 0 or tok.head > n:
            raise ValidationError(
                f"sentence {sentence.sentence_id}: head {tok.head} out of range"
            )
    if len(roots) != 1:
        raise ValidationError(
            f"sentence {sentence.sentence_id}: expected exactly one root, got {len(roots)}"
        )
    # Cycle check: every token must reach the root by following heads.
    for tok in sentence.tokens:
        seen = set()
        cur = tok.index
        while cur != 0:
            if cur in seen:
                raise ValidationError(
                    f"sentence {sentence.sentence_id}: cyclic head graph at token {cur}"
                )
            seen.add(cur)
            cur = sentence.token(cur).head


def sentence_to_conllu(sentence: Sentence) -> str:
    """Serialize one sentence back to CoNLL-U (round-trips with parse_conllu)."""
    lines = [
        f"# sent_id = {sentence.sentence_id}",
        f"# newpar id = {sentence.paragraph_ref}",
    ]
    for tok in sentence.tokens:
        misc = "_" if tok.space_after else "SpaceAfter=No"
        lines.append(
            "\t".join(
                [
                    str(tok.index),
                    tok.surface,
                    tok.lemma,
                    tok.pos,
                    "_",
                    "_",
                    str(tok.head),
                    tok.deprel,
                    "_",
                    misc,
                ]
            )
        )
    return "\n".join(lines) + "\n"


def load_corpus(manifest_path) -> Corpus:
    """Load a corpus from a JSON manifest.

    The manifest lists documents as ``{id, title, url?, text_file,
    conllu_file}``; file paths are resolved relative to the manifest.
    Paragraphs are blank-line-separated blocks of the text file and get
    ids ``<doc>_p<k>``. Every sentence must resolve to a paragraph and
    its detokenized text must occur inside that paragraph (the located
    offsets become the sentence's char_span).
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise FileNotFoundError(f"manifest not found: {manifest_path}")
    base = manifest_path.parent
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    documents = []
    input_hashes = {}
    seen_ids = set()
    for entry in manifest.get("documents", []):
        doc_id = entry["id"]
        if doc_id in seen_ids:
            raise ValidationError(f"duplicate document id {doc_id!r}")
        seen_ids.add(doc_id)
        text_path = base / entry["text_file"]
        conllu_path = base / entry["conllu_file"]
        for path in (text_path, conllu_path):
            if not path.exists():
                raise FileNotFoundError(f"missing corpus file: {path}")
        text = text_path.read_text(encoding="utf-8")
        conllu_bytes = conllu_path.read_bytes()
        input_hashes[doc_id] = hashlib.sha256(
            text.encode("utf-8") + conllu_bytes
        ).hexdigest()

        paragraphs = []
        for order, chunk in enumerate(
            p.strip() for p in _BLANK_SPLIT.split(text) if p.strip()
        ):
            paragraphs.append(
                Paragraph(
                    paragraph_id=f"{doc_id}_p{order}",
                    text=chunk,
                    document_ref=doc_id,
                    order=order,
                )
            )
        par_index = {p.paragraph_id: p for p in paragraphs}

        sentences = parse_conllu(conllu_bytes, doc_id=doc_id)
        cursor: dict[str, int] = {}
        located = []
        for sent in sentences:
            par = par_index.get(sent.paragraph_ref)
            if par is None:
                raise ValidationError(
                    f"sentence {sent.sentence_id}: paragraph_ref "
                    f"{sent.paragraph_ref!r} does not resolve in {doc_id!r}"
                )
            start = par.text.find(sent.text(), cursor.get(par.paragraph_id, 0))
            if start < 0:
                raise ValidationError(
                    f"sentence {sent.sentence_id}: text not found in paragraph "
                    f"{par.paragraph_id} (annotation/paragraph mismatch)"
                )
            end = start + len(sent.text())
            cursor[par.paragraph_id] = end
            located.append(replace(sent, char_span=(start, end)))

        documents.append(
            Document(
                document_id=doc_id,
                title=entry.get("title", doc_id),
                url=entry.get("url"),
                paragraphs=paragraphs,
                sentences=located,
            )
        )
    meta = {
        "manifest": str(manifest_path),
        "input_hashes": dict(sorted(input_hashes.items())),
    }
    return Corpus(documents=documents, meta=meta)
