"""Email corpus ingestion: mbox streams, single eml files, label directories, CSV.

Parsing is deliberately lossless at the byte level: a RawEmail keeps the
verbatim body bytes next to the MIME-split view, so messages round-trip
through :func:`serialize_mbox` exactly.  All text decoding (transfer
encodings, charsets, HTML stripping) happens later in :func:`extract_text`.
"""

from __future__ import annotations

import base64
import binascii
import csv
import logging
import quopri
import re
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import text as text_mod
from .errors import (
    EmptyCorpusError,
    IoError,
    MalformedMboxError,
    MalformedMimeError,
    ParseWarning,
    SchemaError,
)

log = logging.getLogger(__name__)

# Gmail bookkeeping labels dropped before choosing a document's label.
SYSTEM_LABELS = frozenset(
    name.lower() for name in ("Inbox", "Sent", "Unread", "Starred", "Important", "Archived")
)

_MBOXRD_UNESCAPE = re.compile(rb"^>(>*From )")
_MBOXRD_ESCAPE = re.compile(rb"^(>*From )")
_TAG_RE = re.compile(r"<[^>]*>")


@dataclass(frozen=True)
class BodyPart:
    content_type: str
    transfer_encoding: str
    charset: str
    raw_bytes: bytes


@dataclass(frozen=True)
class RawEmail:
    """One parsed message: unfolded headers, verbatim body, MIME part view."""

    headers: tuple[tuple[str, str], ...]
    body: bytes
    body_parts: tuple[BodyPart, ...]

    def header(self, name: str) -> str | None:
        """First header value matching name, case-insensitively."""
        wanted = name.lower()
        for key, value in self.headers:
            if key.lower() == wanted:
                return value
        return None


@dataclass(frozen=True)
class EmailDocument:
    id: str
    text: str
    label: str


@dataclass(frozen=True)
class LabeledCorpus:
    documents: tuple[EmailDocument, ...]
    labels: tuple[str, ...]

    @classmethod
    def from_documents(cls, documents: Iterable[EmailDocument]) -> "LabeledCorpus":
        docs = tuple(documents)
        if not docs:
            raise EmptyCorpusError("corpus has no documents")
        return cls(documents=docs, labels=tuple(sorted({d.label for d in docs})))

    def label_counts(self) -> dict[str, int]:
        return dict(Counter(d.label for d in self.documents))

    def __len__(self) -> int:
        return len(self.documents)


@dataclass(frozen=True)
class LabelStats:
    per_label_email_count: dict[str, int]
    per_label_word_count: dict[str, int]
    total_emails: int
    total_words: int


# ---------------------------------------------------------------------------
# Low-level message parsing
# ---------------------------------------------------------------------------


def _split_lines(data: bytes) -> list[bytes]:
    return data.splitlines(keepends=True)


def _strip_newline(line: bytes) -> bytes:
    if line.endswith(b"\r\n"):
        return line[:-2]
    if line.endswith(b"\n"):
        return line[:-1]
    return line


def _parse_headers(lines: list[bytes]) -> tuple[list[tuple[str, str]], int, bool]:
    """Consume header lines until the first blank line.

    Returns (headers, index of the first body line, separator_found).
    Folded continuation lines (leading whitespace) are appended to the
    previous value with the line break removed, per RFC 5322 unfolding.
    """
    headers: list[tuple[str, str]] = []
    i = 0
    while i < len(lines):
        stripped = _strip_newline(lines[i])
        if stripped == b"":
            return headers, i + 1, True
        decoded = stripped.decode("utf-8", errors="replace")
        if decoded[:1] in (" ", "\t"):
            if headers:
                name, value = headers[-1]
                headers[-1] = (name, value + decoded)
            else:
                warnings.warn("continuation line before any header; ignored", ParseWarning)
        elif ":" in decoded:
            name, _, value = decoded.partition(":")
            headers.append((name.strip(), value.strip()))
        else:
            warnings.warn(f"header line without colon ignored: {decoded[:40]!r}", ParseWarning)
        i += 1
    return headers, len(lines), False  # no separator: headers-only message


def _parse_param_header(value: str) -> tuple[str, dict[str, str]]:
    """Split 'type/subtype; key=value; ...' into the type and its params."""
    pieces = value.split(";")
    main = pieces[0].strip().lower()
    params: dict[str, str] = {}
    for piece in pieces[1:]:
        if "=" not in piece:
            continue
        key, _, val = piece.partition("=")
        val = val.strip()
        if len(val) >= 2 and val[0] == '"' and val[-1] == '"':
            val = val[1:-1]
        params[key.strip().lower()] = val
    return main, params


def _header_value(headers: Sequence[tuple[str, str]], name: str, default: str = "") -> str:
    wanted = name.lower()
    for key, value in headers:
        if key.lower() == wanted:
            return value
    return default


def _split_mime(headers: Sequence[tuple[str, str]], body: bytes, depth: int = 0) -> list[BodyPart]:
    """Produce the flat list of leaf body parts for a message body."""
    ctype_raw = _header_value(headers, "Content-Type", "text/plain")
    ctype, params = _parse_param_header(ctype_raw)
    encoding = _header_value(headers, "Content-Transfer-Encoding", "7bit").strip().lower()
    charset = params.get("charset", "us-ascii")

    if not ctype.startswith("multipart/"):
        if not body:
            return []
        return [BodyPart(ctype, encoding, charset, body)]

    boundary = params.get("boundary")
    if not boundary:
        raise MalformedMimeError("multipart message without a boundary parameter")
    if depth >= 16:
        warnings.warn("MIME nesting deeper than 16 levels; treating as opaque", ParseWarning)
        return [BodyPart(ctype, encoding, charset, body)]

    delimiter = b"--" + boundary.encode("utf-8", errors="replace")
    closing = delimiter + b"--"
    parts: list[BodyPart] = []
    current: list[bytes] | None = None
    for line in _split_lines(body):
        marker = _strip_newline(line).rstrip(b" \t")
        if marker == delimiter or marker == closing:
            if current is not None:
                parts.extend(_parse_part(b"".join(current), depth))
            if marker == closing:
                current = None
                break
            current = []
        elif current is not None:
            current.append(line)
    if current is not None:  # no closing delimiter; accept what we have
        parts.extend(_parse_part(b"".join(current), depth))
        warnings.warn("multipart body missing closing boundary", ParseWarning)
    return parts


def _parse_part(raw: bytes, depth: int) -> list[BodyPart]:
    # The newline preceding the next boundary belongs to the delimiter.
    if raw.endswith(b"\r\n"):
        raw = raw[:-2]
    elif raw.endswith(b"\n"):
        raw = raw[:-1]
    lines = _split_lines(raw)
    headers, body_start, _ = _parse_headers(lines)
    content = b"".join(lines[body_start:])
    return _split_mime(headers, content, depth + 1)


def _build_raw_email(message_lines: list[bytes], strip_terminator: bool) -> RawEmail:
    headers, body_start, separated = _parse_headers(message_lines)
    body = b"".join(message_lines[body_start:])
    if not separated and message_lines:
        warnings.warn("message has no header/body separator; treating as headers-only", ParseWarning)
    if strip_terminator:
        if body.endswith(b"\r\n"):
            body = body[:-2]
        elif body.endswith(b"\n"):
            body = body[:-1]
    parts = _split_mime(headers, body)
    return RawEmail(headers=tuple(headers), body=body, body_parts=tuple(parts))


# ---------------------------------------------------------------------------
# Public parsing operations
# ---------------------------------------------------------------------------


def parse_mbox(data: bytes) -> list[RawEmail]:
    """Parse an mboxrd byte stream into RawEmails, in file order.

    Messages are delimited by lines starting with "From " at column 0;
    ">From " quoting is removed (one '>' stripped from every ^>+From line).
    The newline terminating a message body is treated as the message
    terminator, not body content, so serialize/re-parse round-trips.
    """
    if not data:
        return []
    lines = _split_lines(data)
    if not lines[0].startswith(b"From "):
        raise MalformedMboxError("mbox stream does not start with a 'From ' line")
    messages: list[list[bytes]] = []
    current: list[bytes] = []
    for line in lines:
        if line.startswith(b"From "):
            if current:
                messages.append(current)
            current = []
            continue  # envelope line itself is not message content
        current.append(_MBOXRD_UNESCAPE.sub(rb"\1", line))
    messages.append(current)
    return [_build_raw_email(msg, strip_terminator=True) for msg in messages]


def serialize_mbox(emails: Iterable[RawEmail]) -> bytes:
    """Inverse of parse_mbox (modulo the synthetic envelope line)."""
    chunks: list[bytes] = []
    for mail in emails:
        chunks.append(b"From mailcat@localhost\n")
        for name, value in mail.headers:
            chunks.append(f"{name}: {value}\n".encode("utf-8"))
        chunks.append(b"\n")
        body_lines = mail.body.split(b"\n")
        escaped = b"\n".join(_MBOXRD_ESCAPE.sub(rb">\1", line) for line in body_lines)
        chunks.append(escaped)
        chunks.append(b"\n")
    return b"".join(chunks)


def parse_eml(data: bytes) -> RawEmail:
    """Parse a single RFC 5322 message (headers, MIME body parts)."""
    return _build_raw_email(_split_lines(data), strip_terminator=False)


_CHARSET_ALIASES = {
    "utf-8": "utf-8",
    "utf8": "utf-8",
    "us-ascii": "ascii",
    "ascii": "ascii",
    "iso-8859-1": "iso-8859-1",
    "iso8859-1": "iso-8859-1",
    "latin-1": "iso-8859-1",
    "latin1": "iso-8859-1",
}

_ENTITIES = (("&lt;", "<"), ("&gt;", ">"), ("&quot;", '"'), ("&nbsp;", " "), ("&amp;", "&"))


def _decode_transfer(part: BodyPart) -> bytes:
    data = part.raw_bytes
    encoding = part.transfer_encoding
    if encoding == "base64":
        try:
            return base64.b64decode(re.sub(rb"\s", b"", data) + b"===")
        except (binascii.Error, ValueError):
            warnings.warn("undecodable base64 part; using raw bytes", ParseWarning)
            return data
    if encoding == "quoted-printable":
        return quopri.decodestring(data)
    return data


def _decode_charset(data: bytes, charset: str) -> str:
    codec = _CHARSET_ALIASES.get(charset.strip().lower())
    if codec is None:
        warnings.warn(f"unsupported charset {charset!r}; falling back to iso-8859-1", ParseWarning)
        codec = "iso-8859-1"
    return data.decode(codec, errors="replace")


def _strip_html(html: str) -> str:
    out = _TAG_RE.sub("", html)
    for entity, char in _ENTITIES:
        out = out.replace(entity, char)
    return out


def extract_text(mail: RawEmail) -> str:
    """Subject plus decoded body text, joined by a single space.

    The body is the first text/plain part if any, else the first text/html
    part with tags stripped and the five common entities decoded, else
    empty.  Transfer encodings are decoded; undecodable bytes become
    U+FFFD.  The result is stripped of leading/trailing whitespace.
    """
    subject = (mail.header("Subject") or "").strip()
    body_part = None
    for part in mail.body_parts:
        if part.content_type == "text/plain":
            body_part = part
            break
    html = body_part is None
    if html:
        for part in mail.body_parts:
            if part.content_type == "text/html":
                body_part = part
                break
    body = ""
    if body_part is not None:
        body = _decode_charset(_decode_transfer(body_part), body_part.charset)
        if html:
            body = _strip_html(body)
    combined = f"{subject} {body}" if subject and body else (subject or body)
    return combined.strip()


# ---------------------------------------------------------------------------
# Corpus loading
# ---------------------------------------------------------------------------


def _choose_gmail_label(raw_value: str) -> str | None:
    labels = [piece.strip() for piece in raw_value.split(",") if piece.strip()]
    kept = [lbl for lbl in labels if lbl.lower() not in SYSTEM_LABELS]
    return min(kept) if kept else None


def _load_mbox_corpus(path: Path) -> list[EmailDocument]:
    emails = parse_mbox(path.read_bytes())
    docs: list[EmailDocument] = []
    skipped = 0
    for i, mail in enumerate(emails):
        label = _choose_gmail_label(mail.header("X-Gmail-Labels") or "")
        if label is None:
            skipped += 1
            continue
        docs.append(EmailDocument(id=f"mbox:{i}", text=extract_text(mail), label=label))
    if skipped:
        log.info("skipped %d mbox message(s) with no usable label", skipped)
    return docs


def _load_dir_corpus(root: Path) -> list[EmailDocument]:
    docs: list[EmailDocument] = []
    # Sorted traversal keeps the corpus independent of filesystem order.
    for label_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        label = label_dir.name
        for file in sorted(p for p in label_dir.iterdir() if p.is_file()):
            if file.suffix.lower() == ".eml":
                body_text = extract_text(parse_eml(file.read_bytes()))
            elif file.suffix.lower() == ".txt":
                body_text = file.read_bytes().decode("utf-8", errors="replace").strip()
            else:
                continue
            docs.append(EmailDocument(id=f"{label}/{file.name}", text=body_text, label=label))
    return docs


def _load_csv_corpus(path: Path) -> list[EmailDocument]:
    docs: list[EmailDocument] = []
    skipped = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if "text" not in fields or "label" not in fields:
            raise SchemaError(f"CSV must have 'text' and 'label' columns, found {fields}")
        for i, row in enumerate(reader):
            label = (row["label"] or "").strip()
            if not label:
                skipped += 1
                continue
            docs.append(EmailDocument(id=f"csv:{i}", text=(row["text"] or "").strip(), label=label))
    if skipped:
        log.info("skipped %d CSV row(s) with empty labels", skipped)
    return docs


def load_corpus(source: str | Path, kind: str = "auto") -> LabeledCorpus:
    """Load a labeled corpus from an mbox file, label directories, or CSV.

    kind: "auto" (directory -> dir, *.csv -> csv, else mbox), or one of
    "mbox", "dir", "csv".  Labels for mbox sources come from the
    X-Gmail-Labels header: system labels are dropped and the
    lexicographically smallest remaining label wins; unlabeled messages
    are skipped (count logged).
    """
    path = Path(source)
    if kind == "auto":
        if path.is_dir():
            kind = "dir"
        elif path.suffix.lower() == ".csv":
            kind = "csv"
        else:
            kind = "mbox"
    try:
        if kind == "dir":
            docs = _load_dir_corpus(path)
        elif kind == "csv":
            docs = _load_csv_corpus(path)
        elif kind == "mbox":
            docs = _load_mbox_corpus(path)
        else:
            raise ValueError(f"unknown corpus kind {kind!r}")
    except OSError as exc:
        raise IoError(f"cannot read corpus source {path}: {exc}") from exc
    if not docs:
        raise EmptyCorpusError(f"no documents loaded from {path}")
    return LabeledCorpus.from_documents(docs)


def filter_labels(
    corpus: LabeledCorpus, min_count: int = 1, drop: frozenset[str] | set[str] = frozenset()
) -> LabeledCorpus:
    """Remove documents of dropped or under-represented labels."""
    counts = corpus.label_counts()
    kept = [
        doc
        for doc in corpus.documents
        if doc.label not in drop and counts[doc.label] >= min_count
    ]
    if not kept:
        raise EmptyCorpusError("label filtering removed every document")
    return LabeledCorpus.from_documents(kept)


def corpus_stats(corpus: LabeledCorpus, stop_words: text_mod.StopWordList) -> LabelStats:
    """Per-label email and token counts (stop words excluded), plus totals."""
    email_counts: dict[str, int] = {label: 0 for label in corpus.labels}
    word_counts: dict[str, int] = {label: 0 for label in corpus.labels}
    for doc in corpus.documents:
        email_counts[doc.label] += 1
        word_counts[doc.label] += len(text_mod.tokenize(doc.text, stop_words))
    return LabelStats(
        per_label_email_count=email_counts,
        per_label_word_count=word_counts,
        total_emails=sum(email_counts.values()),
        total_words=sum(word_counts.values()),
    )
