"""Corpus ingestion and binary PGM (P5) input/output.

Files follow the FG-NET naming convention ``<subject>A<age>[variant].<ext>``,
e.g. ``001A02.JPG`` or ``052a21b.pgm``. A ``manifest.json`` in the corpus root
takes precedence over filename parsing.
"""
from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorruptFile, EmptyCorpus, NameParseError, UnsupportedFormat

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
MAX_AGE = 120

_NAME_RE = re.compile(r"^(\d+)[aA](\d+)[A-Za-z]?\.[^.]+$")


@dataclass(frozen=True)
class RawImage:
    width: int
    height: int
    data: np.ndarray  # uint8, shape (height, width)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"bad image size {self.width}x{self.height}")
        data = np.asarray(self.data)
        if data.shape != (self.height, self.width):
            data = data.reshape(self.height, self.width)
        if data.dtype != np.uint8:
            if np.any(data < 0) or np.any(data > 255):
                raise ValueError("intensities must lie in [0, 255]")
            data = data.astype(np.uint8)
        object.__setattr__(self, "data", data)

    def __eq__(self, other):
        if not isinstance(other, RawImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.data, other.data)
        )

    @classmethod
    def from_list(cls, width: int, height: int, values) -> "RawImage":
        values = list(values)
        if len(values) != width * height:
            raise ValueError(f"expected {width * height} values, got {len(values)}")
        return cls(width, height, np.array(values, dtype=np.int64).reshape(height, width))


@dataclass(frozen=True)
class FaceRecord:
    subject_id: str
    age_years: int
    path: Path

    def __post_init__(self):
        if not self.subject_id:
            raise ValueError("subject_id must be non-empty")
        if not 0 <= self.age_years <= MAX_AGE:
            raise ValueError(f"age {self.age_years} outside [0, {MAX_AGE}]")


@dataclass(frozen=True)
class SubjectSequence:
    subject_id: str
    records: tuple[FaceRecord, ...]

    def __post_init__(self):
        if not self.records:
            raise ValueError("a sequence needs at least one record")
        ages = [r.age_years for r in self.records]
        if any(b <= a for a, b in zip(ages, ages[1:])):
            raise ValueError(f"ages not strictly increasing: {ages}")
        if any(r.subject_id != self.subject_id for r in self.records):
            raise ValueError("mixed subject ids in one sequence")

    def __len__(self):
        return len(self.records)

    @property
    def ages(self) -> list[int]:
        return [r.age_years for r in self.records]


@dataclass
class Corpus:
    sequences: list[SubjectSequence]
    manifest_path: Path | None = None
    root: Path = field(default_factory=Path)
    skipped: list[str] = field(default_factory=list)

    def __post_init__(self):
        ids = [s.subject_id for s in self.sequences]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate subject ids in corpus")

    @property
    def n_images(self) -> int:
        return sum(len(s) for s in self.sequences)

    def truncated(self, length: int) -> "Corpus":
        """Copy keeping at most the first ``length`` images of each subject."""
        seqs = [SubjectSequence(s.subject_id, s.records[:length]) for s in self.sequences]
        return Corpus(seqs, self.manifest_path, self.root, list(self.skipped))


def parse_record_name(filename: str) -> tuple[str, int]:
    """Return ``(subject_id, age)`` from an FG-NET style base name."""
    m = _NAME_RE.match(filename) if isinstance(filename, str) else None
    if m is None:
        raise NameParseError(f"not an FG-NET style name: {filename!r}")
    return m.group(1), int(m.group(2))


def _group(records: list[FaceRecord]) -> list[SubjectSequence]:
    by_subject: dict[str, dict[int, FaceRecord]] = {}
    for rec in sorted(records, key=lambda r: (r.subject_id, r.age_years, r.path.name)):
        ages = by_subject.setdefault(rec.subject_id, {})
        kept = ages.get(rec.age_years)
        if kept is not None:
            log.warning(
                "duplicate subject %s age %d: keeping %s, dropping %s",
                rec.subject_id, rec.age_years, kept.path.name, rec.path.name,
            )
            continue
        ages[rec.age_years] = rec
    return [
        SubjectSequence(sid, tuple(ages[a] for a in sorted(ages)))
        for sid, ages in sorted(by_subject.items())
    ]


def read_manifest(path: str | os.PathLike) -> Corpus:
    """Load a manifest file. Relative record paths resolve against its directory."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    root = path.parent
    records = []
    for entry in doc["records"]:
        p = Path(entry["path"])
        records.append(FaceRecord(str(entry["subject"]), int(entry["age"]), p if p.is_absolute() else root / p))
    if not records:
        raise EmptyCorpus(f"{path} lists no records")
    return Corpus(_group(records), manifest_path=path, root=root, skipped=list(doc.get("skipped", [])))


def write_manifest(corpus: Corpus, path: str | os.PathLike) -> None:
    path = Path(path)
    base = path.parent.resolve()
    records = []
    for seq in corpus.sequences:
        for rec in seq.records:
            records.append({
                "subject": rec.subject_id,
                "age": rec.age_years,
                "path": os.path.relpath(rec.path.resolve(), base),
            })
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"records": records, "skipped": sorted(corpus.skipped)}, fh, indent=1)
        fh.write("\n")


def scan_corpus(root_dir: str | os.PathLike) -> Corpus:
    """Build per-subject age-ordered sequences from a directory.

    Unparsable names are skipped (and listed in ``Corpus.skipped``). Duplicate
    (subject, age) pairs keep the lexicographically smallest filename.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise OSError(f"cannot read directory {root}")
    manifest = root / MANIFEST_NAME
    if manifest.is_file():
        return read_manifest(manifest)
    records, skipped = [], []
    for name in sorted(os.listdir(root)):
        if not (root / name).is_file():
            continue
        try:
            sid, age = parse_record_name(name)
        except NameParseError:
            skipped.append(name)
            continue
        records.append(FaceRecord(sid, age, root / name))
    if not records:
        raise EmptyCorpus(f"no parsable face images in {root} ({len(skipped)} skipped)")
    if skipped:
        log.info("skipped %d unparsable files in %s", len(skipped), root)
    return Corpus(_group(records), manifest_path=None, root=root, skipped=skipped)


def _header_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    # Netpbm header: whitespace-separated tokens; '#' starts a comment to end of line.
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(buf):
            raise CorruptFile("truncated PGM header")
        if buf[pos:pos + 1] == b"#":
            end = buf.find(b"\n", pos)
            pos = len(buf) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace() and buf[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(buf[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(buf) or not buf[pos:pos + 1].isspace():
        raise CorruptFile("missing raster separator")
    return tokens, pos + 1


def load_pgm(path: str | os.PathLike) -> RawImage:
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:2] != b"P5":
        raise UnsupportedFormat(f"{path}: magic {buf[:2]!r} is not P5")
    tokens, offset = _header_tokens(buf[2:], 3)
    offset += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise CorruptFile(f"{path}: bad header {tokens}") from exc
    if maxval > 255 or maxval < 1:
        raise UnsupportedFormat(f"{path}: maxval {maxval} unsupported")
    if width < 1 or height < 1:
        raise CorruptFile(f"{path}: bad size {width}x{height}")
    n = width * height
    payload = buf[offset:offset + n]
    if len(payload) < n:
        raise CorruptFile(f"{path}: expected {n} payload bytes, got {len(payload)}")
    data = np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()
    return RawImage(width, height, data)


def write_pgm(path: str | os.PathLike, image: RawImage) -> None:
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(image.data, dtype=np.uint8).tobytes())
