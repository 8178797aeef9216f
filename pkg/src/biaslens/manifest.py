"""Dataset manifests: JSON Lines ingestion, validation, and round-trip.

One record per line, UTF-8, LF endings.  Fields: id (required), image
(required path), objects (optional list of class names), label (optional
class name), caption_short / caption_long (optional strings).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .errors import DuplicateId, IoError, ParseError

_STR_FIELDS = ("label", "caption_short", "caption_long")


@dataclass(frozen=True)
class Sample:
    id: str
    image_path: str
    object_classes: tuple[str, ...] | None = None
    single_label: str | None = None
    caption_short: str | None = None
    caption_long: str | None = None

    def __post_init__(self):
        if self.object_classes is not None:
            # deduplicated: a class appears at most once per image
            deduped = tuple(sorted(set(self.object_classes)))
            object.__setattr__(self, "object_classes", deduped)

    def caption(self, which: str) -> str | None:
        return self.caption_short if which == "short" else self.caption_long


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    samples: tuple[Sample, ...] = ()
    vocabulary_name: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("manifest name must be nonempty")
        object.__setattr__(self, "samples", tuple(self.samples))

    def __len__(self) -> int:
        return len(self.samples)


def _parse_record(obj, line_no: int) -> Sample:
    if not isinstance(obj, dict):
        raise ParseError(f"line {line_no}: record is not an object")
    if "id" not in obj or not isinstance(obj["id"], str) or not obj["id"]:
        raise ParseError(f"line {line_no}: missing or invalid 'id'")
    if "image" not in obj or not isinstance(obj["image"], str):
        raise ParseError(f"line {line_no}: missing or invalid 'image'")
    objects = obj.get("objects")
    if objects is not None:
        if not isinstance(objects, list) or any(not isinstance(o, str) for o in objects):
            raise ParseError(f"line {line_no}: 'objects' must be a list of strings")
        objects = tuple(objects)
    for key in _STR_FIELDS:
        if obj.get(key) is not None and not isinstance(obj[key], str):
            raise ParseError(f"line {line_no}: '{key}' must be a string")
    return Sample(
        id=obj["id"],
        image_path=obj["image"],
        object_classes=objects,
        single_label=obj.get("label"),
        caption_short=obj.get("caption_short"),
        caption_long=obj.get("caption_long"),
    )


def load_manifest(path, name: str | None = None) -> DatasetManifest:
    """Read a JSONL manifest, preserving file order.

    Raises ParseError (with line numbers) on malformed lines and DuplicateId
    (citing the later line) on repeated ids.  Blank lines are skipped.
    """
    if not os.path.exists(path):
        raise IoError(f"no such manifest: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc

    samples = []
    seen: dict[str, int] = {}
    problems: list[str] = []
    duplicates_only = True
    for line_no, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            problems.append(f"line {line_no}: invalid JSON ({exc.msg})")
            duplicates_only = False
            continue
        try:
            sample = _parse_record(obj, line_no)
        except ParseError as exc:
            problems.append(str(exc))
            duplicates_only = False
            continue
        if sample.id in seen:
            problems.append(
                f"line {line_no}: duplicate id {sample.id!r} "
                f"(first seen on line {seen[sample.id]})"
            )
            continue
        seen[sample.id] = line_no
        samples.append(sample)

    if problems:
        message = "; ".join(problems)
        if duplicates_only:
            raise DuplicateId(message)
        raise ParseError(message)
    manifest_name = name if name is not None else os.path.splitext(os.path.basename(path))[0]
    return DatasetManifest(name=manifest_name, samples=tuple(samples))


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write JSONL with the same field names load_manifest reads."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in manifest.samples:
            rec: dict = {"id": s.id, "image": s.image_path}
            if s.object_classes is not None:
                rec["objects"] = list(s.object_classes)
            if s.single_label is not None:
                rec["label"] = s.single_label
            if s.caption_short is not None:
                rec["caption_short"] = s.caption_short
            if s.caption_long is not None:
                rec["caption_long"] = s.caption_long
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_vocabulary(path) -> tuple[str, ...]:
    """One class name per line; index = zero-based line number."""
    if not os.path.exists(path):
        raise IoError(f"no such vocabulary file: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return tuple(line.rstrip("\n") for line in fh if line.rstrip("\n"))


def save_vocabulary(names, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for n in names:
            fh.write(n + "\n")
