import json

import pytest

from biaslens.errors import DuplicateId, IoError, ParseError
from biaslens.manifest import (
    DatasetManifest,
    Sample,
    load_manifest,
    load_vocabulary,
    save_manifest,
)


def write_lines(tmp_path, lines, name="m.jsonl"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_three_samples_in_file_order(tmp_path):
    path = write_lines(tmp_path, [
        json.dumps({"id": i, "image": f"{i}.png"}) for i in "abc"
    ])
    manifest = load_manifest(path)
    assert [s.id for s in manifest.samples] == ["a", "b", "c"]
    assert manifest.name == "m"


def test_duplicate_id_cites_later_line(tmp_path):
    path = write_lines(tmp_path, [
        json.dumps({"id": "a", "image": "1.png"}),
        json.dumps({"id": "b", "image": "2.png"}),
        json.dumps({"id": "c", "image": "3.png"}),
        json.dumps({"id": "a", "image": "4.png"}),
    ])
    with pytest.raises(DuplicateId, match="line 4"):
        load_manifest(path)


def test_empty_file_is_valid(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    assert len(load_manifest(path)) == 0


def test_malformed_line_reports_number(tmp_path):
    path = write_lines(tmp_path, [
        json.dumps({"id": "a", "image": "1.png"}),
        "{not json",
    ])
    with pytest.raises(ParseError, match="line 2"):
        load_manifest(path)


def test_missing_required_field(tmp_path):
    path = write_lines(tmp_path, [json.dumps({"id": "a"})])
    with pytest.raises(ParseError, match="image"):
        load_manifest(path)


def test_missing_file():
    with pytest.raises(IoError):
        load_manifest("/nonexistent/m.jsonl")


def test_objects_deduplicated_on_load(tmp_path):
    path = write_lines(tmp_path, [
        json.dumps({"id": "a", "image": "1.png", "objects": ["dog", "dog", "cat"]}),
    ])
    assert load_manifest(path).samples[0].object_classes == ("cat", "dog")


def test_round_trip(tmp_path):
    manifest = DatasetManifest(name="round", samples=(
        Sample(id="a", image_path="x/a.png", object_classes=("cat", "dog"),
               single_label="cat", caption_short="a cat", caption_long="a long cat"),
        Sample(id="b", image_path="x/b.png"),
    ))
    path = tmp_path / "round.jsonl"
    save_manifest(manifest, path)
    assert load_manifest(path) == manifest


def test_vocabulary_indices_are_line_numbers(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text("cat\ndog\nfish\n", encoding="utf-8")
    assert load_vocabulary(path) == ("cat", "dog", "fish")
