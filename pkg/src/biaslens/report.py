"""Machine-readable run reports and figure-ready CSV exports.

Reports are JSON with a major.minor format version; numeric result blocks are
fully determined by config + seed (timings live in a separate key).  Writes
are atomic (temp file + rename) so an interrupt never leaves a torn report.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile

from .errors import MissingBlock, ParseError

FORMAT_VERSION = "1.0"
TOOLKIT_VERSION = "0.1.0"


def make_report(command: str, config: dict, results: dict, timings: dict) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "toolkit_version": TOOLKIT_VERSION,
        "command": command,
        "config": config,
        "results": results,
        "timings": timings,
    }


def write_report(report: dict, path) -> None:
    """Serialize with sorted keys; write-to-temp then atomic rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report, fh, indent=2, sort_keys=True, ensure_ascii=False)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    version = str(report.get("format_version", ""))
    major = version.split(".")[0]
    if major != FORMAT_VERSION.split(".")[0]:
        raise ParseError(
            f"unsupported report format version {version!r} "
            f"(this toolkit reads {FORMAT_VERSION.split('.')[0]}.x)"
        )
    return report


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _csv_float(value) -> str:
    return repr(float(value))


def emit_confusion_csv(block: dict, path) -> None:
    names = block.get("class_names") or [
        str(i) for i in range(len(block["confusion"]))
    ]
    rows = [
        [name] + list(map(int, row))
        for name, row in zip(names, block["confusion"])
    ]
    _write_csv(path, ["true\\predicted"] + list(names), rows)


def emit_sweep_csv(block: dict, path) -> None:
    rows = [
        [row["value"], _csv_float(row["mean"]), _csv_float(row["std"])]
        + [_csv_float(a) for a in row["per_trial_accuracy"]]
        for row in block["rows"]
    ]
    n_trials = max(len(r["per_trial_accuracy"]) for r in block["rows"])
    header = [block.get("axis", "value"), "mean_accuracy", "std"] + [
        f"trial_{t}" for t in range(n_trials)
    ]
    _write_csv(path, header, rows)


def emit_mean_rgb_csv(block: list, path) -> None:
    rows = [
        [r["dataset"], r["id"], _csv_float(r["r"]), _csv_float(r["g"]), _csv_float(r["b"])]
        for r in block
    ]
    _write_csv(path, ["dataset", "id", "mean_r", "mean_g", "mean_b"], rows)


def emit_unique_objects_csv(block: dict, path) -> None:
    rows = []
    for dataset, hist in zip(block["dataset_names"], block["histograms"]):
        for count, images in enumerate(hist):
            rows.append([dataset, count, int(images)])
    _write_csv(path, ["dataset", "unique_objects", "images"], rows)


def emit_share_accuracy_csv(block: dict, path) -> None:
    rows = [
        [lab, _csv_float(s), _csv_float(a), int(n)]
        for lab, s, a, n in zip(
            block["labels"], block["majority_share"],
            block["accuracy"], block["support"],
        )
    ]
    _write_csv(path, ["label", "majority_share", "accuracy", "support"], rows)


_EMITTERS = {
    "sweep": ("accuracy_vs_value.csv", emit_sweep_csv),
    "mean_rgb": ("mean_rgb.csv", emit_mean_rgb_csv),
    "unique_objects": ("unique_object_histograms.csv", emit_unique_objects_csv),
    "share_accuracy": ("accuracy_vs_majority_share.csv", emit_share_accuracy_csv),
}


def emit_plot_data(report: dict, out_dir, blocks=None) -> list[str]:
    """One CSV per figure-family block present in the report.

    With `blocks` given, each named block must exist (MissingBlock otherwise);
    without it, every recognized block is exported.  Returns written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    results = report.get("results", {})
    available = set()
    for key in _EMITTERS:
        if key in results:
            available.add(key)
    for key in results:
        if isinstance(results[key], dict) and "confusion" in results[key]:
            available.add(f"{key}.confusion")

    wanted = list(blocks) if blocks is not None else sorted(available)
    written = []
    for name in wanted:
        if name.endswith(".confusion"):
            block_name = name[: -len(".confusion")]
            block = results.get(block_name)
            if not isinstance(block, dict) or "confusion" not in block:
                raise MissingBlock(f"report has no confusion block {block_name!r}")
            path = os.path.join(out_dir, f"confusion_{block_name}.csv")
            emit_confusion_csv(block, path)
        elif name in _EMITTERS and name in results:
            filename, emitter = _EMITTERS[name]
            if name == "sweep":
                axis = results[name].get("axis", "value")
                filename = f"accuracy_vs_{axis}.csv"
            path = os.path.join(out_dir, filename)
            emitter(results[name], path)
        else:
            raise MissingBlock(f"report has no block {name!r}")
        written.append(path)
    return written
