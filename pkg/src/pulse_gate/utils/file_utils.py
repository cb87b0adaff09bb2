"""
File utility functions for writing simulation artifacts.
"""
import hashlib
import json
import os
import re
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd

# CSV 出力の数値書式（'.' 小数点、カンマ区切り）
CSV_FLOAT_FORMAT = "%.12e"


def sanitize_filename(filename: str) -> str:
    """
    Convert a string to a safe filename by removing unsafe characters.

    Args:
        filename: The original filename

    Returns:
        A sanitized filename
    """
    unsafe_chars = r'[<>:"/\\|?*\s]'
    safe_filename = re.sub(unsafe_chars, "_", filename)
    if len(safe_filename) > 200:
        safe_filename = safe_filename[:200]
    return safe_filename


def ensure_directory_exists(directory_path: str) -> None:
    """
    Ensure that a directory exists, creating it if necessary.

    Args:
        directory_path: Path to the directory
    """
    Path(directory_path).mkdir(parents=True, exist_ok=True)


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def canonical_json(data: Any) -> str:
    """Serialize ``data`` deterministically (sorted keys, fixed separators)."""
    return json.dumps(
        _to_jsonable(data), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    )


def write_json(path: str, data: Any) -> str:
    """
    Write ``data`` as indented JSON with sorted keys.

    Args:
        path: Destination file
        data: Any structure of dicts, lists, numbers and numpy values

    Returns:
        The path that was written
    """
    ensure_directory_exists(os.path.dirname(os.path.abspath(path)))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(_to_jsonable(data), f, sort_keys=True, ensure_ascii=False, indent=2)
        f.write("\n")
    return path


def write_table(path: str, frame: pd.DataFrame, fmt: str = "csv") -> str:
    """
    Write a table as CSV (header row, '.' decimals, comma delimiter) or JSON records.

    Args:
        path: Destination file without extension handling; the caller picks it
        frame: Table to write
        fmt: "csv" or "json"

    Returns:
        The path that was written
    """
    ensure_directory_exists(os.path.dirname(os.path.abspath(path)))
    if fmt == "json":
        return write_json(path, frame.to_dict(orient="records"))
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def file_sha256(path: str) -> str:
    """Return the hex SHA-256 digest of a file."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    out_dir: str, scenario: str, config_hash: str, files: List[Dict[str, str]], version: str
) -> str:
    """
    Write ``manifest.json`` listing every produced file with its digest.

    Args:
        out_dir: Output directory
        scenario: Scenario name
        config_hash: SHA-256 of the canonical scenario config
        files: Entries with "path" (relative to out_dir) and "description"
        version: Package version

    Returns:
        Path of the manifest
    """
    entries = []
    for entry in sorted(files, key=lambda e: e["path"]):
        full_path = os.path.join(out_dir, entry["path"])
        entries.append(
            {
                "path": entry["path"],
                "description": entry["description"],
                "sha256": file_sha256(full_path),
            }
        )
    manifest = {
        "scenario": scenario,
        "config_hash": config_hash,
        "version": version,
        "files": entries,
    }
    return write_json(os.path.join(out_dir, "manifest.json"), manifest)
