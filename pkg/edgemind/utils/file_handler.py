"""Utility functions for reading and writing the files a run consumes and produces."""
import hashlib
import json
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from typing import Any, Dict, Sequence

import pandas as pd

from edgemind.errors import ConfigError, ParseError, SchemaError


def load_structured_file(file_path: str) -> Dict[str, Any]:
    """
    Load a JSON or TOML document based on its extension.

    Args:
        file_path: Path to the ``.json`` or ``.toml`` file

    Returns:
        Parsed document as a dictionary

    Raises:
        ConfigError: If the file is missing, unsupported or malformed
    """
    _, extension = os.path.splitext(file_path)
    extension = extension.lower()

    if not os.path.exists(file_path):
        raise ConfigError(f"File not found: {file_path}")
    try:
        if extension == ".json":
            with open(file_path, "r", encoding="utf-8") as file:
                return json.load(file)
        elif extension == ".toml":
            with open(file_path, "rb") as file:
                return tomllib.load(file)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"Error reading {file_path}: {e}") from e
    raise ConfigError(f"Unsupported file type: {extension}")


def read_csv_table(file_path: str, columns: Sequence[str]) -> pd.DataFrame:
    """
    Read a CSV file as strings and check its header.

    Args:
        file_path: Path to the CSV file
        columns: Expected header, in order

    Returns:
        DataFrame with string cells (empty cells are empty strings)
    """
    try:
        frame = pd.read_csv(file_path, dtype=str, keep_default_na=False)
    except FileNotFoundError as e:
        raise ParseError(f"File not found: {file_path}") from e
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"Empty file without header: {file_path}", line=1) from e
    except pd.errors.ParserError as e:
        raise ParseError(f"Error parsing {file_path}: {e}") from e

    if list(frame.columns) != list(columns):
        raise SchemaError(
            f"Unexpected header in {file_path}: {list(frame.columns)}, expected {list(columns)}"
        )
    return frame


def write_json(file_path: str, data: Any) -> str:
    """Write ``data`` as stable, sorted JSON and return the path."""
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return file_path


def file_sha256(file_path: str) -> str:
    digest = hashlib.sha256()
    with open(file_path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def ensure_dir(path: str) -> str:
    if not os.path.exists(path):
        os.makedirs(path)
    return path
