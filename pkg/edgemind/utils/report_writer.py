"""Write result tables as CSV or XLSX."""
from typing import Any

import pandas as pd

from edgemind.errors import ConfigError

FLOAT_FORMAT = "%.10g"


def _flatten_cell(value: Any) -> Any:
    # Lists become [a,b,c] in CSV cells
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(str(item) for item in value) + "]"
    if isinstance(value, dict):
        return ";".join(f"{k}={v}" for k, v in sorted(value.items()))
    return value


def save_table(frame: pd.DataFrame, file_path: str, file_format: str = "csv") -> str:
    """
    Save a table in the specified format.

    Args:
        frame: Rows to save
        file_path: Destination path
        file_format: ``csv`` or ``xlsx``

    Returns:
        Path to the saved file
    """
    file_format = file_format.lower()
    if file_format == "csv":
        flat = frame.map(_flatten_cell) if not frame.empty else frame
        flat.to_csv(file_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    elif file_format == "xlsx":
        frame.map(_flatten_cell).to_excel(file_path, index=False)
    else:
        raise ConfigError(f"Unsupported table format: {file_format}")
    return file_path


def table_path(stem: str, file_format: str) -> str:
    return f"{stem}.{file_format.lower()}"
