import json
import math
import os
from typing import Any

import numpy as np
import pandas as pd


class NumpyEncoder(json.JSONEncoder):
    """Special json encoder for numpy types"""

    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, np.bool_):
            return bool(obj)
        return super().default(obj)


def create_output_location(file_path: str):
    """Creates the parent directory of an output file.
        Does nothing if directory already exists.

    Args:
        file_path (str): path of the file to be written
    """
    parent = os.path.dirname(os.path.abspath(file_path))
    os.makedirs(parent, exist_ok=True)


def replace_non_finite(value: Any) -> Any:
    """Given a JSON-like value, replace every NaN or infinite float with None.
    Dicts and lists are handled recursively, numpy arrays are converted to lists.

    Args:
        value (Any): input value to be cleaned

    Returns:
        Any: cleaned value that json can serialize without NaN tokens
    """
    if isinstance(value, dict):
        return {key: replace_non_finite(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [replace_non_finite(v) for v in value]
    if isinstance(value, np.ndarray):
        return replace_non_finite(value.tolist())
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return None
    return value


def rows_to_csv(df: pd.DataFrame, file_path: str) -> str:
    """Writes a data frame of experiment rows into a csv file.

    Args:
        df (pd.DataFrame): DataFrame to be written
        file_path (str): path of the csv file to be created

    Returns:
        str: path of the new CSV file
    """

    create_output_location(file_path)
    with open(file_path, "w", newline="") as temp_csv:
        df.to_csv(path_or_buf=temp_csv, index=False)
    return file_path


def to_json_string(d: dict) -> str:
    """Serializes a dictionary, including numpy values, into an indented JSON string."""
    return json.dumps(replace_non_finite(d), cls=NumpyEncoder, indent=2)


def dict_to_json(d: dict, file_path: str) -> str:
    """Converts a dictionary into a JSON file.

    Args:
        d (dict): Dictionary to be converted to a JSON file
        file_path (str): path of the JSON file to be created

    Returns:
        str: path of the new JSON file
    """

    create_output_location(file_path)
    with open(file_path, "w") as temp_json:
        temp_json.write(to_json_string(d))
        temp_json.write("\n")
    return file_path
