import numpy as np
import pandas as pd

from symscatter.pairs import as_dataset


def read_dataset_csv(csv_path: str, header: bool = False) -> np.ndarray:
    """
    Reads a dataset of observations from a csv file, one observation per row

    Args:
        csv_path (str): path to input csv file
        header (bool, optional): whether the first line holds column names. Defaults to False.

    Raises:
        ValueError: If the file is not a .csv file, is empty, or holds non-numeric or non-finite values
        DimensionMismatchError: If the rows do not form an (n, q) table

    Returns:
        np.ndarray: (n, q) float array
    """

    if str(csv_path).split(".")[-1] != "csv":
        raise ValueError(
            "Please make sure the dataset file "
            + f"{str(csv_path)} has a .csv extension."
        )

    try:
        df = pd.read_csv(
            csv_path, header=0 if header else None, float_precision="round_trip"
        )
    except pd.errors.EmptyDataError:
        raise ValueError(f"Dataset file {str(csv_path)} is empty.")

    try:
        values = df.apply(pd.to_numeric).to_numpy(dtype=float)
    except (ValueError, TypeError):
        raise ValueError(
            f"Dataset file {str(csv_path)} has non-numeric values. "
            + "Use --header if the first line holds column names."
        )

    return as_dataset(values)
