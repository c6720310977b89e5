from typing import List, Union

import numpy as np
import pandas as pd
import yaml

SUMMARY_METRICS = {
    "relative_approx_error": "approx_error",
    "relative_est_error": "est_error",
}


def get_config(config_path: str = None) -> dict:
    """Takes config_path and opens the file it points to, loads the experiment configuration from it.
    JSON configurations are read as well, since JSON is valid YAML.
    If no config_path is supplied, defaults to "./config.yaml"

    Args:
        config_path (str, optional): Path to config file. Defaults to None.

    Returns:
        dict: experiment configuration
    """
    if config_path is None:
        config_path = "./config.yaml"

    try:
        with open(config_path, "r") as file:
            config = yaml.load(file, Loader=yaml.SafeLoader)
    except FileNotFoundError:
        raise FileNotFoundError("File not found.  Please provide a valid path.")
    except yaml.parser.ParserError:
        raise yaml.parser.ParserError(
            "YAML file unable to be parsed.  Please provide a valid YAML file."
        )
    except yaml.scanner.ScannerError:
        raise yaml.scanner.ScannerError(
            "YAML file unable to be scanned.  Please provide a valid YAML file."
        )

    return config


def calculate_distribution(
    df: pd.DataFrame, grouping: Union[str, list], distribution_column: str
) -> pd.DataFrame:
    """Takes a pandas DataFrame and calculates the distribution of a specific column, grouped by
    a column or set of columns.

    Quartiles use pandas' linear interpolation between order statistics, so rows 1..100 give
    first_quartile 25.75, median 50.5 and third_quartile 75.25.

    Args:
        df (pd.DataFrame): the DataFrame to calculate distribution for
        grouping (str or list of str): the column(s) to group the data frame on (example: ["d", "scheme"])
        distribution_column (str): the name of the column to calculate distribution on

    Returns:
        pd.DataFrame: a Dataframe containing columns <grouping>, "count", "min", "first_quartile",
                      "median", "third_quartile" and "max", with the statistics calculated on
                      distribution_column. The "min" and "max" values are the whisker bounds:
                        min = first_quartile - 1.5*IQR and
                        max = third_quartile + 1.5*IQR, where
                        IQR = third_quartile - first_quartile.
    """
    df = df.groupby(grouping).agg("describe")[distribution_column].reset_index()

    if isinstance(grouping, str):
        grouping = [grouping]
    columns_keep = grouping + ["count", "min", "max", "25%", "50%", "75%"]

    df = df[columns_keep].rename(
        columns={"25%": "first_quartile", "50%": "median", "75%": "third_quartile"},
    )

    iqr = df["third_quartile"] - df["first_quartile"]
    df["min"] = df["first_quartile"] - (1.5 * iqr)
    df["max"] = df["third_quartile"] + (1.5 * iqr)
    df["count"] = df["count"].astype(int)

    return df[
        grouping
        + ["count", "min", "first_quartile", "median", "third_quartile", "max"]
    ]


def summarize(rows: pd.DataFrame) -> pd.DataFrame:
    """Distribution of the relative approximation and estimation errors per (d, scheme).

    The relative errors are approx_error / full_error and est_error / full_error. Rows without
    distances (failed solves) are left out.

    Args:
        rows (pd.DataFrame): experiment rows with columns d, scheme, approx_error, est_error, full_error

    Raises:
        ValueError: if no row has distances

    Returns:
        pd.DataFrame: one line per (d, scheme, metric)
    """
    rows = rows.dropna(subset=["approx_error", "est_error", "full_error"])
    if rows.empty:
        raise ValueError("Cannot summarize an experiment without successful rows.")

    tables: List[pd.DataFrame] = []
    for metric, column in SUMMARY_METRICS.items():
        ratios = rows[["d", "scheme"]].copy()
        ratios[metric] = rows[column] / rows["full_error"]
        table = calculate_distribution(ratios, ["d", "scheme"], metric)
        table.insert(2, "metric", metric)
        tables.append(table)

    return (
        pd.concat(tables, ignore_index=True)
        .sort_values(["d", "scheme", "metric"], kind="mergesort")
        .reset_index(drop=True)
    )


def median_full_error(rows: pd.DataFrame) -> float:
    """Median over replications of D(H_n, H); every replication counts once."""
    per_rep = rows.dropna(subset=["full_error"]).drop_duplicates(subset=["rep"])
    if per_rep.empty:
        return float("nan")
    return float(np.median(per_rep["full_error"].to_numpy()))
