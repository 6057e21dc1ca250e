from fractions import Fraction
import os

import numpy as np
import pandas as pd


def _absolute(data_file: str) -> str:
    absolute_path = str(data_file)
    if absolute_path.startswith(".."):
        absolute_path = absolute_path.replace("..", os.path.dirname(__file__), 1)
    return os.path.normpath(absolute_path)


def _load_shell_table(data_file: str) -> pd.DataFrame:
    """
    Reads a shelling table written by shellingResults.to_csv.

    Parameters
    ----------
    data_file: str
        The csv file; a leading '..' is resolved relative to the package
        directory.

    Returns
    -------
    pandas.DataFrame
        The table with every column kept as text, so exact values and the
        float renderings survive unchanged
    """
    return pd.read_csv(_absolute(data_file), dtype=str, keep_default_na=False)


def _load_snapshot(data_file: str) -> dict:
    """
    Reads a tiling snapshot.

    Parameters:
    -----------
    data_file: str
        The snapshot file, a header of `order`, `pell`, `seed` and `flips`
        lines followed by vertex lines (four integers) and tile lines
        (`tile`, four integers, two directions)

    Returns:
    --------
    dict
        with keys order, pell (p, q), seed (int or None), flips, vertices
        (list of 4-tuples) and tiles (list of (4-tuple, i, j))
    """
    header = {}
    vertices = []
    tiles = []
    with open(_absolute(data_file)) as snapshot:
        for number, line in enumerate(snapshot, start=1):
            fields = line.split()
            if not fields:
                continue
            if fields[0] in ("order", "pell", "seed", "flips"):
                header[fields[0]] = fields[1] if len(fields) > 1 else None
            elif fields[0] == "tile":
                if len(fields) != 7:
                    raise ValueError(f"{data_file}:{number}: malformed tile line")
                values = [int(f) for f in fields[1:]]
                tiles.append((tuple(values[:4]), values[4], values[5]))
            else:
                if len(fields) != 4:
                    raise ValueError(f"{data_file}:{number}: malformed vertex line")
                vertices.append(tuple(int(f) for f in fields))

    missing = {"order", "pell", "flips"} - set(header)
    if missing:
        raise ValueError(f"{data_file}: snapshot header lacks {', '.join(sorted(missing))}")
    pell = Fraction(header["pell"])
    return {
        "order": int(header["order"]),
        "pell": (pell.numerator, pell.denominator),
        "seed": None if header.get("seed") is None else int(header["seed"]),
        "flips": int(header["flips"]),
        "vertices": vertices,
        "tiles": tiles,
    }


def _load_point_dump(data_file: str, coefficients: int) -> tuple:
    """
    Reads a point-set dump written by modelSet.dump_points.

    Parameters
    ----------
    data_file: str
        The dump file
    coefficients: int
        Number of integer coefficients per line (2, 4 or 5)

    Returns
    -------
    tuple of numpy.ndarray
        The integer coefficients and the float physical coordinates
    """
    data = np.loadtxt(_absolute(data_file), ndmin=2)
    return data[:, :coefficients].astype(np.int64), data[:, coefficients:]
