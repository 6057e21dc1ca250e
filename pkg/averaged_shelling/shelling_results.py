import io
import math
from fractions import Fraction

import pandas as pd

from .exactnum import SQRT2, quadVal
from .read_data import _load_shell_table
from .shelling import EXACT, shellRecord

COLUMNS = [
    "kind",
    "basis",
    "r2_a",
    "r2_b",
    "r_float",
    "rint_float",
    "sigma_a",
    "sigma_b",
    "sigma_float",
    "source",
    "seed",
]

# the square lattice is written with basis "rational"; its values live in Z
RATIONAL = "rational"


class ConsistencyError(RuntimeError):
    """Raised when a shelling table fails its internal consistency checks."""


class shellingResults:

    def __init__(
        self,
        records: list,
        kind: str,
        basis: str,
        seed: int | None = None,
    ) -> None:
        """
        Parameters
        ----------
        records : list of shellRecord
            The shells, sorted by exact r2.
        kind : str
            Name of the computation, e.g. "penrose" or "ammann-random".
        basis : str
            "sqrt2", "tau" or "rational".
        seed : int | None, optional
            Seed of a random tiling computation.
            default = None
        """
        self._records = list(records)
        self._kind = kind
        self._basis = basis
        self._seed = seed
        self._results_data = self._make_table()

    @property
    def records(self) -> list:
        return list(self._records)

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def basis(self) -> str:
        return self._basis

    @property
    def seed(self) -> int | None:
        return self._seed

    def __len__(self) -> int:
        return len(self._records)

    def _make_table(self) -> pd.DataFrame:
        rows = []
        for record in self._records:
            r2_a, r2_b = record.r2.to_text()
            if record.sigma_exact is None:
                sigma_a = sigma_b = ""
            else:
                sigma_a, sigma_b = record.sigma_exact.to_text()
            rows.append(
                {
                    "kind": self._kind,
                    "basis": self._basis,
                    "r2_a": r2_a,
                    "r2_b": r2_b,
                    "r_float": repr(record.r),
                    "rint_float": repr(record.r_int),
                    "sigma_a": sigma_a,
                    "sigma_b": sigma_b,
                    "sigma_float": repr(record.sigma_float),
                    "source": record.source,
                    "seed": "" if self._seed is None else str(self._seed),
                }
            )
        return pd.DataFrame(rows, columns=COLUMNS)

    def get_results(self) -> pd.DataFrame:
        """
        Get the shelling table as a dataframe

        returns
        -------
        pandas.DataFrame
            One row per shell; exact values as text columns, the radii and
            the shelling number as floats.
        """
        table = self._results_data.copy()
        for column in ("r_float", "rint_float", "sigma_float"):
            table[column] = table[column].astype(float)
        return table

    def to_csv(self, path: str | None = None) -> str | None:
        """
        Write the table as csv.

        Parameters
        ----------
        path : str | None, optional
            The output file; if None the csv text is returned.
            default = None

        Returns
        -------
        str | None
            The csv text when no path is given.
        """
        buffer = io.StringIO()
        self._results_data.to_csv(buffer, index=False, lineterminator="\n")
        text = buffer.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="") as output:
            output.write(text)
        return None

    @classmethod
    def from_csv(cls, path: str) -> "shellingResults":
        """
        Read a table written by `to_csv`; rendering it again gives the same
        bytes.
        """
        table = _load_shell_table(path)
        if table.empty:
            raise ValueError(f"{path} holds no shells")
        kind = table["kind"].iloc[0]
        basis = table["basis"].iloc[0]
        ring = SQRT2 if basis == RATIONAL else basis
        seed_text = table["seed"].iloc[0]
        records = []
        for row in table.itertuples(index=False):
            r2 = quadVal(Fraction(row.r2_a), Fraction(row.r2_b), ring)
            sigma = None
            if row.sigma_a != "":
                sigma = quadVal(Fraction(row.sigma_a), Fraction(row.sigma_b), ring)
            records.append(
                shellRecord(
                    r2,
                    float(row.r_float),
                    float(row.rint_float),
                    sigma,
                    float(row.sigma_float),
                    row.source,
                )
            )
        return cls(records, kind, basis, None if seed_text == "" else int(seed_text))

    def sigma(self, r2: quadVal) -> float:
        """Float shelling number of the shell with exact squared radius r2, 0 if absent."""
        for record in self._records:
            if record.r2 == r2:
                return record.sigma_float
        return 0.0

    def compare(self, other: "shellingResults") -> pd.DataFrame:
        """
        Compare two tables shell by shell on the exact r2.

        Parameters
        ----------
        other : shellingResults
            The table compared against this one.

        Returns
        -------
        pandas.DataFrame
            Columns r2_a, r2_b, r_float, sigma, sigma_other, abs_diff and
            rel_diff (relative to this table); a shell missing on one side
            counts as sigma 0 there.

        Examples
        --------
        >>> exact.compare(perfect).loc[lambda df: df["r_float"] <= 3, "rel_diff"].max()
        """
        left = self.get_results()[["r2_a", "r2_b", "r_float", "sigma_float"]]
        right = other.get_results()[["r2_a", "r2_b", "r_float", "sigma_float"]]
        merged = left.merge(
            right, on=["r2_a", "r2_b"], how="outer", suffixes=("", "_other")
        )
        merged["r_float"] = merged["r_float"].fillna(merged["r_float_other"])
        merged = merged.rename(columns={"sigma_float": "sigma", "sigma_float_other": "sigma_other"})
        merged[["sigma", "sigma_other"]] = merged[["sigma", "sigma_other"]].fillna(0.0)
        merged["abs_diff"] = (merged["sigma_other"] - merged["sigma"]).abs()
        merged["rel_diff"] = merged["abs_diff"] / merged["sigma"].where(merged["sigma"] > 0)
        merged = merged.sort_values("r_float", kind="mergesort").reset_index(drop=True)
        return merged[["r2_a", "r2_b", "r_float", "sigma", "sigma_other", "abs_diff", "rel_diff"]]

    def check(self) -> None:
        """
        Internal consistency checks.

        Raises
        ------
        ConsistencyError
            If a shelling number is negative, the radii are not strictly
            ascending, or an exact value disagrees with its float rendering.
        """
        previous = None
        for record in self._records:
            if record.sigma_float < 0 or (
                record.sigma_exact is not None and record.sigma_exact.sign() < 0
            ):
                raise ConsistencyError(f"negative shelling number at r2 = {record.r2}")
            if previous is not None and not previous < record.r2:
                raise ConsistencyError(
                    f"radii not strictly ascending: {previous} before {record.r2}"
                )
            if record.source == EXACT and record.sigma_exact is None:
                raise ConsistencyError(f"exact shell r2 = {record.r2} lacks its exact value")
            if record.sigma_exact is not None and not math.isclose(
                float(record.sigma_exact), record.sigma_float, rel_tol=1e-12, abs_tol=1e-12
            ):
                raise ConsistencyError(
                    f"sigma {record.sigma_exact} does not match its float {record.sigma_float!r}"
                )
            previous = record.r2
