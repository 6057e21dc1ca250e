import logging

import pandas as pd

from .exactnum import SQRT2, TAU, quadVal
from .modelsets import AMMANN, PENROSE, SILVER, modelSet
from .parallel import _worker_count
from .randomtiling import build_approximant, empirical_shelling, random_tiling_shelling, tilingState
from .sh_config import shellingConfig
from .shelling import averaged_shelling, central_square_lattice, shellRecord
from .shelling_results import RATIONAL, shellingResults

logger = logging.getLogger(__name__)


class shellingCalculator:
    """
    The shellingCalculator computes averaged shelling tables. It uses the
    default parameters of the parameters.yaml file, or the user copy in
    ~/.shelling when there is one.

    Parameters
    ----------
    custom_settings : dict | None, optional
        Custom settings dictionary to update default settings (default is None).
        For an overview of which settings could be given, please see the
        docstring of the update_settings method.

    Methods
    -------
    central(mmax: int | None = None)
        Central shelling numbers of the square lattice.
    chain(rmax: float | None = None)
        Exact averaged shelling of the silver mean chain.
    penrose(rmax: float | None = None)
        Exact averaged shelling of the Penrose vertex set.
    ammann(rmax: float | None = None)
        Exact averaged shelling of the Ammann-Beenker vertex set.
    ammann_perfect(rmax: float | None = None, order: int | None = None)
        Empirical shelling of the perfect periodic approximant.
    ammann_random(...)
        Empirical shelling of the thermalised random tiling.
    compare_perfect_random(...)
        Exact, perfect-approximant and random-tiling values side by side.
    update_settings(settings_change: dict)
        Updates the settings after construction.
    """

    def __init__(self, custom_settings: dict | None = None, save_changes: bool = False) -> None:
        self._settings = shellingConfig().load_settings()
        if custom_settings is not None:
            self.update_settings(custom_settings, save_changes=save_changes)

    @property
    def settings(self) -> dict:
        return self._settings

    def update_settings(self, settings_change: dict, save_changes: bool = True) -> None:
        """
        Update settings of the shellingCalculator instance with new values.

        Parameters
        ----------
        settings_change : dict
            Dictionary with a subset of the sections central, chain, penrose,
            ammann, ammann_random, output, threads and logging; within a
            section only the given keys change, e.g.
            {"ammann_random": {"order": 6, "seed": 7}}
        save_changes : bool
            Flag whether to save the adjusted settings in the users settings file.
            default = True

        Examples
        --------
        >>> sc = shellingCalculator()
        >>> sc.update_settings({"penrose": {"rmax": 4.0}}, save_changes=False)
        """
        known = {
            "central",
            "chain",
            "penrose",
            "ammann",
            "ammann_random",
            "output",
            "threads",
            "logging",
        }
        for key in settings_change:
            if key not in known:
                raise ValueError(
                    f"the given key: {key} of the settings_change dict "
                    + "is not a valid option, please see the "
                    + "docstring for all valid options"
                )

        new_settings = shellingConfig().config(**settings_change, save_changes=save_changes)

        if new_settings is None:
            self._settings = shellingConfig().load_settings()
        else:
            self._settings = new_settings

    def _workers(self) -> int:
        return _worker_count(self._settings["threads"]["workers"])

    def central(self, mmax: int | None = None) -> shellingResults:
        """
        Central shelling of the square lattice for r^2 = 1..mmax; only shells
        with points are listed.
        """
        mmax = self._settings["central"]["mmax"] if mmax is None else mmax
        if mmax < 1:
            raise ValueError("mmax must be at least 1")
        records = []
        for m in range(1, mmax + 1):
            sigma = central_square_lattice(m)
            if sigma:
                records.append(shellRecord.exact(quadVal(m, 0, SQRT2), quadVal(sigma, 0, SQRT2)))
        return shellingResults(records, "central", RATIONAL)

    def _exact(self, kind: str, section: str, basis: str, rmax: float | None) -> shellingResults:
        rmax = self._settings[section]["rmax"] if rmax is None else rmax
        if rmax <= 0:
            raise ValueError("rmax must be positive")
        records = averaged_shelling(modelSet(kind), rmax, workers=self._workers())
        return shellingResults(records, section, basis)

    def chain(self, rmax: float | None = None) -> shellingResults:
        return self._exact(SILVER, "chain", SQRT2, rmax)

    def penrose(self, rmax: float | None = None) -> shellingResults:
        return self._exact(PENROSE, "penrose", TAU, rmax)

    def ammann(self, rmax: float | None = None) -> shellingResults:
        return self._exact(AMMANN, "ammann", SQRT2, rmax)

    def ammann_perfect(self, rmax: float | None = None, order: int | None = None) -> shellingResults:
        """Empirical shelling of the unrandomised approximant."""
        options = self._settings["ammann_random"]
        rmax = options["rmax"] if rmax is None else rmax
        order = options["order"] if order is None else order
        state = tilingState(build_approximant(order))
        return shellingResults(empirical_shelling(state, rmax), "ammann-perfect", SQRT2)

    def ammann_random(
        self,
        rmax: float | None = None,
        order: int | None = None,
        seed: int | None = None,
        flips_per_vertex: float | None = None,
        replicas: int | None = None,
        detailed_balance: bool | None = None,
    ) -> shellingResults:
        """
        Empirical shelling of thermalised random tilings.

        Parameters not given are taken from the ammann_random settings.

        Returns
        -------
        shellingResults
            Empirical rows keyed by exact r2, averaged over the replicas.
        """
        options = dict(self._settings["ammann_random"])
        given = {
            "rmax": rmax,
            "order": order,
            "seed": seed,
            "flips_per_vertex": flips_per_vertex,
            "replicas": replicas,
            "detailed_balance": detailed_balance,
        }
        options.update({k: v for k, v in given.items() if v is not None})
        base = build_approximant(options["order"])
        records = random_tiling_shelling(
            base,
            options["rmax"],
            seed=options["seed"],
            flips_per_vertex=options["flips_per_vertex"],
            replicas=options["replicas"],
            detailed_balance=options["detailed_balance"],
            workers=self._workers(),
        )
        return shellingResults(records, "ammann-random", SQRT2, seed=options["seed"])

    def compare_perfect_random(
        self,
        rmax: float | None = None,
        order: int | None = None,
        seed: int | None = None,
        flips_per_vertex: float | None = None,
        replicas: int | None = None,
    ) -> pd.DataFrame:
        """
        Exact, perfect-approximant and random-tiling shelling numbers on a
        common exact r2 index.

        Returns
        -------
        pandas.DataFrame
            Columns r2_a, r2_b, r_float, sigma_exact, sigma_perfect and
            sigma_random; missing shells are 0. Shells with sigma_exact equal
            to 0 are those the random tiling adds.
        """
        rmax = self._settings["ammann_random"]["rmax"] if rmax is None else rmax
        exact = self.ammann(rmax)
        perfect = self.ammann_perfect(rmax, order)
        random = self.ammann_random(rmax, order, seed, flips_per_vertex, replicas)
        table = exact.compare(perfect).rename(columns={"sigma": "sigma_exact", "sigma_other": "sigma_perfect"})
        random_table = exact.compare(random)[["r2_a", "r2_b", "r_float", "sigma_other"]]
        table = table[["r2_a", "r2_b", "r_float", "sigma_exact", "sigma_perfect"]].merge(
            random_table.rename(columns={"sigma_other": "sigma_random"}),
            on=["r2_a", "r2_b"],
            how="outer",
            suffixes=("", "_random"),
        )
        table["r_float"] = table["r_float"].fillna(table["r_float_random"])
        table = table.drop(columns=["r_float_random"]).fillna(0.0)
        logger.info("compared %d shells", len(table))
        return table.sort_values("r_float", kind="mergesort").reset_index(drop=True)
