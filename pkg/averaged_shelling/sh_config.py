import os

import ruamel.yaml

SETTINGS_DIR = ".shelling"


class shellingConfig:

    def __init__(self):
        pass

    def config(
        self,
        central: dict | None = None,
        chain: dict | None = None,
        penrose: dict | None = None,
        ammann: dict | None = None,
        ammann_random: dict | None = None,
        output: dict | None = None,
        threads: dict | None = None,
        logging: dict | None = None,
        save_changes: bool | None = True,
    ) -> None | dict:
        """Configure the settings for the shelling calculator.

        The adjusted settings will be saved in the .shelling folder in the userdir.
        The settings are in the form of a YAML file and can also be edited manually.

        Parameters
        ----------
        central : dict | None, optional
            Square lattice settings, {'mmax': 16}
            default = None
        chain : dict | None, optional
            Silver mean chain settings, {'rmax': 6.0}
            default = None
        penrose : dict | None, optional
            Penrose settings, {'rmax': 6.08}
            default = None
        ammann : dict | None, optional
            Ammann-Beenker settings, {'rmax': 3.5}
            default = None
        ammann_random : dict | None, optional
            Random tiling settings with the keys rmax, order, seed,
            flips_per_vertex, replicas and detailed_balance
            default = None
        output : dict | None, optional
            Output settings, {'format': 'csv'}
            default = None
        threads : dict | None, optional
            Worker settings, {'workers': 1}
            default = None
        logging : dict | None, optional
            Logging settings, {'level': 'WARNING'}
            default = None
        save_changes: bool | None, optional
            Flag whether the changes to the settings should be saved to file,
            if True changes are saved to file, if False new settings are returned.
            default = True

        Returns
        -------
        None | dict
            the dict with the new settings, or if save_changes is True
            the changes are saved to file and None is returned.

        Notes
        -----
        Only the keys given in a section are changed; a parameter that is None
        leaves its section unchanged.
        """
        changes = {
            "central": central,
            "chain": chain,
            "penrose": penrose,
            "ammann": ammann,
            "ammann_random": ammann_random,
            "output": output,
            "threads": threads,
            "logging": logging,
        }
        old_settings = self.load_settings()
        new_settings = dict()

        for option, change in changes.items():
            new_settings[option] = self._load_and_check_setting(option, old_settings, change)

        if save_changes:
            self._save_settings(new_settings)
        else:
            return new_settings

    def _load_and_check_setting(
        self,
        setting: str,
        old_settings: dict,
        new_setting: dict | None = None,
    ) -> dict:
        """Retrieve a setting, merging a partial change over the old value.

        Parameters
        ----------
        setting : str
            The name of the section to retrieve.
        old_settings : dict
            Dictionary containing existing settings.
        new_setting : dict | None
            the changed keys of the section, if None is supplied the old setting
            will be loaded.
            default = None

        Returns
        -------
        dict
            The section. A section missing from `old_settings` is taken from the
            shipped parameters file.
        """
        if setting in old_settings.keys():
            current = dict(old_settings[setting])
        else:
            current = dict(self.load_settings(original_settings=True)[setting])
        if new_setting is not None:
            unknown = set(new_setting) - set(current)
            if unknown:
                raise ValueError(f"unknown {setting} settings: {', '.join(sorted(unknown))}")
            current.update(new_setting)
        return current

    def reset_settings(self) -> None:
        """Resets the settings to the original parameters file and overwrite
        the user settings.
        """
        self._save_settings(self.load_settings(original_settings=True))

    def _settings_file(self) -> str:
        return os.path.join(os.path.expanduser("~"), SETTINGS_DIR, "parameters.yaml")

    def _save_settings(self, new_settings: dict) -> None:
        """Save the updated settings to `userdir/.shelling/parameters.yaml`."""
        settings_dir = os.path.join(os.path.expanduser("~"), SETTINGS_DIR)
        if not os.path.exists(settings_dir):
            os.mkdir(settings_dir)

        yaml = ruamel.yaml.YAML()
        with open(self._settings_file(), "w+") as parameters:
            yaml.dump(new_settings, parameters)

    def load_settings(self, original_settings: bool = False) -> dict:
        """Loads the settings from the user directory, if the settings do not exist in this
        directory the original parameters are loaded.

        Parameters
        ----------
        original_settings : bool, optional
            Flag indicating whether the original settings should be loaded
            default = False

        Returns
        -------
        dict
            The settings as a dict
        """
        if (not original_settings) and os.path.isfile(self._settings_file()):
            settings_path = self._settings_file()
        else:
            settings_path = os.path.join(os.path.dirname(__file__), "parameters.yaml")

        yaml = ruamel.yaml.YAML(typ="safe")
        with open(settings_path) as parameters:
            settings = yaml.load(parameters)

        return settings
