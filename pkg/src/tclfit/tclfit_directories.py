# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from dataclasses import dataclass, field
from os import environ
from pathlib import Path
from tomllib import TOMLDecodeError
from tomllib import load as toml_load
from typing import TYPE_CHECKING

from xdg.BaseDirectory import xdg_config_home

from .exceptions import InvalidConfigError, TclfitUsageError
from .tclfit_utils import FILE_NAME_CONFIG, TclfitSettings

if TYPE_CHECKING:
    from collections.abc import Generator
    from typing import Any

    PathGeneratorType = Generator[Path, None, None]

UsrSharePath = Path(TclfitSettings.SHARE_PATH_STR)
SysConfPath = Path(TclfitSettings.SYSCONF_PATH_STR)

PackageConfigsPath = UsrSharePath / "tclfit"
SystemConfigsPath = SysConfPath / "tclfit"
UserConfigDir = Path(xdg_config_home) / "tclfit"


def _load_table(path: Path) -> dict[str, Any]:
    with open(path, mode="rb") as f:
        try:
            return toml_load(f)
        except TOMLDecodeError as e:
            raise InvalidConfigError(f"Invalid TOML in {path}: {e}") from e


@dataclass
class TclfitProfile:
    """Preset flag values for the subcommands.

    Tables are named after subcommands; the system table only feeds
    synth, fit reads the system from its dataset.
    """

    description: str = ""
    system: dict[str, Any] = field(default_factory=dict)
    synth: dict[str, Any] = field(default_factory=dict)
    fit: dict[str, Any] = field(default_factory=dict)

    def options_for(self, subcommand: str) -> dict[str, Any]:
        match subcommand:
            case "synth":
                options = dict(self.system)
                options.update(self.synth)
                return options
            case "fit":
                return dict(self.fit)
            case _:
                return {}


class TclfitDirectories:

    @classmethod
    def iter_config_dirs(cls) -> PathGeneratorType:
        try:
            conf_directories = environ["TCLFIT_CONFDIRS"]
        except KeyError:
            yield UserConfigDir
            yield SystemConfigsPath
            yield PackageConfigsPath
            return

        yield from (Path(x) for x in conf_directories.split(":") if x)

    @classmethod
    def iter_profile_directories(cls) -> PathGeneratorType:
        for conf_dir in cls.iter_config_dirs():
            yield conf_dir / "profiles"

    @classmethod
    def iter_profile_names(cls) -> Generator[str, None, None]:
        seen: set[str] = set()
        for profiles_directory in cls.iter_profile_directories():
            try:
                profile_files = sorted(profiles_directory.iterdir())
            except FileNotFoundError:
                continue

            for profile_file in profile_files:
                if profile_file.suffix != ".toml" or profile_file.stem in seen:
                    continue

                seen.add(profile_file.stem)
                yield profile_file.stem

    @classmethod
    def profile_get(cls, profile_name: str) -> TclfitProfile:
        profile_file_name = profile_name + ".toml"
        for profiles_directory in cls.iter_profile_directories():
            possible_profile_path = profiles_directory / profile_file_name

            try:
                table = _load_table(possible_profile_path)
            except FileNotFoundError:
                continue

            try:
                return TclfitProfile(**table)
            except TypeError as e:
                raise InvalidConfigError(
                    f"Profile {possible_profile_path} has unknown tables: {e}"
                ) from e

        raise TclfitUsageError(
            f"Profile {profile_name} not found, available: "
            f"{', '.join(cls.iter_profile_names()) or 'none'}"
        )

    @classmethod
    def config_get(cls, config_path: Path | None = None) -> dict[str, Any]:
        """Subcommand defaults from config.toml.

        An explicit path must exist; otherwise the first config file
        found in the configuration directories is used.
        """
        if config_path is not None:
            try:
                return _load_table(config_path)
            except FileNotFoundError:
                raise TclfitUsageError(
                    f"--config: file {config_path} does not exist"
                ) from None

        for conf_dir in cls.iter_config_dirs():
            try:
                return _load_table(conf_dir / FILE_NAME_CONFIG)
            except FileNotFoundError:
                continue

        return {}
