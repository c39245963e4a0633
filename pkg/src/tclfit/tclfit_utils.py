# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from math import pi
from os import environ
from typing import TYPE_CHECKING, TypedDict

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence
    from typing import TypeVar

    T = TypeVar("T")
    R = TypeVar("R")

FILE_NAME_CONFIG = "config.toml"
SCHEMA_VERSION = 1

# Internal units: time in us, rates in 1/us, frequencies in rad/us.
MHZ_TO_ANGULAR = 2.0 * pi
GHZ_TO_ANGULAR = 2.0 * pi * 1000.0

# Tomography inputs carry shot noise, arithmetic results only rounding.
RAW_HERMITIAN_TOLERANCE = 1e-8
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-10
RENORMALIZATION_THRESHOLD = 1e-9


class TclfitSettings:
    SHARE_PATH_STR: str = "/usr/share"
    SYSCONF_PATH_STR: str = "/etc"
    VERSION: str = "0.1.0"


class SettingFieldMetadata(TypedDict):
    pretty_name: str
    description: str


def default_thread_count() -> int:
    try:
        return max(1, int(environ["TCLFIT_THREADS"]))
    except KeyError:
        return 1
    except ValueError:
        return 1


def chunked_map(
    function: Callable[[Sequence[T]], list[R]],
    items: Sequence[T],
    threads: int = 1,
) -> list[R]:
    """Apply function to contiguous chunks of items.

    Results are concatenated in item order whatever the thread count.
    """
    if threads <= 1 or len(items) <= 1:
        return function(items)

    n_chunks = min(threads, len(items))
    bounds = [len(items) * index // n_chunks for index in range(n_chunks + 1)]
    chunks = [items[start:stop] for start, stop in zip(bounds, bounds[1:])]
    with ThreadPoolExecutor(max_workers=n_chunks) as executor:
        results = list(executor.map(function, chunks))

    return [result for chunk_result in results for result in chunk_result]
