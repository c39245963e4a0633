# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
from __future__ import annotations

import logging
from csv import writer as csv_writer
from dataclasses import dataclass
from pathlib import Path
from re import sub as re_sub
from typing import TYPE_CHECKING

import numpy as np

from .calibrate import FitResult, baseline_model, evaluate_model
from .exceptions import TclfitUsageError
from .operators import state_coordinates

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from .calibrate import Evaluation
    from .dataset import Dataset
    from .operators import ComplexArray

LOGGER = logging.getLogger(__name__)

BASELINE_LABEL = "Baseline"
NO_PARAMETERIZATION = "-"
FILE_NAME_METRICS = "metrics.csv"

METRICS_HEADER = (
    "master_equation",
    "parameterization",
    "interpolation_mean",
    "interpolation_std",
    "extrapolation_mean",
    "extrapolation_std",
)

# Row order of the metrics table
MASTER_EQUATION_ORDER = (BASELINE_LABEL, "Lindblad", "Linear TCL", "Nonlinear TCL")


@dataclass(frozen=True)
class ReportRow:
    master_equation: str
    parameterization: str
    evaluation: Evaluation

    @property
    def slug(self) -> str:
        words = f"{self.master_equation} {self.parameterization}"
        return re_sub(r"[^a-z0-9]+", "-", words.lower()).strip("-")

    def metrics_cells(self) -> list[str]:
        metrics = self.evaluation.metrics.as_dict()
        return [
            self.master_equation,
            self.parameterization,
            *(f"{metrics[x]:.6g}" for x in METRICS_HEADER[2:]),
        ]


@dataclass(frozen=True)
class ReportBundle:
    directory: Path
    metrics: Path
    series: tuple[Path, ...]
    histograms: tuple[Path, ...]


def _row_for_result(
    result: FitResult,
    dataset: Dataset,
    t_train: float | None,
    dt: float | None,
) -> ReportRow:
    evaluation = result.evaluation
    if evaluation is None or (t_train is not None and evaluation.t_train != t_train):
        evaluation = evaluate_model(result.model, dataset, t_train, dt)

    master_equation = result.model.master_equation
    if result.label == BASELINE_LABEL:
        master_equation = BASELINE_LABEL

    if master_equation in (BASELINE_LABEL, "Lindblad"):
        parameterization = NO_PARAMETERIZATION
    else:
        parameterization = result.parameterization

    return ReportRow(master_equation, parameterization, evaluation)


def _ordered(rows: Iterable[ReportRow]) -> list[ReportRow]:
    def key(row: ReportRow) -> int:
        try:
            return MASTER_EQUATION_ORDER.index(row.master_equation)
        except ValueError:
            return len(MASTER_EQUATION_ORDER)

    return sorted(rows, key=key)


def _unique_slugs(rows: Sequence[ReportRow]) -> list[str]:
    slugs: list[str] = []
    for row in rows:
        slug = row.slug or "model"
        candidate = slug
        counter = 2
        while candidate in slugs:
            candidate = f"{slug}-{counter}"
            counter += 1
        slugs.append(candidate)
    return slugs


def coordinate_names(dim: int) -> list[str]:
    if dim == 2:
        return ["x", "y", "z"]
    return [f"g{index}" for index in range(1, dim * dim)]


def _coordinates(states: ComplexArray) -> np.ndarray:
    return np.asarray(state_coordinates(states))[..., 1:]


def write_metrics(rows: Sequence[ReportRow], path: Path) -> None:
    with open(path, mode="w", newline="") as f:
        table = csv_writer(f)
        table.writerow(METRICS_HEADER)
        for row in rows:
            table.writerow(row.metrics_cells())


def write_series(row: ReportRow, directory: Path, dim: int) -> list[Path]:
    names = coordinate_names(dim)
    header = [
        "t_us",
        *(f"measured_{x}" for x in names),
        *(f"predicted_{x}" for x in names),
        "trace_distance",
    ]
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for series in row.evaluation.series:
        measured = _coordinates(series.measured)
        predicted = _coordinates(series.predicted)
        path = directory / f"{series.experiment_id}.csv"
        with open(path, mode="w", newline="") as f:
            table = csv_writer(f)
            table.writerow(header)
            for index, t in enumerate(series.times):
                table.writerow(
                    [
                        f"{t:.9g}",
                        *(f"{x:.9g}" for x in measured[index]),
                        *(f"{x:.9g}" for x in predicted[index]),
                        f"{series.distances[index]:.9g}",
                    ]
                )
        paths.append(path)
    return paths


def write_histogram(row: ReportRow, path: Path) -> None:
    evaluation = row.evaluation
    edges = evaluation.bin_edges
    with open(path, mode="w", newline="") as f:
        table = csv_writer(f)
        table.writerow(
            ("bin_lower", "bin_upper", "interpolation_count", "extrapolation_count")
        )
        for index in range(len(edges) - 1):
            table.writerow(
                (
                    f"{edges[index]:.4f}",
                    f"{edges[index + 1]:.4f}",
                    int(evaluation.interp_histogram[index]),
                    int(evaluation.extrap_histogram[index]),
                )
            )


def emit_report(
    results: Sequence[FitResult],
    dataset: Dataset,
    path: Path | str,
    include_baseline: bool = True,
    t_train: float | None = None,
    dt: float | None = None,
) -> ReportBundle:
    """Write the metrics table, Bloch series and histograms under path.

    A baseline row is added for qubit datasets unless one of the results
    already is the baseline.
    """
    if not results:
        raise TclfitUsageError("A report needs at least one fit result")

    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)

    rows = [_row_for_result(x, dataset, t_train, dt) for x in results]
    has_baseline = any(x.master_equation == BASELINE_LABEL for x in rows)
    if include_baseline and not has_baseline and dataset.system.dim == 2:
        rows.append(
            ReportRow(
                BASELINE_LABEL,
                NO_PARAMETERIZATION,
                evaluate_model(baseline_model(dataset.system), dataset, t_train, dt),
            )
        )

    rows = _ordered(rows)
    metrics_path = directory / FILE_NAME_METRICS
    write_metrics(rows, metrics_path)

    series_paths: list[Path] = []
    histogram_paths: list[Path] = []
    for row, slug in zip(rows, _unique_slugs(rows)):
        series_paths.extend(
            write_series(row, directory / "series" / slug, dataset.system.dim)
        )
        histogram_path = directory / "histograms" / f"{slug}.csv"
        histogram_path.parent.mkdir(parents=True, exist_ok=True)
        write_histogram(row, histogram_path)
        histogram_paths.append(histogram_path)

    LOGGER.info("Wrote report of %d rows to %s", len(rows), directory)
    return ReportBundle(
        directory=directory,
        metrics=metrics_path,
        series=tuple(series_paths),
        histograms=tuple(histogram_paths),
    )
