"""Dataset harness: configure, respond, segment, evaluate, report.

A dataset file is UTF-8 text: header lines ``@name <text>``,
``@invert true|false``, ``@mode per-image|per-dataset``, then one entry per
line: ``<image> <gt> [mask]`` with paths relative to the file. Timing
covers the response stage only (DoG + sub-units + orientation pooling).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .configure import (CosfireModel, FilterParams, configure_filter,
                        make_prototype_bar)
from .dog import CENTER_ON
from .errors import BcosfireError, FormatError, ParameterError
from .evaluate import (MetricSet, _sweep_counts, _mcc_curve, _metrics_at,
                       THRESHOLD_GRID, best_threshold_per_image, mean_metrics,
                       metrics_csv)
from .imgio import BinaryMask, GrayImage, invert, load_image, load_mask
from .respond import ResponseMap, normalize_response, rotation_tolerant_response

import numpy as np

THRESHOLD_MODES = ("per-image", "per-dataset")

# synthetic prototype used when configuring from parameters alone
DEFAULT_BAR_WIDTH = 5.0


@dataclass(frozen=True)
class DatasetEntry:
    image: Path
    gt: Path
    mask: Optional[Path] = None


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    entries: tuple[DatasetEntry, ...]
    params: FilterParams
    threshold_mode: str = "per-image"
    invert_input: bool = False

    def __post_init__(self):
        if not self.entries:
            raise ParameterError("dataset has no entries")
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ParameterError(f"unknown threshold mode {self.threshold_mode!r}")


@dataclass
class EntryResult:
    name: str
    threshold: float = 0.0
    metrics: Optional[MetricSet] = None
    elapsed_s: float = 0.0
    error: Optional[str] = None
    response: Optional[ResponseMap] = None
    gt: Optional[BinaryMask] = None
    _counts: Optional[np.ndarray] = field(default=None, repr=False)


@dataclass
class BenchReport:
    dataset: str
    threshold_mode: str
    results: list[EntryResult] = field(default_factory=list)
    mean: Optional[MetricSet] = None
    incomplete: bool = False

    def csv(self) -> str:
        """Deterministic CSV; the trailing elapsed column carries timing."""
        ok = [r for r in self.results if r.error is None]
        body = metrics_csv([(r.name, r.threshold, r.metrics) for r in ok])
        lines = body.splitlines()
        lines[0] += ",elapsed_s"
        for i, r in enumerate(ok, start=1):
            lines[i] += f",{r.elapsed_s:.3f}"
        if ok and self.mean is not None:
            m = self.mean
            mean_elapsed = sum(r.elapsed_s for r in ok) / len(ok)
            lines.append(
                f"mean,,{m.tpr:.6f},{m.fpr:.6f},{m.se:.6f},{m.sp:.6f},"
                f"{m.acc:.6f},{m.mcc:.6f},{mean_elapsed:.3f}"
            )
        return "\n".join(lines) + "\n"


def prototype_size(params: FilterParams, width: float = DEFAULT_BAR_WIDTH) -> int:
    """Odd prototype side long enough for the largest circle plus DoG support."""
    margin = math.ceil(max(params.radii) + 3.0 * params.sigma) + 5
    return max(101, 2 * margin + 1)


def configure_from_params(params: FilterParams,
                          bar_width: float = DEFAULT_BAR_WIDTH,
                          size: Optional[int] = None) -> CosfireModel:
    """Configure on a synthetic vertical bar drawn in the polarity's
    preferred contrast."""
    if size is None:
        size = prototype_size(params, bar_width)
    bar = make_prototype_bar(bar_width, math.pi / 2.0, size)
    if params.polarity != CENTER_ON:
        bar = invert(bar)
    return configure_filter(bar, params)


def read_dataset_file(path, params: FilterParams,
                      mode_override: Optional[str] = None) -> DatasetSpec:
    """Parse a dataset description file; entry paths resolve relative to it."""
    path = Path(path)
    base = path.parent
    name = path.stem
    invert_input = False
    mode = "per-image"
    entries = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@"):
            parts = line.split(None, 1)
            key = parts[0]
            value = parts[1].strip() if len(parts) > 1 else ""
            if key == "@name":
                name = value
            elif key == "@invert":
                if value not in ("true", "false"):
                    raise FormatError(f"{path}:{lineno}: @invert must be true or false")
                invert_input = value == "true"
            elif key == "@mode":
                if value not in THRESHOLD_MODES:
                    raise FormatError(f"{path}:{lineno}: @mode must be per-image or per-dataset")
                mode = value
            else:
                raise FormatError(f"{path}:{lineno}: unknown header {key}")
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise FormatError(f"{path}:{lineno}: expected '<image> <gt> [mask]'")
        entries.append(
            DatasetEntry(
                image=base / parts[0],
                gt=base / parts[1],
                mask=base / parts[2] if len(parts) == 3 else None,
            )
        )
    if not entries:
        raise FormatError(f"{path}: dataset file lists no entries")
    return DatasetSpec(
        name=name,
        entries=tuple(entries),
        params=params,
        threshold_mode=mode_override or mode,
        invert_input=invert_input,
    )


def _process_entry(entry: DatasetEntry, spec: DatasetSpec, model: CosfireModel,
                   channel: str, keep_response: bool) -> EntryResult:
    result = EntryResult(name=entry.image.name)
    try:
        img = load_image(entry.image, channel=channel)
        if spec.invert_input:
            img = invert(img)
        gt = load_mask(entry.gt)
        mask = load_mask(entry.mask) if entry.mask else None
        t0 = time.perf_counter()
        resp = rotation_tolerant_response(img, model, spec.params.n_rot)
        result.elapsed_s = time.perf_counter() - t0
        resp = normalize_response(resp)
        if spec.threshold_mode == "per-image":
            result.threshold, result.metrics = best_threshold_per_image(resp, gt, mask)
        else:
            result._counts = _sweep_counts(resp, gt, mask)
        if keep_response:
            result.response = resp
            result.gt = gt
    except (BcosfireError, OSError) as exc:
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def run_benchmark(spec: DatasetSpec, workers: int = 1, channel: str = "green",
                  keep_responses: bool = False) -> BenchReport:
    """Run the full pipeline over a dataset.

    Entries that fail to load are reported and skipped (the report is
    marked incomplete); the run fails only if every entry fails.
    """
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    model = configure_from_params(spec.params)
    report = BenchReport(dataset=spec.name, threshold_mode=spec.threshold_mode)

    if workers == 1:
        results = [
            _process_entry(e, spec, model, channel, keep_responses)
            for e in spec.entries
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda e: _process_entry(e, spec, model, channel, keep_responses),
                    spec.entries,
                )
            )
    report.results = results

    ok = [r for r in results if r.error is None]
    report.incomplete = len(ok) < len(results)
    if not ok:
        raise BcosfireError(
            f"all {len(results)} dataset entries failed; first error: {results[0].error}"
        )
    if spec.threshold_mode == "per-dataset":
        curves = np.stack([_mcc_curve(r._counts) for r in ok])
        k = int(np.argmax(curves.mean(axis=0)))
        for r in ok:
            r.threshold = THRESHOLD_GRID[k]
            r.metrics = _metrics_at(r._counts, k)
    for r in ok:
        r._counts = None
    report.mean = mean_metrics([r.metrics for r in ok])
    return report
