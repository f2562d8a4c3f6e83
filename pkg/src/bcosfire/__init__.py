"""Trainable bar-selective filters for line delineation in images.

Configure a filter from a synthetic prototype bar, apply it rotation-
tolerantly, threshold the response into a binary line map, and evaluate
against ground truth with MCC-based threshold selection.
"""

from .backend import BACKEND
from .bench import (BenchReport, DatasetEntry, DatasetSpec,
                    configure_from_params, read_dataset_file, run_benchmark)
from .configure import (CosfireModel, FilterParams, SubUnit, configure_filter,
                        load_model, make_prototype_bar, make_subunit,
                        rotate_model, save_model)
from .dog import CENTER_OFF, CENTER_ON, DogKernel, dog_response, make_dog
from .errors import (BcosfireError, ConfigurationError, FormatError,
                     ParameterError, SizeMismatchError)
from .evaluate import (ConfusionCounts, MetricSet, best_threshold_per_dataset,
                       best_threshold_per_image, confusion, mean_metrics,
                       metrics, metrics_csv, threshold)
from .imgio import (BinaryMask, GrayImage, invert, load_image, load_mask,
                    normalize, save_image)
from .respond import (ResponseMap, filter_response, normalize_response,
                      rotation_tolerant_response, subunit_response)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BcosfireError",
    "BenchReport",
    "BinaryMask",
    "CENTER_OFF",
    "CENTER_ON",
    "ConfigurationError",
    "ConfusionCounts",
    "CosfireModel",
    "DatasetEntry",
    "DatasetSpec",
    "DogKernel",
    "FilterParams",
    "FormatError",
    "GrayImage",
    "MetricSet",
    "ParameterError",
    "ResponseMap",
    "SizeMismatchError",
    "SubUnit",
    "best_threshold_per_dataset",
    "best_threshold_per_image",
    "configure_filter",
    "configure_from_params",
    "confusion",
    "dog_response",
    "filter_response",
    "invert",
    "load_image",
    "load_mask",
    "load_model",
    "make_dog",
    "make_prototype_bar",
    "make_subunit",
    "mean_metrics",
    "metrics",
    "metrics_csv",
    "normalize",
    "normalize_response",
    "read_dataset_file",
    "rotate_model",
    "rotation_tolerant_response",
    "run_benchmark",
    "save_image",
    "save_model",
    "subunit_response",
    "threshold",
]
