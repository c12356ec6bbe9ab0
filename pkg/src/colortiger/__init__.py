"""Unsupervised two-center illuminant estimation for color constancy."""

from .cluster import ClusterModel, TrimConfig, spherical_kmeans, trim
from .core import (
    Chromaticity,
    LinearImage,
    angular_distance,
    apply_white_balance,
    normalize,
    pairwise_angles,
    rb_chromaticity,
)
from .data import (
    CubeProfile,
    DatasetManifest,
    ManifestEntry,
    SynthConfig,
    kfold,
    load_manifest,
    preprocess,
    synth_dataset,
)
from .estimators import gray_world, shades_of_gray, sog_sweep, white_patch
from .metrics import (
    ErrorSummary,
    Histogram,
    SaeResult,
    angular_errors,
    nearest_angle_histogram,
    sets_angular_error,
    summarize,
)
from .tiger import (
    BengalModel,
    GainTriplet,
    TigerModel,
    apply_color_bengal_tiger,
    apply_color_tiger,
    learn_gains,
    load_model,
    save_model,
    train_color_bengal_tiger,
    train_color_tiger,
)

__version__ = "0.1.0"

__all__ = [
    "BengalModel",
    "Chromaticity",
    "ClusterModel",
    "CubeProfile",
    "DatasetManifest",
    "ErrorSummary",
    "GainTriplet",
    "Histogram",
    "LinearImage",
    "ManifestEntry",
    "SaeResult",
    "SynthConfig",
    "TigerModel",
    "TrimConfig",
    "angular_distance",
    "angular_errors",
    "apply_color_bengal_tiger",
    "apply_color_tiger",
    "apply_white_balance",
    "gray_world",
    "kfold",
    "learn_gains",
    "load_manifest",
    "load_model",
    "nearest_angle_histogram",
    "normalize",
    "pairwise_angles",
    "preprocess",
    "rb_chromaticity",
    "save_model",
    "sets_angular_error",
    "shades_of_gray",
    "sog_sweep",
    "spherical_kmeans",
    "summarize",
    "synth_dataset",
    "train_color_bengal_tiger",
    "train_color_tiger",
    "trim",
    "white_patch",
]
