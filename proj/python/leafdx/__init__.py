"""Leaf disease classification pipeline bindings."""

from ._leafdx import (
    LeafdxError,
    features,
    generate_dataset,
    predict,
    rgb_to_ycbcr,
    segment,
    train,
    version,
    ycbcr_to_rgb,
)

__all__ = [
    "LeafdxError",
    "features",
    "generate_dataset",
    "predict",
    "rgb_to_ycbcr",
    "segment",
    "train",
    "version",
    "ycbcr_to_rgb",
]

__version__ = version()
