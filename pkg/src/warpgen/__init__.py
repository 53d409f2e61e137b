"""Single image-pair augmentation toolkit.

Turns one (primitive, image) pair into an unbounded, fully reproducible
training stream of thin-plate-spline warped pairs, with edge/segmentation
primitive encoders and pretrained-network-free fidelity metrics.
"""

from warpgen.core import (
    AugmentConfig,
    ImagePair,
    PrimitiveKind,
    PrimitiveTensor,
    SeedSpec,
    SegmentationMap,
    derive_stream,
    load_image,
    save_image,
)
from warpgen.tps import (
    ControlGrid,
    CropFlipParams,
    TpsModel,
    WarpField,
    apply_crop_flip,
    apply_warp,
    augment_pair,
    evaluate,
    fit_tps,
    rasterize,
    sample_crop_flip,
    sample_warp,
)

__all__ = [
    "AugmentConfig",
    "ControlGrid",
    "CropFlipParams",
    "ImagePair",
    "PrimitiveKind",
    "PrimitiveTensor",
    "SeedSpec",
    "SegmentationMap",
    "TpsModel",
    "WarpField",
    "apply_crop_flip",
    "apply_warp",
    "augment_pair",
    "derive_stream",
    "evaluate",
    "fit_tps",
    "load_image",
    "rasterize",
    "sample_crop_flip",
    "sample_warp",
    "save_image",
]
