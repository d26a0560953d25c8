"""Texture-smoothing adversarial examples: Gabor smoothing, perceptual constraints, black-box evaluation."""

from ._core import (
    __version__,
    apply_defense,
    default_config,
    extract_texture,
    gabor_kernel,
    glcm,
    linf,
    load_image,
    mse,
    run_attack,
    save_image,
    search,
    smooth,
    ssim,
    surrogate_predict,
    texture_diff,
    to_luma,
    train_surrogate,
)

__all__ = [
    "__version__",
    "apply_defense",
    "default_config",
    "extract_texture",
    "gabor_kernel",
    "glcm",
    "linf",
    "load_image",
    "mse",
    "run_attack",
    "save_image",
    "search",
    "smooth",
    "ssim",
    "surrogate_predict",
    "texture_diff",
    "to_luma",
    "train_surrogate",
]
