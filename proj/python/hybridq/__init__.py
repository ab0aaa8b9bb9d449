"""Hybrid classical-quantum GAN: statevector simulation, variational
sub-generators, latent-space adversarial training and FID evaluation."""

from hybridq._core import (
    NoiseConfig,
    StateVector,
    SubGenParams,
    GeneratorParams,
    subgen_forward,
    subgen_jacobian,
    generator_forward,
    extract_features,
    gaussian_stats,
    frechet_distance,
    sym_eig,
    synth_dataset,
    load_ppm,
    save_ppm,
    GanModel,
    load_checkpoint,
    train_toy_model,
    generate_images,
)

__all__ = [
    "NoiseConfig",
    "StateVector",
    "SubGenParams",
    "GeneratorParams",
    "subgen_forward",
    "subgen_jacobian",
    "generator_forward",
    "extract_features",
    "gaussian_stats",
    "frechet_distance",
    "sym_eig",
    "synth_dataset",
    "load_ppm",
    "save_ppm",
    "GanModel",
    "load_checkpoint",
    "train_toy_model",
    "generate_images",
]
