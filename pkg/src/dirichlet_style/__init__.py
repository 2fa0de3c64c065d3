"""One-shot photorealistic style transfer with a sparse Dirichlet autoencoder."""

from importlib import resources

from .config import TrainConfig
from .imageio import load_image, save_image
from .pipeline import (
    Checkpoint,
    export_abundance,
    load_checkpoint,
    save_checkpoint,
    stylize,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Checkpoint",
    "TrainConfig",
    "bundled_pair",
    "export_abundance",
    "load_checkpoint",
    "load_image",
    "save_checkpoint",
    "save_image",
    "stylize",
    "train",
]


def bundled_pair():
    """The 128 px synthetic (content, style) landscape pair shipped with the package."""
    data = resources.files(__package__) / "data"
    with resources.as_file(data / "content.png") as c, resources.as_file(data / "style.png") as s:
        return load_image(c), load_image(s)
