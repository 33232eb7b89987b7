"""
Additive U-Net denoising kit.

A float64 reverse-mode tensor library, the additive / pseudo-additive U-Net
and DnCNN denoisers built on it, and the tooling to train, evaluate and
inspect them.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
