"""Console configuration."""

from additive_unet.config.i18n import get_message, get_messages

__all__ = ["get_message", "get_messages"]
