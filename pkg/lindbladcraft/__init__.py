__version__ = "1.0.0"
__all__ = (
    "__version__",
    "LindbladCraft",
)

import logging

from lindbladcraft.lindbladcraft import LindbladCraft

logger = logging.getLogger("lindbladcraft")
logger.addHandler(logging.NullHandler())
