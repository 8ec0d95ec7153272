from lindbladcraft.config.loader import get_file_config, get_preset_config, preset_names
from lindbladcraft.config.models import EnsembleSpec, ModelSpec, OutputSpec, RunConfig, VqsSpec

__all__ = (
    "EnsembleSpec",
    "ModelSpec",
    "OutputSpec",
    "RunConfig",
    "VqsSpec",
    "get_file_config",
    "get_preset_config",
    "preset_names",
)
