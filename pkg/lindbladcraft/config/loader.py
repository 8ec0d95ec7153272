import json
import logging
from pathlib import Path
from threading import Lock

from lindbladcraft.config.models import RunConfig
from lindbladcraft.errors import ConfigError

config_lock = Lock()

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"


def get_file_config(filepath: str | Path) -> RunConfig | None:
    with config_lock:
        try:
            with open(filepath) as f:
                json_loaded = json.load(f)
                config = RunConfig(**json_loaded)
                logging.info(f"Nb schemes: {len(config.schemes)}")
                return config
        except FileNotFoundError:
            logging.error(f"File {filepath} not found")
            return None
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON in {filepath}: {e}") from e


def preset_names() -> list[str]:
    return sorted(path.stem for path in PRESET_DIR.glob("*.json"))


def get_preset_config(name: str) -> RunConfig:
    path = PRESET_DIR / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"No preset named {name!r}; available: {preset_names()}")
    config = get_file_config(path)
    if config is None:
        raise ConfigError(f"Preset {name!r} could not be loaded")
    return config
