from lindbladcraft.models.catalog import ModelCatalog, ModelEntry
from lindbladcraft.models.fmo import FmoParameters, build_fmo, fmo_initial_state
from lindbladcraft.models.io import load_model_file
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.models.qubit import build_damped_qubit, build_dephasing_qubit
from lindbladcraft.models.rpm import RpmParameters, build_rpm, rpm_initial_state
from lindbladcraft.models.states import InitialState
from lindbladcraft.models.tfim import build_tfim, tfim_initial_state

__all__ = (
    "FmoParameters",
    "InitialState",
    "LindbladModel",
    "ModelCatalog",
    "ModelEntry",
    "RpmParameters",
    "build_damped_qubit",
    "build_dephasing_qubit",
    "build_fmo",
    "build_rpm",
    "build_tfim",
    "fmo_initial_state",
    "load_model_file",
    "rpm_initial_state",
    "tfim_initial_state",
)
