from dataclasses import dataclass

from lindbladcraft.models.fmo import FmoParameters, build_fmo, fmo_initial_state
from lindbladcraft.models.lindblad import LindbladModel
from lindbladcraft.models.qubit import (
    build_damped_qubit,
    build_dephasing_qubit,
    excited_state,
    plus_state,
)
from lindbladcraft.models.rpm import RpmParameters, build_rpm, rpm_initial_state
from lindbladcraft.models.states import InitialState
from lindbladcraft.models.tfim import build_tfim, tfim_initial_state


@dataclass(slots=True, frozen=True)
class ModelEntry:
    model: LindbladModel
    initial: InitialState


def _tfim(n_sites: int = 2, J: float = 1.0, h: float = 1.0, gamma=None) -> ModelEntry:
    return ModelEntry(build_tfim(n_sites, J=J, h=h, gamma=gamma), tfim_initial_state(n_sites))


def _fmo(**params) -> ModelEntry:
    return ModelEntry(build_fmo(FmoParameters(**params)), fmo_initial_state())


def _rpm(**params) -> ModelEntry:
    if "hyperfine" in params:
        params["hyperfine"] = tuple(params["hyperfine"])
    return ModelEntry(build_rpm(RpmParameters(**params)), rpm_initial_state())


def _damping(omega: float = 0.0, gamma: float = 1.0) -> ModelEntry:
    return ModelEntry(build_damped_qubit(omega, gamma), excited_state())


def _dephasing(omega: float = 0.0, gamma: float = 1.0) -> ModelEntry:
    return ModelEntry(build_dephasing_qubit(omega, gamma), plus_state())


class ModelCatalog:
    _builders = {
        "tfim": (_tfim, "damped transverse-field Ising chain (tJ)"),
        "fmo": (_fmo, "3-site FMO complex with ground state and sink (fs)"),
        "rpm": (_rpm, "radical-pair compass model with singlet/triplet shelves (s)"),
        "damping": (_damping, "amplitude-damped qubit"),
        "dephasing": (_dephasing, "dephased qubit"),
    }

    @classmethod
    def names(cls) -> list[str]:
        return list(cls._builders)

    @classmethod
    def describe(cls) -> list[tuple[str, str]]:
        return [(name, description) for name, (_, description) in cls._builders.items()]

    @classmethod
    def build(cls, name: str, **params) -> ModelEntry:
        try:
            builder, _ = cls._builders[name]
        except KeyError:
            raise ValueError(f"No model named {name!r}; available: {cls.names()}") from None
        try:
            return builder(**params)
        except TypeError as e:
            raise ValueError(f"Invalid parameters for {name}: {e}") from e
