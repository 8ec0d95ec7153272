from dataclasses import dataclass

import numpy as np

from lindbladcraft.models.lindblad import LindbladModel, population_observables
from lindbladcraft.models.states import InitialState

HBAR_EV_FS = 0.6582119569

# |0> ground, |1>..|3> sites, |4> sink; eV
FMO_HAMILTONIAN_EV = (
    (0.0, 0.0, 0.0, 0.0, 0.0),
    (0.0, 0.0267, -0.0129, 0.000632, 0.0),
    (0.0, -0.0129, 0.0273, 0.00404, 0.0),
    (0.0, 0.000632, 0.00404, 0.0, 0.0),
    (0.0, 0.0, 0.0, 0.0, 0.0),
)


@dataclass(slots=True)
class FmoParameters:
    alpha: float = 3e-3
    beta: float = 5e-7
    gamma: float = 6.28e-3
    hbar_ev_fs: float = HBAR_EV_FS


def ket(dim: int, i: int):
    v = np.zeros(dim, dtype=np.complex128)
    v[i] = 1.0
    return v


def transition(dim: int, to: int, frm: int):
    return np.outer(ket(dim, to), ket(dim, frm))


def build_fmo(params: FmoParameters | None = None) -> LindbladModel:
    """
    Three-site FMO complex with ground state and sink.

    Seven jump operators: dephasing sqrt(alpha)|i><i| and dissipation sqrt(beta)|0><i| for the
    sites i = 1..3, then the sink sqrt(gamma)|4><3|. The eV Hamiltonian is divided by hbar so
    that time is measured in fs and the rates in 1/fs.
    """
    params = params or FmoParameters()
    dim = 5
    hamiltonian = np.asarray(FMO_HAMILTONIAN_EV, dtype=np.complex128) / params.hbar_ev_fs
    dephasing = [np.sqrt(params.alpha) * transition(dim, i, i) for i in (1, 2, 3)]
    dissipation = [np.sqrt(params.beta) * transition(dim, 0, i) for i in (1, 2, 3)]
    sink = [np.sqrt(params.gamma) * transition(dim, 4, 3)]
    labels = ["ground", "site1", "site2", "site3", "sink"]
    return LindbladModel(
        name="fmo",
        hamiltonian=hamiltonian,
        jump_ops=tuple(dephasing + dissipation + sink),
        observables=population_observables(dim, [f"P{i}" for i in range(dim)]),
        time_unit="fs",
        unit_note=f"H given in eV and divided by hbar = {params.hbar_ev_fs} eV fs; rates in 1/fs",
        basis=tuple(labels),
    )


def fmo_initial_state() -> InitialState:
    return InitialState.basis_state(5, 1)
