from lindbladcraft.vqs.ansatz import (
    AnsatzCatalog,
    FixedGate,
    HvaAnsatz,
    hva_from_model,
    load_ansatz_file,
    measured_strings,
    tfim_ansatz,
)
from lindbladcraft.vqs.mclachlan import (
    ShotNoise,
    VariationalState,
    assemble_m_v,
    derivative_state,
    derivative_states,
    mclachlan_step,
    solve_metric,
    statevector,
)
from lindbladcraft.vqs.trajectory import run_vqs_ensemble, vqs_trajectory

__all__ = (
    "AnsatzCatalog",
    "FixedGate",
    "HvaAnsatz",
    "ShotNoise",
    "VariationalState",
    "assemble_m_v",
    "derivative_state",
    "derivative_states",
    "hva_from_model",
    "load_ansatz_file",
    "mclachlan_step",
    "measured_strings",
    "run_vqs_ensemble",
    "solve_metric",
    "statevector",
    "tfim_ansatz",
    "vqs_trajectory",
)
