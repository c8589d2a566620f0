"""Exact-diagonalization laboratory for entropy scaling in spin-1/2 chains."""
from .basis import SpinBasis, basis_from_tag, enumerate_sector, index_of, indices_of
from .config import EXPERIMENTS, RunConfig, parse_config, read_config_file
from .entropy import (
    QGibbsResult,
    SubadditivityReport,
    check_subadditivity,
    q_boltzmann,
    q_gibbs,
    shannon,
    von_neumann,
)
from .errors import (
    ConfigError,
    EntroscopeError,
    NumericsError,
    SpectrumChecksumError,
    SpectrumFormatError,
    StorageError,
)
from .experiments import (
    DegeneracyCensus,
    EigenketScan,
    FitResult,
    ShellTable,
    VolumeLawTable,
    degeneracy_census,
    fit_entropy_vs_lndos,
    run_eigenket_scan,
    run_shell_average,
    run_volume_law,
    subsystem_entropies,
)
from .hamiltonian import (
    ModelParams,
    SymmetricOperator,
    build_full_hamiltonian,
    build_hamiltonian,
)
from .properties import PropertyResult, format_tap, run_property_suite
from .spectral import (
    DosTable,
    EnergyShell,
    Spectrum,
    degenerate_multiplets,
    diagonalize,
    diagonalize_model,
    load_spectrum,
    multiplet_flags,
    partition_shells,
    save_spectrum,
    spectrum_cache_path,
)
from .states import (
    BipartitionSpec,
    DensityMatrix,
    StateVector,
    averaged_rdm,
    embed_sector_state,
    fit_gibbs_beta,
    gibbs,
    measure,
    microcanonical,
    mix,
    partial_trace,
    partial_trace_bath,
    pure_density,
    random_decomposition,
    random_density,
    random_orthonormal_basis,
    random_pure,
    random_unitary,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
