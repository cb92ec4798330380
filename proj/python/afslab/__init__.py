"""afslab: bilinear LC/GC-MS simulation, AFS mapping, L_x-norm surfaces and
penalized MCR-ALS. Thin wrapper over the C++ core."""

from afslab._core import (  # noqa: F401
    AfsGrid,
    AfsLabConfigError,
    AfsLabNumericError,
    Dataset,
    EmgParams,
    GridSpec,
    InitMethod,
    McrResult,
    NormSurface,
    PenaltySpec,
    SimplexOptions,
    SpectrumSpec,
    SvdFactor,
    afs_grid_2comp,
    afs_grid_3comp,
    assemble_dataset,
    auto_grid_bounds,
    elastic_net,
    emg_peak,
    feasibility,
    initial_estimate,
    lx_norm,
    make_spectrum,
    mcr_als,
    nelder_mead,
    nnls,
    norm_surface,
    ols,
    realize_T,
    rotate,
    scenario_dataset,
    ssq,
    sweep_x,
    true_rotation_points,
    truncated_svd,
)

__all__ = [name for name in dir() if not name.startswith("_")]
