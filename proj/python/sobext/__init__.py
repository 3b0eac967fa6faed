"""Discrete Besov energies, minimal W^{2,p} extensions and scaling scans."""

from ._sobext import (
    TREND_NOTE,
    BesovIntegral,
    Box,
    CurveScan,
    DepthProbeReport,
    DomainError,
    DyadicScan,
    EnergyReport,
    Exponents,
    IoError,
    LinearFit,
    NumericalError,
    PiecewiseCurve,
    PlanarSet,
    ResolutionError,
    SlopeData,
    SolveReport,
    StageRecord,
    besov_energy,
    continuous_besov,
    curve_bound_scan,
    curve_subset,
    depth_probe,
    dyadic_scaling_scan,
    generate_dyadic_set,
    hermite_extend,
    inner_ball_count,
    interaction_weight,
    make_exponents,
    rectangle_weight,
    rigidity_constant,
    slope_data,
    solve_problem,
    witness_norm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
