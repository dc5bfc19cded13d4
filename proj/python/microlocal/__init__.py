"""2-microlocal Besov and Triebel-Lizorkin norms on the periodic grid."""

from ._core import (  # noqa: F401
    Family,
    SpaceParams,
    band_limited_noise,
    bessel_potential,
    chirp,
    cusp,
    difference_norms,
    equivalence,
    frontier_scan,
    hilbert,
    norm,
    phi_analysis,
    phi_synthesis,
    run_suite,
    sequence_norm,
    wavelet_analysis,
    wavelet_synthesis,
    weierstrass,
)

INF = float("inf")
