"""Adjacent-band RFI simulator: terrestrial 7.125-7.4 GHz deployments vs
passive EESS radiometers in 6.725-7.125 GHz.

Submodules:
    filterbank  - band-pass response, leakage fractions, emission masks
    linkbudget  - slant geometry, path loss, sensor catalog, net gains
    adoption    - Gompertz diffusion model and growth scenarios
    deployment  - county ingestion, BS counts, footprint worst cases
    airlink     - 3GPP UMi street-canyon Monte Carlo channels
    precoder    - RFI-aware minimum-power beamforming
    scenario    - end-to-end aggregate-RFI runs and sweeps
    reports     - deterministic CSV/JSON emission
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    adoption,
    airlink,
    deployment,
    filterbank,
    linkbudget,
    precoder,
    reports,
    scenario,
)
