"""Binary segmentation with a squared-perimeter-to-area compactness prior."""
from ._backend import NAME as backend
from .fields import EmptyRegion, inner_product, threshold
from .kernels import (
    GaussianKernel,
    calibrate_perimeter_constant,
    convolve_zero_pad,
    make_gaussian_kernel,
    td_boundary_measure,
)
from .pd import (
    SolveReport,
    SolverConfig,
    energy_value,
    lagrangian_value,
    run_pdstd,
    run_pdtd,
    std_layer_forward,
)
from .admm import AdmmConfig, run_admm
from .metrics import compactness, dice, iou

__version__ = "0.1.0"
