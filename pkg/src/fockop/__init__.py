"""Vector-valued Toeplitz operators on weighted Fock spaces of the plane.

Radius function and admissibility checks for weights, delta-lattices,
truncated reproducing kernels, matrix symbols, Berezin and averaging
transforms, Galerkin Toeplitz matrices and the equivalence harness that
compares them.
"""

from .errors import (ConfigError, ExtrapolationWarning, FockopError, NotHermitianError,
                     NumericalCheckError, ParameterError, RadiusUnboundedError, WeightError)
from .geometry import Box
from .kernel import KernelModel, build_kernel_model, eval_kernel, project, reconstruct
from .lattice import Lattice, build_lattice, partition_separated
from .quadrature import DiskRule, QuadratureGrid
from .symbols import SymbolField, gallery, standard_gallery
from .toeplitz import ToeplitzMatrix, assemble_toeplitz, carleson_norm, spectral_report
from .transforms import averaging_scalar, berezin_scalar, eigenbasis_at
from .weights import RadiusField, Weight, check_admissibility, from_id, gaussian, radial_poly

__version__ = "0.1.0"
