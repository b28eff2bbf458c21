"""Exact computations for the triadic Cantor wavelet system.

Subpackages cover sparse exact Laurent arithmetic (:mod:`cantorwave.laurent`),
the transfer operator on Fourier coefficients (:mod:`cantorwave.transfer`),
the cell model of the Cantor multiresolution (:mod:`cantorwave.cantor`),
the explicit square-summable transfer fixed point
(:mod:`cantorwave.fixedpoint`) and random walks on the associated solenoid
(:mod:`cantorwave.solenoid`).  The ``cantorwave`` console script exposes the
verification commands.
"""

from .laurent import (LaurentPoly, RatC, autocorrelation, evaluate,
                      haar_integral, inner_product)
from .transfer import (ConvergenceReport, Filter, cantor_filter,
                       composite_filter, constant_one_filter, haar_filter,
                       iterate_to_invariant, qmf_check, weight_poly,
                       weighted_energy)
from .cantor import (Cell, CellFunction, cascade, cascade_divergence, chi_C,
                     correlation, detail_basis, dilate, dilate_inverse, inner,
                     mra_project, norm_sq, pi_apply, refine,
                     refinement_nullspace, scale_sqrt2, translate)
from .fixedpoint import (CantorFixedSequence, build_sequence, energy_growth,
                         fixed_point_residual, l1_exclusion_probe,
                         monotone_tail_check, monotone_tail_profile)
from .solenoid import (CircleSystem, CocycleReport, ErgodicityVerdict,
                       MonteCarloEstimate, PathSample, Point, SolenoidSystem,
                       TransitionWeights, TwoCircleSystem, cantor_system,
                       cocycle_limit, component_indicator,
                       ergodicity_diagnostic, mu_infinity_integral,
                       sample_path, sample_paths, transition_weights,
                       tree_expectation, unit_circle_system)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
