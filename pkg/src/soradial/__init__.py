"""Radial Laplacian, Weyl characters and spectral tools for class functions on SO(n)."""
from .ambient import (embedded_laplacian, group_laplacian, haar_sample, skew_basis,
                      tangent_projection, verify_fonda)
from .characters import CharacterFunction, character, character_complex, dimension, pi_n
from .errors import (FormMismatch, GridMismatch, GridTooCoarse, IncompatibleRHS, NotARotation,
                     NotClassFunction, NotDominant, NumericalDegeneracy, SingularPoint,
                     SORadialError)
from .quadrature import ClassFunctionGrid, QuadratureGrid, inner_product, integrate_class, l2_norm
from .radial import (FORMS, TorusFunction, apply_radial_laplacian, density_gradient, density_u,
                     normalization_audit, radial_laplacian_forms, weyl_density)
from .solver import SpectralExpansion, expand, reconstruct, solve_poisson
from .torus import (GroupDim, TorusAngles, block_rotation, canonicalize, extract_angles,
                    weyl_generators, weyl_group)
from .weights import (DominantWeight, SpectralLine, casimir_eigenvalue, enumerate_dominant,
                      weyl_dimension)

__version__ = "0.1.0"
