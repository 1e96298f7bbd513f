"""Synthesis of Gaussian textures with prescribed local orientation.

Two backends produce the same law: exact Cholesky factorisation of the grid
covariance, and turning bands over exact 1-D fractional Brownian lines.
"""

from .band_plan import Band, BandPlan, bands_in_cone, band_widths, candidate_angles, select_bands
from .cholesky_synth import (cholesky_factor, covariance_matrix, sample_elementary_exact,
                             sample_lafbf_exact)
from .fbm1d import LineProcess, fgn_autocovariance, sample_fbm_line, sample_fbm_line_signed
from .grid import FieldGrid, read_raw, write_pgm, write_raw
from .orientation_fields import (ConstantOrientation, OrientationField, RasterOrientation,
                                 V1Orientation, V2Orientation, eval_v1, eval_v2,
                                 load_orientation_raster, parse_orientation)
from .spectral_model import (ElementaryParams, Window, cone_weight, covariance, gamma_factor,
                             variogram)
from .turning_band_synth import (LineTable, band_weight, build_line_table, synth_elementary_tb,
                                 synth_lafbf, tb_model_covariance)
from .validation import empirical_variogram, estimate_hurst, structure_tensor_orientation

__version__ = "0.1.0"
