"""Slit mappings, Loewner chains and Cauchy/F-transforms of measures."""

from . import errors
from .cauchy import (DEFAULT_EPS, CircleMeasure, InversionResult, PickNevanlinnaData,
                     TransformGrid, TransformKind, cauchy_transform, check_f_transform,
                     f_transform, herglotz_caratheodory, pick_nevanlinna, stieltjes_invert)
from .characterize import (SlitCase, SlitCurve, SlitVerdict, WeldingMap,
                           check_slit_conditions, extract_welding, locate_atom,
                           reconstruct_slit)
from .hilbert import (hilbert_on_grid, hilbert_pv, hilbert_radial, hilbert_transform,
                      verify_plemelj)
from .loewner import (DrivingFunction, DrivingMode, HerglotzFieldSpec, Interpolation,
                      chain_derivative_jump, chain_initial, evaluate_field, solve_transition)
from .measures import (DensitySegment, LevyTriple, MeasureSpec, arcsine, atomic, bump,
                       convolve_classical, fourier_transform, from_formula, from_samples,
                       levy_khintchine, moment, normal, normalize_levy, point_mass,
                       semicircle, uniform, unique_embedding)
from .monotone import (ConvolutionResult, UnivalenceProbe, monotone_convolve,
                       univalence_probe)
from .zipper import (CapacityRecord, SlitMap, SlitPolyline, capacity_coefficient,
                     decode_driving, encode_slit, hausdorff, random_slit, slit_map_from_driving,
                     slit_to_measure)

__all__ = [name for name in dir() if not name.startswith("_")]
