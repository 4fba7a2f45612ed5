"""Momentum-anticorrelated pair decay: waves, trajectories, imaging, shells."""

from .wavecore import (DecayParams, GridSpec, PairState, PairWave, PeakReport,
                       WaveVariant, density_peak_check, eval_pair_wave,
                       limit_wave, make_pair_wave, pair_velocity, reduced_mass,
                       regularized_wave)
from .trajectories import (ClosedFormSpec, Trajectory, closed_form_from_state,
                           closed_form_pair, integrate_pair, integrate_pair_batch,
                           read_trajectory_csv, separation_scale,
                           straightness_measure, write_trajectory_csv)
from .ensemble import (AngularDeviationReport, ConeReport, ConeSpec,
                       EnsembleSpec, HeisenbergReport, PairEnsemble,
                       VarianceReport, angular_deviation, collective_variance,
                       collective_variance_analytic, cone_probability_check,
                       heisenberg_product, propagate, sample_equilibrium,
                       sample_momenta)
from .regime import (AngleAsymptotes, RegimeInput, TransitionReport,
                     alignment_transition, angle_asymptotes, parse_length)
from .imaging import (ApertureMask, Disk, DoubleSlit, GaussianBeam, GhostImage,
                      LensSetup, Slit, SphericalWave, beam_trajectory,
                      collapse_to_detection, conditional_packet,
                      ghost_image_scan, lens_image_point, thin_lens_conjugate,
                      transverse_basis)
from .energyshell import (BandEdges, ConvolutionGrid, ConvolutionReport,
                          EnergyBand, RadialProfile, band_current_check,
                          band_edges, bessel_j0, bessel_j1, bessel_j2,
                          energy_band_convolution, g_profile, h_alpha_for_fwhm,
                          h_profile)
from .packets import GaussianPacket, lens_kick, multiply_packets
from . import errors

__version__ = "0.1.0"
