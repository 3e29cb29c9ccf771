"""Multi-RIS multi-group multicast beamforming simulator."""

from .bd import BdMinRateDesign, algorithm1, bd_beamformer, null_space
from .channel import (ChannelSet, GeometryError, draw_user_positions, los_angles,
                      path_loss, synth_link, synth_trial, upa_response)
from .config import (ConfigError, Geometry, LinkParams, Position3D, SystemConfig,
                     UpaShape, default_br_params, default_bu_params,
                     default_ru_params, desk_scale_config, geometry_preset)
from .harness import Scenario, SweepResult, emit, load_scenario, run_scenario
from .mtzf import (MtzfLossMinDesign, algorithm2, loss_matrix, loss_min_phases,
                   loss_value, mtzf_beamformer, ns_beamformer, representative_channels,
                   select_min_eig_candidate)
from .rates import (BeamformerMatrix, effective_channel, min_rates, ones_phases,
                    random_phases, sum_rate, user_rate)
from .sdr import (LiftedProblem, SdrSettings, SdrSolution, extract_phases,
                  gaussian_randomization, lift, project_elliptope, solve_sdr_maxmin)

__version__ = "0.1.0"
