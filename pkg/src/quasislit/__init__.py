"""Chordal Loewner evolution for Lip-1/2 drivers and the cone, Hölder and
winding bounds of the quasislits they generate."""
from .bounds import (BoundProfile, big_l, bound_profile, comparison_z, cone_bound, h_func,
                     holder_exponents, lambert_w, m_of_kappa, p_of_sigma, quasiarc_profile,
                     v_envelope, winding_bound)
from .driving import (Driver, ReverseDriver, lip_seminorm, load_driver_csv, make_driver,
                      random_walk_driver, reverse_driver)
from .flow import (FlowState, FlowTrajectory, ReparamTrajectory, SolverOptions, TracedCurve,
                   reparametrize, reverse_map, solve_forward, solve_reverse, spatial_derivative,
                   step_elementary, trace_curve)
from .verify import SweepConfig, VerificationReport, estimate_holder, run_suite

__version__ = "0.1.0"
