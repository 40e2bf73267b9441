"""Information-theoretic limits for sparse support recovery.

The library computes exponential upper bounds on the probability of exact
(or partial) support recovery, mutual-information sample-complexity
conditions and SNR cutoffs for correlated and noisy-data Gaussian linear
models, exact error exponents for arbitrary finite-alphabet conditionally
IID observation models (group testing built in), and benchmarks practical
decoders (exhaustive ML, lasso, reweighted lasso, OMP) against those
limits with seeded Monte Carlo sweeps.
"""

from .model import (CapacityError, CoeffModel, Dataset, ParameterError,
                    ProblemConfig, SupportSet, corrupt_matrix,
                    generate_observations, generate_sensing_matrix,
                    generate_signal, load_dataset, make_dataset, save_dataset)
from .bounds import (BoundResult, SampleComplexityResult, error_bound_linear,
                     error_bound_noisy, f_rho, log2_binomial,
                     mutual_info_linear, necessary_samples,
                     partial_recovery_bound, snr_cutoff, sufficient_samples)
from .exponent import (DiscreteChannelModel, ExponentCurve, derivative_check,
                       error_bound_general, error_exponent, exponent_curve,
                       group_testing_model, mutual_information)
from .decoders import (DecoderOutput, LassoSettings, default_lasso_lambda,
                       lasso, ml_decode_ls, ml_decode_marginal, omp,
                       reweighted_lasso)
from .harness import (ConfigError, SweepCurve, SweepSpec, emit_csv, read_csv,
                      run_sweep, validate_config)

__version__ = "0.1.0"
