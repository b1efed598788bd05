"""Binary classification from triplet comparison data.

Triplets ``(x_a, x_b, x_c)`` carry only keep/flip feedback. Pooling their
positions yields three unlabeled bags whose mixtures of the class
conditionals are known functions of the class prior; inverting that
mixture gives an unbiased estimate of the ordinary classification risk.
"""
from .erm import Model, TrainConfig, empirical_risk, init_model, predict_score, risk_gradient, train
from .errors import (DataError, DivergenceError, DomainError, EstimationError, NumericalError,
                     SingularPriorError, TripletError)
from .eval_bench import (EvalReport, ExperimentConfig, bound_curve, classification_accuracy,
                         clustering_accuracy, experiment_run, kmeans_fit)
from .losses import SurrogateLoss, lipschitz_and_ceiling, loss_derivative, loss_value
from .prior_model import (BoundParams, ClassPrior, MixingCoefficients, RiskWeights, bound_coefficient,
                          estimate_pi_T, estimate_prior, estimation_error_bound, mixing_coefficients,
                          pi_T_from_prior, prior_from_pi_T, risk_weights)
from .rng import CounterStream
from .triplet_data import (Feedback, GaussianSource, GaussianSpec, LabeledExample, PointwiseBags,
                           PoolSource, Triplet, TripletDataset, aggregate_pointwise, generate_triplets,
                           load_labeled_csv, read_triplets, route_label_pattern, sample_gaussian,
                           write_triplets)

__version__ = "0.1.0"
