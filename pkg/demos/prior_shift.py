"""
Training and test priors that differ
====================================

The risk weights take the test prior as a separate argument. When the test
distribution is known to be balanced differently from the training
triplets, passing it shifts the learned decision threshold accordingly.
"""

from tripletclf import (GaussianSource, GaussianSpec, TrainConfig, aggregate_pointwise,
                        classification_accuracy, generate_triplets, sample_gaussian, train)

train_spec = GaussianSpec((1.0, 1.0), (-1.0, -1.0), 1.0, pi_plus=0.8)
bags = aggregate_pointwise(generate_triplets(GaussianSource(train_spec), 2000, seed=3))

###############################################################################
# Test data with only 40% positives.
test_spec = GaussianSpec((1.0, 1.0), (-1.0, -1.0), 1.0, pi_plus=0.4)
test = sample_gaussian(test_spec, seed=4).sample(20_000)

for pi_test in (None, 0.4):
    cfg = TrainConfig(loss="logistic", learning_rate=1e-2, epochs=300, pi_test=pi_test)
    model, trace = train(bags, cfg)
    label = "same as training" if pi_test is None else f"{pi_test}"
    print(f"pi_test={label:>17}: accuracy {classification_accuracy(model, test):.4f}")
