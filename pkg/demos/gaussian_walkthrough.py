"""
Learning a classifier from triplets alone
=========================================

Walk through the whole pipeline on two Gaussian classes: simulate user
feedback on random triplets, estimate the class prior from the keep/flip
counts, minimize the unbiased risk, and compare against k-means on the same
points.
"""

import numpy as np

from tripletclf import (GaussianSource, GaussianSpec, TrainConfig, aggregate_pointwise,
                        classification_accuracy, clustering_accuracy, estimate_prior,
                        generate_triplets, kmeans_fit, risk_weights, sample_gaussian, train)

###############################################################################
# Two isotropic Gaussians at +/-(1, 1); 70% of examples are positive.
spec = GaussianSpec(mu_plus=(1.0, 1.0), mu_minus=(-1.0, -1.0), sigma=1.0, pi_plus=0.7)
data = generate_triplets(GaussianSource(spec), n=1000, seed=0)
print(f"kept {data.n1} triplets, flipped {data.n2}")

###############################################################################
# A triplet is flipped only for label patterns (+,-,+) and (-,+,-), which
# happens with probability pi+ * pi-. The counts therefore reveal the prior.
pi_hat = estimate_prior(data.n1, data.n2)
print(f"estimated prior {pi_hat:.3f} (true 0.7)")

###############################################################################
# Pool the triplet positions into three bags and look at the signed weights
# the risk estimator puts on each of them.
bags = aggregate_pointwise(data)
print("bag sizes:", bags.sizes)
print("weights (rows: bags, cols: +1/-1 loss):\n", np.round(risk_weights(pi_hat).as_array(), 4))

###############################################################################
# Train a linear model with the double hinge loss. The prior is estimated
# from the bag sizes when not given explicitly.
model, trace = train(bags, TrainConfig(loss="double_hinge", model="linear",
                                       learning_rate=1e-2, epochs=200, seed=0))
print(f"empirical risk: first epoch {trace.risk[0]:.4f}, last {trace.risk[-1]:.4f}")

X_test, y_test = sample_gaussian(spec, seed=1).sample(10_000)
acc = classification_accuracy(model, (X_test, y_test))
print(f"test accuracy {acc:.4f}")

###############################################################################
# The k-means baseline clusters the same points while ignoring the
# comparisons, and is scored up to label permutation.
km, _ = kmeans_fit(bags.all_points(), seed=0)
print(f"k-means clustering accuracy {clustering_accuracy(km.assign(X_test), y_test):.4f}")
