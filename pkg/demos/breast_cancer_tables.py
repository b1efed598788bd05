"""
Breast cancer rows of the comparison tables
===========================================

Runs the squared and double-hinge variants of the triplet method and the
k-means baseline on the Wisconsin breast cancer data at 1000, 500 and 200
triplets, with the class prior fixed to 0.7 by subsampling, 20 trials each.

Set ``TRIPLETCLF_BREAST_CSV`` to use your own copy of the data (nine
features and a benign/malignant label, benign as the positive class).
"""

import os
from pathlib import Path

from tripletclf import ExperimentConfig, TrainConfig, experiment_run, load_labeled_csv
from tripletclf.eval_bench import format_table, results_csv
from tripletclf.triplet_data import examples_to_arrays

here = Path(__file__).resolve().parent
path = Path(os.environ.get("TRIPLETCLF_BREAST_CSV",
                           here.parent / "tests" / "data" / "breast_cancer_wisconsin.csv"))
X, y = examples_to_arrays(load_labeled_csv(path))
print(f"{len(y)} examples, {(y == 1).mean():.3f} positive before subsampling")

###############################################################################
# Width-100 ReLU network, minibatch Adam, inputs standardized with
# statistics of the (unlabeled) triplet points.
net = TrainConfig(model="mlp1", hidden_width=100, learning_rate=1e-4, epochs=20,
                  batch_size=64, standardize=True)

results = []
for n in (1000, 500, 200):
    results.append(experiment_run(ExperimentConfig(
        name=f"breast/{n}", pool=(X, y), prior=0.7, n_triplets=n, trials=20, train=net,
        methods=("squared", "double_hinge", "kmeans"), singular_policy="skip")))

print(format_table(results))
Path("breast_tables.csv").write_text(results_csv(results))
