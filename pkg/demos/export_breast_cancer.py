"""
Export the Wisconsin breast cancer data to CSV
==============================================

Writes the 683 complete rows of the original 699-row Wisconsin breast
cancer data (nine integer cytology features) in the labeled-CSV layout,
benign = +1. Needs the ``rdatasets`` package, which bundles the data as
``MASS::biopsy``.
"""

import sys

import numpy as np
import rdatasets

from tripletclf.triplet_data import write_labeled_csv

out = sys.argv[1] if len(sys.argv) > 1 else "breast_cancer_wisconsin.csv"
df = rdatasets.data("MASS", "biopsy").dropna()
X = df[[f"V{i}" for i in range(1, 10)]].to_numpy(float)
y = np.where(df["class"] == "benign", 1, -1)
write_labeled_csv(out, X, y)
print(f"wrote {len(y)} rows to {out}")
