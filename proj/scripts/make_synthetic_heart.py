#!/usr/bin/env python3
"""Generate data/heart_synthetic.dat, a synthetic stand-in for the UCI
Statlog heart file.

The real dataset is not redistributed here. This generator samples 270
records with the same 13-attribute schema, value ranges, and class balance
(150 absence / 120 presence). Two latent factors drive correlated features,
the class depends on a nonlinear score with a thal*ca interaction, and 'thal'
and 'ca' carry the strongest signal. Output format matches the UCI layout:
14 whitespace-separated numeric fields per line, last field the class label
in {1,2}.

Usage: python3 scripts/make_synthetic_heart.py [seed] > data/heart_synthetic.dat
"""

import sys

import numpy as np


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def sample_features(rng, m):
    u = rng.normal(0.0, 1.0, m)  # vascular/perfusion factor
    v = rng.normal(0.0, 1.0, m)  # exertion factor

    thal = np.where(u + rng.normal(0, 0.6, m) < 0.25, 3.0,
                    np.where(u + rng.normal(0, 0.6, m) < 1.0, 6.0, 7.0))
    ca = np.clip(np.floor(0.9 * u + 0.35 * v + rng.normal(0, 0.7, m) + 0.6),
                 0, 3)
    cp = np.clip(np.floor(1.1 * v + rng.normal(0, 0.9, m) + 2.8), 1, 4)
    exang = (rng.random(m) < sigmoid(1.3 * v - 0.6)).astype(float)
    oldpeak = np.clip(np.round(np.maximum(0.0, 0.85 * u + 0.55 * v +
                                          rng.normal(0, 0.55, m)), 1), 0, 6.2)
    slope = np.clip(np.floor(0.8 * oldpeak + rng.normal(0, 0.55, m) + 1.1),
                    1, 3)
    thalach = np.clip(np.round(150 - 10 * u - 6 * v + rng.normal(0, 13, m)),
                      71, 202)
    age = np.clip(np.round(54 + 5 * u + rng.normal(0, 8, m)), 29, 77)
    trestbps = np.clip(np.round(131 + 3 * u + rng.normal(0, 16, m)), 94, 200)
    chol = np.clip(np.round(247 + 2 * u + rng.normal(0, 50, m)), 126, 564)
    sex = (rng.random(m) < 0.62 + 0.06 * np.tanh(u)).astype(float)
    fbs = (rng.random(m) < 0.15).astype(float)
    restecg = np.where(rng.random(m) < 0.48 + 0.1 * np.tanh(u), 2.0,
                       np.where(rng.random(m) < 0.04, 1.0, 0.0))

    cols = [age, sex, cp, trestbps, chol, fbs, restecg, thalach, exang,
            oldpeak, slope, ca, thal]
    return np.stack(cols, axis=1)


def label_scores(rng, x):
    age, sex, cp, trestbps, chol, fbs, restecg, thalach, exang, oldpeak, \
        slope, ca, thal = x.T
    z = (1.9 * (thal == 7.0) + 0.9 * (thal == 6.0)
         + 0.80 * ca
         + 0.85 * (cp == 4.0)
         + 0.55 * exang
         + 0.45 * oldpeak
         + 0.35 * (slope - 1.0)
         - 0.035 * (thalach - 150.0)
         + 0.020 * (age - 54.0)
         + 0.012 * (trestbps - 131.0)
         + 0.30 * sex
         + 1.10 * (thal == 7.0) * (ca >= 1.0)
         + 0.85 * exang * (oldpeak >= 1.5)
         - 0.75 * (cp <= 2.0) * (thalach >= 160.0)
         + rng.normal(0.0, 0.75, x.shape[0]))
    return z


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 20240901
    rng = np.random.default_rng(seed)
    m, positives = 270, 120
    x = sample_features(rng, m)
    z = label_scores(rng, x)
    threshold = np.sort(z)[m - positives]
    y = (z >= threshold).astype(int)
    for i in range(m):
        fields = ["%.1f" % v for v in x[i]] + [str(y[i] + 1)]
        print(" ".join(fields))


if __name__ == "__main__":
    main()
