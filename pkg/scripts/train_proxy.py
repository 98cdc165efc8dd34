"""One-time training run for the bundled accuracy-proxy network.

Trains a 64-32-10 ReLU MLP on the 8x8 handwritten-digits set shipped with
scikit-learn (exact float arithmetic), writes the weights and the held-out
test split into ``src/approx3d/data``, and records the exact-bfloat16 test
accuracy in the model file. Requires scikit-learn, which the package itself
does not depend on.

    python scripts/train_proxy.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits
from sklearn.model_selection import train_test_split
from sklearn.neural_network import MLPClassifier

from approx3d.accproxy import (
    PROXY_WORKLOAD,
    Dataset,
    ModelLayer,
    TinyModel,
    accuracy,
    save_dataset,
    save_model,
)
from approx3d.approxmul import EXACT8

DATA = Path(__file__).resolve().parents[1] / "src" / "approx3d" / "data"
SCALE = 1.0 / 16.0


def main() -> None:
    digits = load_digits()
    pixels = digits.images.astype(np.uint8)  # values 0..16
    x_train, x_test, y_train, y_test = train_test_split(
        pixels, digits.target, test_size=0.3, random_state=0, stratify=digits.target
    )
    clf = MLPClassifier(hidden_layer_sizes=(32,), activation="relu", max_iter=2000, random_state=0)
    clf.fit(x_train.reshape(len(x_train), -1) * SCALE, y_train)

    model = TinyModel(
        name=PROXY_WORKLOAD,
        input_shape=(8, 8),
        layers=[
            ModelLayer("dense", clf.coefs_[0], clf.intercepts_[0], "relu"),
            ModelLayer("dense", clf.coefs_[1], clf.intercepts_[1], "none"),
        ],
        dataset="digits_test",
    )
    test = Dataset("digits_test", x_test.astype(np.float32) * np.float32(SCALE), y_test)
    model.exact_accuracy = accuracy(model, test, EXACT8)
    print(f"float accuracy {clf.score(x_test.reshape(len(x_test), -1) * SCALE, y_test):.4f}")
    print(f"exact bf16 accuracy {model.exact_accuracy:.4f} on {len(test)} samples")

    save_model(model, DATA / "proxy_model.npz")
    save_dataset(DATA / "digits_test", x_test, y_test, SCALE)


if __name__ == "__main__":
    main()
