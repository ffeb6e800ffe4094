"""Build the digits 0-vs-1 benchmark files used by the test suite.

Each 8x8 handwritten digit bitmap from the scikit-learn digits bundle is read
row by row into a univariate sequence of 64 pixel intensities, keeping only
the classes 0 and 1.  The first 40 samples of each class, in dataset order,
form the training split; the rest form the test split.  scikit-learn is only
needed to regenerate the files, not to run the tests.
"""

from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits

from stlconcepts.data import Dataset, save_ucr_tsv

TRAIN_PER_CLASS = 40


def build_splits():
    digits = load_digits()
    train_rows, test_rows = [], []
    train_labels, test_labels = [], []
    for target in (0, 1):
        rows = digits.data[digits.target == target]
        train_rows.append(rows[:TRAIN_PER_CLASS])
        test_rows.append(rows[TRAIN_PER_CLASS:])
        train_labels.extend([target] * TRAIN_PER_CLASS)
        test_labels.extend([target] * (rows.shape[0] - TRAIN_PER_CLASS))

    def pack(blocks, labels):
        values = np.concatenate(blocks)[:, np.newaxis, :]
        return Dataset(
            values=values,
            labels=np.asarray(labels, dtype=np.int64),
            label_values=[0.0, 1.0],
        )

    return pack(train_rows, train_labels), pack(test_rows, test_labels)


def main():
    out_dir = Path(__file__).resolve().parents[1] / "data"
    out_dir.mkdir(exist_ok=True)
    train, test = build_splits()
    save_ucr_tsv(train, out_dir / "digits01_TRAIN.tsv")
    save_ucr_tsv(test, out_dir / "digits01_TEST.tsv")
    print(f"wrote {train.count} training and {test.count} test rows of length {train.length}")


if __name__ == "__main__":
    main()
