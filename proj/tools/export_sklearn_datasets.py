"""Write the Wine and Digits datasets bundled with scikit-learn as headered CSVs.

Usage: python tools/export_sklearn_datasets.py [out_dir]
"""
import csv
import sys
from pathlib import Path

from sklearn import datasets


def export(bunch, path):
    names = [str(n).replace(" ", "_") for n in bunch.feature_names]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names + ["label"])
        for row, label in zip(bunch.data, bunch.target):
            writer.writerow([repr(float(v)) if not float(v).is_integer() else str(int(v)) for v in row] + [int(label)])


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    out.mkdir(parents=True, exist_ok=True)
    export(datasets.load_wine(), out / "wine.csv")
    export(datasets.load_digits(), out / "digits.csv")


if __name__ == "__main__":
    main()
