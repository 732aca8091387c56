"""Regenerate the bundled demo dataset (a small class survey).

Deterministic: fixed seed, fixed row count.  Run from the repo root:

    python scripts/generate_demo_dataset.py
"""

import csv
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "statbench" / "defaults" / "data" / "class_survey.csv"

N = 120
SEED = 20240817


def main():
    rng = random.Random(SEED)
    rows = []
    for i in range(N):
        section = rng.choice(["A", "A", "B", "B", "C"])
        handedness = rng.choice(["right"] * 9 + ["left"])
        transport = rng.choice(["bus", "bus", "car", "bike", "walk", "walk"])
        height = rng.gauss(170.0, 9.0)
        sleep = min(11.0, max(4.0, rng.gauss(7.2, 1.1)))
        study = max(0.0, rng.gauss(11.0, 4.5))
        # score tracks study time with section-level shifts and noise
        shift = {"A": 0.0, "B": 2.0, "C": -1.5}[section]
        score = 52.0 + 2.1 * study + shift + rng.gauss(0.0, 7.0)
        score = min(100.0, max(0.0, score))
        row = {
            "section": section,
            "height_cm": f"{height:.1f}",
            "study_hours": f"{study:.1f}",
            "exam_score": f"{score:.1f}",
            "sleep_hours": f"{sleep:.1f}",
            "handedness": handedness,
            "transport": transport,
        }
        rows.append(row)

    # sprinkle a little missingness so summaries exercise the NA path
    for _ in range(6):
        row = rng.choice(rows)
        field = rng.choice(["height_cm", "study_hours", "sleep_hours"])
        row[field] = "NA"

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", newline="") as fh:
        writer = csv.DictWriter(
            fh,
            fieldnames=[
                "section",
                "height_cm",
                "study_hours",
                "exam_score",
                "sleep_hours",
                "handedness",
                "transport",
            ],
            lineterminator="\n",
        )
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {OUT}")


if __name__ == "__main__":
    main()
