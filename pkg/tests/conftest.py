from __future__ import annotations

import pytest

from statbench.dataset import make_dataset


@pytest.fixture
def survey():
    """Small mixed dataset used across kernel and session tests."""
    return make_dataset(
        [
            ("height", [150.0, 160.0, 170.0, 180.0, None, 165.0]),
            ("score", [52.0, 67.0, 71.0, 88.0, 90.0, None]),
            ("section", ["A", "B", "A", "B", "A", "B"]),
            ("hand", ["left", "right", "right", "right", None, "left"]),
        ]
    )
