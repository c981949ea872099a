"""Input checks shared by the estimator front end."""
from __future__ import annotations

import numpy as np
from sklearn.utils import check_array


def check_sensing_samples(X, n_frame: int) -> np.ndarray:
    """Coerce ``X`` to a 1-d array of integer sensing lengths in [1, n_frame - 1].

    Accepts a flat sequence or a single-column 2-d array.
    """
    arr = check_array(X, ensure_2d=False, dtype=np.float64)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected one column of sensing lengths, got shape {arr.shape}")
        arr = arr[:, 0]
    if not np.all(arr == np.round(arr)):
        raise ValueError("sensing lengths must be whole sample counts")
    out = arr.astype(np.int64)
    if out.min() < 1 or out.max() >= n_frame:
        raise ValueError(f"sensing lengths must lie in [1, {n_frame - 1}]")
    return out
