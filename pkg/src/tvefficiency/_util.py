import numpy as np


def lag_design(x, q, start=None):
    """Rows ``(x_{t-1}, ..., x_{t-q})`` and targets ``x_t`` for ``t = start..T-1``.

    ``start`` defaults to ``q``; a larger value drops extra initial observations
    so that fits of different orders share one estimation sample.
    """
    x = np.asarray(x, dtype=float)
    start = q if start is None else start
    if start < q:
        raise ValueError("start must be >= q")
    T = len(x)
    lags = np.empty((T - start, q))
    for ell in range(1, q + 1):
        lags[:, ell - 1] = x[start - ell : T - ell]
    return lags, x[start:]


def bartlett_weights(bandwidth):
    j = np.arange(bandwidth + 1)
    return 1.0 - j / (bandwidth + 1.0)
