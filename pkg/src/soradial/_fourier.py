"""Spectral differentiation of periodic samples."""
import numpy as np


def fourier_derivative(values, axis: int, order: int, period: float = 2.0 * np.pi) -> np.ndarray:
    """Derivative of uniformly sampled periodic data along ``axis``.

    Exact for trigonometric polynomials whose frequencies along ``axis`` are
    below the Nyquist limit. The Nyquist mode is dropped for odd orders.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    values = np.asarray(values, dtype=float)
    N = values.shape[axis]
    F = np.fft.rfft(values, axis=axis)
    w = np.fft.rfftfreq(N, d=1.0 / N) * (2.0 * np.pi / period)
    shape = [1] * values.ndim
    shape[axis] = w.size
    w = w.reshape(shape)
    if order == 1:
        mult = 1j * w
        if N % 2 == 0:
            mult = mult.copy()
            idx = [slice(None)] * values.ndim
            idx[axis] = -1
            mult[tuple(idx)] = 0.0
    else:
        mult = -w * w
    return np.fft.irfft(F * mult, n=N, axis=axis)
