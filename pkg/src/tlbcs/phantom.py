"""Modified Shepp-Logan phantom (Toft's contrast-enhanced parameters)."""
import numpy as np

# intensity, semi-axis a, semi-axis b, center x0, center y0, rotation (deg)
_ELLIPSES = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0),
    (-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0),
    (-0.2, 0.1100, 0.3100, 0.22, 0.0, -18),
    (-0.2, 0.1600, 0.4100, -0.22, 0.0, 18),
    (0.1, 0.2100, 0.2500, 0.0, 0.35, 0),
    (0.1, 0.0460, 0.0460, 0.0, 0.1, 0),
    (0.1, 0.0460, 0.0460, 0.0, -0.1, 0),
    (0.1, 0.0460, 0.0230, -0.08, -0.605, 0),
    (0.1, 0.0230, 0.0230, 0.0, -0.606, 0),
    (0.1, 0.0230, 0.0460, 0.06, -0.605, 0),
)


def shepp_logan(size=64):
    """Real phantom on a ``size x size`` grid with values in [0, 1]."""
    t = (np.arange(size) - (size - 1) / 2) / (size / 2)
    x = t[None, :]
    y = -t[:, None]
    img = np.zeros((size, size))
    for val, a, b, x0, y0, deg in _ELLIPSES:
        th = np.deg2rad(deg)
        xr = (x - x0) * np.cos(th) + (y - y0) * np.sin(th)
        yr = -(x - x0) * np.sin(th) + (y - y0) * np.cos(th)
        img += val * ((xr / a) ** 2 + (yr / b) ** 2 <= 1)
    return np.clip(img, 0.0, 1.0)
