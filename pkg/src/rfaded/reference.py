"""Published max-norm errors for the bundled problems on M = N = 16..128.

Each row lists the four errors at h = 1/16, 1/32, 1/64, 1/128 and, where
they were published, the three observed orders.  ``block`` groups rows
that were reported together (one parameter held fixed, two swept).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

__all__ = ["ReferenceRow", "REFERENCE_ROWS", "REFERENCE_GRIDS", "reference_row"]

REFERENCE_GRIDS = (16, 32, 64, 128)


@dataclass(frozen=True)
class ReferenceRow:
    block: int
    example: int
    gamma: float
    alpha: float
    beta: float
    errors: Tuple[float, float, float, float]
    orders: Optional[Tuple[float, float, float]] = None


def _r(block, ex, g, a, b, errors, orders=None):
    return ReferenceRow(block, ex, g, a, b, tuple(errors), None if orders is None else tuple(orders))


REFERENCE_ROWS = (
    # example 1, gamma = 0.6
    _r(1, 1, 0.6, 0.2, 1.2, (9.7302e-4, 2.8594e-4, 8.5050e-5, 2.3207e-5), (1.77, 1.75, 1.87)),
    _r(1, 1, 0.6, 0.2, 1.6, (0.0013, 3.1998e-4, 7.7457e-5, 1.8657e-5), (2.02, 2.04, 2.05)),
    _r(1, 1, 0.6, 0.2, 1.9, (0.0014, 3.5847e-4, 8.8888e-5, 2.1917e-5), (1.97, 2.01, 2.01)),
    _r(1, 1, 0.6, 0.5, 1.2, (6.1152e-4, 2.1439e-4, 6.9837e-5, 2.0230e-5), (1.51, 1.62, 1.77)),
    _r(1, 1, 0.6, 0.5, 1.6, (0.0010, 2.5882e-4, 6.2727e-5, 1.5049e-5), (1.95, 2.04, 2.05)),
    _r(1, 1, 0.6, 0.5, 1.9, (0.0012, 3.1425e-4, 7.8259e-5, 1.9320e-5), (1.93, 2.01, 2.01)),
    # example 1, alpha = 0.5
    _r(2, 1, 0.1, 0.5, 1.2, (4.1269e-4, 1.3289e-4, 4.2945e-5, 1.2376e-5)),
    _r(2, 1, 0.1, 0.5, 1.6, (6.9553e-4, 1.6932e-4, 4.0635e-5, 1.0166e-5), (2.04, 2.06, 2.00)),
    _r(2, 1, 0.1, 0.5, 1.9, (8.1577e-4, 2.0327e-4, 5.0210e-5, 1.2343e-5)),
    _r(2, 1, 0.4, 0.5, 1.2, (5.2173e-4, 1.7710e-4, 5.7498e-5, 1.6621e-5)),
    _r(2, 1, 0.4, 0.5, 1.6, (8.8700e-4, 2.1824e-4, 5.2684e-5, 1.2610e-5)),
    _r(2, 1, 0.4, 0.5, 1.9, (0.0010, 2.6387e-4, 6.5500e-5, 1.6143e-5)),
    # example 1, beta = 1.9
    _r(3, 1, 0.2, 0.2, 1.9, (0.0010, 2.5310e-4, 6.2354e-5, 1.5323e-5)),
    _r(3, 1, 0.2, 0.5, 1.9, (8.8693e-4, 2.2171e-4, 5.4855e-5, 1.3496e-5)),
    _r(3, 1, 0.2, 0.8, 1.9, (4.9635e-4, 1.4603e-4, 3.8827e-5, 9.8575e-6), (1.76, 1.91, 1.98)),
    _r(3, 1, 0.7, 0.2, 1.9, (0.0016, 3.9122e-4, 9.7167e-5, 2.3979e-5)),
    _r(3, 1, 0.7, 0.5, 1.9, (0.0014, 3.4303e-4, 8.5566e-5, 2.1142e-5)),
    _r(3, 1, 0.7, 0.8, 1.9, (7.5464e-4, 2.2589e-4, 6.0588e-5, 1.5452e-5), (1.74, 1.90, 1.97)),
    # example 2, gamma = 0.5
    _r(4, 2, 0.5, 0.2, 1.2, (3.8676e-4, 1.4692e-4, 4.4836e-5, 1.2423e-5)),
    _r(4, 2, 0.5, 0.2, 1.6, (5.3220e-4, 1.3873e-4, 3.4679e-5, 8.5082e-6)),
    _r(4, 2, 0.5, 0.2, 1.9, (6.0947e-4, 1.6150e-4, 4.1138e-5, 1.0283e-5)),
    _r(4, 2, 0.5, 0.5, 1.2, (2.4977e-4, 1.1031e-4, 3.6830e-5, 1.0832e-5)),
    _r(4, 2, 0.5, 0.5, 1.6, (4.2841e-4, 1.1294e-4, 2.8289e-5, 7.1049e-6)),
    _r(4, 2, 0.5, 0.5, 1.9, (5.3059e-4, 1.4195e-4, 3.6317e-5, 9.0898e-6), (1.90, 1.97, 2.00)),
    # example 2, beta = 1.9
    _r(5, 2, 0.2, 0.2, 1.9, (6.0947e-4, 1.6150e-4, 4.1138e-5, 1.0283e-5)),
    _r(5, 2, 0.2, 0.5, 1.9, (5.3059e-4, 1.4195e-4, 3.6317e-5, 9.0898e-6)),
    _r(5, 2, 0.2, 0.8, 1.9, (2.9416e-4, 9.3235e-5, 2.5705e-5, 6.6475e-6), (1.67, 1.86, 1.95)),
    # example 2, alpha = 0.1
    _r(6, 2, 0.7, 0.1, 1.2, (4.0456e-4, 1.5142e-4, 4.5762e-5, 1.2597e-5)),
    _r(6, 2, 0.7, 0.1, 1.6, (5.5129e-4, 1.4380e-4, 3.5984e-5, 8.8387e-6)),
    _r(6, 2, 0.7, 0.1, 1.9, (6.2364e-4, 1.6524e-4, 4.2094e-5, 1.0524e-5)),
)


def reference_row(example: int, gamma: float, alpha: float, beta: float) -> ReferenceRow:
    for r in REFERENCE_ROWS:
        if (r.example, r.gamma, r.alpha, r.beta) == (example, gamma, alpha, beta):
            return r
    raise KeyError(f"no reference row for example {example}, gamma={gamma}, alpha={alpha}, beta={beta}")
