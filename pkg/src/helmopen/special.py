r"""Integer-order Bessel functions of the first and second kind.

Everything is evaluated together from a single backward (Miller) recurrence:

* :math:`J_n` comes from the recurrence normalized with
  :math:`J_0 + 2\sum_{k\ge1} J_{2k} = 1`;
* :math:`Y_0` and :math:`Y_1` come from the Neumann series

  .. math::
      Y_0 = \tfrac{2}{\pi}\left(\ln\tfrac{x}{2} + \gamma\right) J_0
            - \tfrac{4}{\pi} \sum_{k\ge1} (-1)^k \frac{J_{2k}}{k}

  and its term-by-term derivative, whose partial sums are accumulated while
  the recurrence runs;
* :math:`Y_n` for :math:`n \ge 2` by upward recurrence, which is the stable
  direction for the second kind.

Accuracy envelope: absolute error below ``1e-12`` (relative, once the value
exceeds one in magnitude) for ``0.05 <= x <= 200`` and orders up to 60.
"""

import numpy as np

from .errors import DomainError

__all__ = ["bessel_j", "bessel_y", "hankel1", "hankel1_derivative", "bessel_table"]

EULER_GAMMA = 0.57721566490153286061
_BIG = 1e200
_SMALL = 1e-200


def _start_order(nmax, xmax):
    top = max(nmax, int(np.ceil(xmax)))
    n = top + 30 + int(10.0 * xmax ** (1.0 / 3.0))
    return n + (n % 2)


def bessel_table(nmax, x):
    """Return ``(J, Y)`` arrays of shape ``(nmax + 1,) + x.shape``.

    ``J[n]`` holds :math:`J_n(x)` and ``Y[n]`` holds :math:`Y_n(x)` for
    ``n = 0..nmax``. ``x`` must be strictly positive.
    """
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    if x.size and not np.all(x > 0):
        raise DomainError("Bessel functions are only supported for x > 0")
    nmax = int(nmax)
    if nmax < 0:
        raise DomainError("order must be nonnegative")
    m = max(nmax, 1)
    jt = np.zeros((m + 1, x.size))
    if x.size == 0:
        return jt[: nmax + 1].reshape((nmax + 1,) + shape), jt[: nmax + 1].reshape((nmax + 1,) + shape)

    start = _start_order(m, float(x.max()))
    two_over_x = 2.0 / x
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    s_y0 = np.zeros_like(x)  # sum_k (-1)^k J_2k / k
    s_y1 = np.zeros_like(x)  # sum_k (-1)^k (J_2k-1 - J_2k+1) / k

    # j_cur holds J_n with n descending from `start`; j_next holds J_{n+1}.
    for n in range(start, 0, -1):
        if n <= m:
            jt[n] = j_cur
        if n % 2 == 0:
            kk = n // 2
            sign = -1.0 if kk % 2 else 1.0
            norm += 2.0 * j_cur
            s_y0 += sign * j_cur / kk
        else:
            # J_n with n odd enters the derivative series for k=(n+1)/2 and k=(n-1)/2
            ka = (n + 1) // 2
            s_y1 += (-1.0 if ka % 2 else 1.0) * j_cur / ka
            kb = (n - 1) // 2
            if kb >= 1:
                s_y1 -= (-1.0 if kb % 2 else 1.0) * j_cur / kb
        j_prev = n * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > _BIG
        if np.any(big):
            scale = np.where(big, _SMALL, 1.0)
            j_cur *= scale
            j_next *= scale
            norm *= scale
            s_y0 *= scale
            s_y1 *= scale
            jt[n:] *= scale
    jt[0] = j_cur
    norm += j_cur
    jt /= norm
    s_y0 /= norm
    s_y1 /= norm

    j0, j1 = jt[0], jt[1]
    log_term = np.log(0.5 * x) + EULER_GAMMA
    yt = np.empty_like(jt)
    yt[0] = (2.0 / np.pi) * log_term * j0 - (4.0 / np.pi) * s_y0
    # Y1 = -Y0', differentiating the Neumann series term by term
    yt[1] = (2.0 / np.pi) * (log_term * j1 - j0 / x) + (2.0 / np.pi) * s_y1
    for n in range(1, m):
        yt[n + 1] = n * two_over_x * yt[n] - yt[n - 1]
    return jt[: nmax + 1].reshape((nmax + 1,) + shape), yt[: nmax + 1].reshape((nmax + 1,) + shape)


def bessel_j(order, x):
    """Bessel function of the first kind :math:`J_n(x)`, integer ``n >= 0``."""
    jt, _ = bessel_table(order, x)
    return jt[order]


def bessel_y(order, x):
    """Bessel function of the second kind :math:`Y_n(x)`, integer ``n >= 0``."""
    _, yt = bessel_table(order, x)
    return yt[order]


def hankel1(order, x):
    """Hankel function of the first kind, :math:`H^{(1)}_n = J_n + i Y_n`."""
    jt, yt = bessel_table(order, x)
    return jt[order] + 1j * yt[order]


def hankel1_derivative(order, x):
    r""":math:`H^{(1)\prime}_n(x) = H^{(1)}_{n-1}(x) - (n/x) H^{(1)}_n(x)`, with
    :math:`H^{(1)\prime}_0 = -H^{(1)}_1`."""
    jt, yt = bessel_table(order + 1, x)
    h = jt + 1j * yt
    if order == 0:
        return -h[1]
    return h[order - 1] - order / np.asarray(x, dtype=float) * h[order]
