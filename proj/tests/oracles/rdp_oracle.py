#!/usr/bin/env python3
# Copyright 2026 The dpsynth Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Slow reference accountant for the Poisson-subsampled Gaussian mechanism.

Integer orders use the exact binomial sum in arbitrary precision. Fractional
orders integrate E_{x~N(0,z^2)}[((1-q) + q*exp((2x-1)/(2z^2)))^alpha]
numerically in log space. The (epsilon, delta) conversion scans a grid ten times finer than
the production grid (step 0.1 on [1.1, 256]).

The printed values are frozen into tests/accountant_oracle_values.h.
"""

import math
import sys

import mpmath as mp
import numpy as np
from scipy import integrate, optimize

mp.mp.dps = 30


def log_a_int(q, z, alpha):
    q = mp.mpf(q)
    z = mp.mpf(z)
    total = mp.mpf(0)
    for i in range(alpha + 1):
        total += (mp.binomial(alpha, i) * q**i * (1 - q)**(alpha - i) *
                  mp.exp(mp.mpf(i * i - i) / (2 * z * z)))
    return mp.log(total)


def log_a_quad(q, z, alpha):
    """log E_{x~N(0,z^2)}[((1-q) + q*exp((2x-1)/(2z^2)))^alpha] by quadrature.

    Evaluated in log space around the integrand's mode so large orders do not
    overflow.
    """
    q, z, alpha = float(q), float(z), float(alpha)

    def log_f(x):
        t = (2 * x - 1) / (2 * z * z)
        base = np.logaddexp(math.log1p(-q), math.log(q) + t) if q < 1 else t
        return -x * x / (2 * z * z) - math.log(z * math.sqrt(2 * math.pi)) + alpha * base

    res = optimize.minimize_scalar(lambda x: -log_f(x), bounds=(-20 * z, alpha + 20 * z),
                                   method="bounded", options={"xatol": 1e-10})
    mode = res.x
    peak = log_f(mode)
    lo, hi = mode - 40 * z, mode + 40 * z
    val, _ = integrate.quad(lambda x: math.exp(log_f(x) - peak), lo, hi,
                            points=[mode, 0.0, 0.5] if lo < 0 < hi else [mode],
                            limit=400, epsabs=0, epsrel=1e-12)
    return mp.mpf(peak) + mp.log(val)


def rdp(q, z, alpha):
    if q == 1:
        return mp.mpf(alpha) / (2 * mp.mpf(z)**2)
    if float(alpha).is_integer():
        return log_a_int(q, z, int(alpha)) / (alpha - 1)
    return log_a_quad(q, z, alpha) / (mp.mpf(alpha) - 1)


def fine_orders():
    return [mp.mpf(k) / 10 for k in range(11, 2561)]


def epsilon(n, b, e, z, delta, orders):
    q = mp.mpf(b) / n
    if b == n:
        q = 1
    steps = e * -(-n // b)
    best = None
    for a in orders:
        af = float(a)
        val = steps * rdp(q, z, int(af) if af.is_integer() else a)
        eps = val + mp.log(1 / mp.mpf(delta)) / (a - 1)
        if best is None or eps < best[0]:
            best = (eps, af)
    return best


CONFIGS = [
    (39073, 256, 20, 1.0, 1e-5),
    (60000, 256, 60, 1.1, 1e-5),
    (10000, 100, 10, 1.0, 1e-5),
    (1000, 1000, 1, 1.0, 1e-5),
    (36177, 256, 20, 0.8, 1e-5),
    (50000, 500, 5, 2.0, 1e-6),
    (20000, 64, 40, 1.5, 1e-5),
    (5000, 50, 3, 0.7, 1e-4),
    (100000, 1024, 100, 1.3, 1e-6),
    (108531, 256, 20, 0.6, 1e-5),
]


def noise(n, b, e, eps_target, delta, lo=0.3, hi=1e4, tol=1e-4):
    orders = fine_orders()
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if epsilon(n, b, e, mid, delta, orders)[0] <= eps_target:
            hi = mid
        else:
            lo = mid
    return hi


def main():
    which = range(len(CONFIGS))
    if len(sys.argv) > 1 and sys.argv[1] == "noise":
        print(f"z(10000, 100, 10, eps=3, delta=1e-5) = {noise(10000, 100, 10, 3.0, 1e-5)!r}")
        return
    if len(sys.argv) > 1:
        which = [int(a) for a in sys.argv[1:]]
    for k in which:
        n, b, e, z, delta = CONFIGS[k]
        eps, order = epsilon(n, b, e, z, delta, fine_orders())
        print(f"{{{n}, {b}, {e}, {z!r}, {delta!r}, {mp.nstr(eps, 17)}, {order!r}}},",
              flush=True)


if __name__ == "__main__":
    main()
