"""Independent evaluation of the closed-form constants at 50 digits.

Regenerates the frozen values in tests/unit/params_test.cpp:

    python3 tests/oracles/params_oracle.py
"""
from mpmath import mp, mpf, log, ceil, sqrt, pi

mp.dps = 50

CASES = [(0.5, 0.05), (0.01, 0.05), (0.25, 0.01), (0.9, 0.09)]

for eps_f, delta_f in CASES:
    # Use the binary doubles the C++ side sees.
    eps, delta = mpf(eps_f), mpf(delta_f)
    k = ceil(12 / eps**2 * log(1 / delta))
    c = ceil(16 / eps * log(1 / delta) * log(k / delta) ** 2)
    alpha = 1 / (eps * log(k / delta))
    sigma_star_sq = (1 + alpha) / k
    b_min = 6 * c * log(3 * c / delta)
    b = 1
    while b < b_min:
        b *= 2
    print(f"eps={eps_f} delta={delta_f} k={int(k)} c={int(c)} alpha={mp.nstr(alpha, 20)} "
          f"sigma_star_sq={mp.nstr(sigma_star_sq, 20)} b_min={mp.nstr(b_min, 15)} b={b} "
          f"alpha_lt_3={alpha < 3} delta_ge_inv_k2={delta >= 1 / k**2}")

print("beta0 =", mp.nstr(sqrt(2 / pi), 20))
