"""Ground-truth walkthrough: spectra, smoothed counting, asymptotic fits.

Assembles the twisted system in the Fourier basis at growing truncation,
solves for the full spectrum, convolves the pointwise counting measure
with the band-limited mollifier, and fits the two-term growth law.  The
fitted second coefficient converges to the direct symbolic value as the
truncation grows.
"""

import math

import numpy as np

from weylsys import (
    assemble_and_solve,
    build_model,
    default_mollifier,
    fit_weyl,
    local_counting_mollified,
    second_weyl,
)

TWO_PI = 2.0 * math.pi

model = build_model("twisted", {"eps": 0.1})
lead, sub = model.symbol_fields()
xs = [np.array([TWO_PI * i / 8.0, 0.0]) for i in range(8)]
avg_direct = float(np.mean([second_weyl(lead, sub, x).value for x in xs]))
print(f"direct x-averaged second coefficient: {avg_direct:+.8f}")
print()

moll = default_mollifier(3.0)
print(f"mollifier: support {moll.support}, mass defect {abs(moll.mass()-1):.1e}, "
      f"moments 1-6 max {max(moll.moment(m) for m in range(1, 7)):.1e}")
print()

print(f"{'K':>4} {'dim':>6} {'trusted':>8} {'avg a1 fit':>12} "
      f"{'avg a0 fit':>12} {'a0 error':>10}")
for K in (16, 24, 32):
    spectrum = assemble_and_solve(model, K)
    mu_hi = 0.6 * K
    mu = np.arange(3.0, mu_hi + 0.025, 0.05)
    a1s, a0s = [], []
    for x in xs:
        samples = local_counting_mollified(spectrum, moll, x, mu)
        fit = fit_weyl(samples, 2, (3.0, mu_hi), mollifier=moll)
        a1s.append(fit.a_leading)
        a0s.append(fit.a_second)
    avg_a0 = float(np.mean(a0s))
    print(
        f"{K:4d} {2 * (2 * K + 1) ** 2:6d} {spectrum.trusted_max:8.1f} "
        f"{np.mean(a1s):12.8f} {avg_a0:+12.8f} {abs(avg_a0 - avg_direct):10.2e}"
    )

print()
print("The error column shrinks monotonically: the smoothed spectral data")
print("converge onto the symbolic prediction as the truncation grows.")
