"""Take Gaussian measurements and threshold the proxy observations.

``z = A^T y`` is an unbiased but noisy surrogate of ``x`` when the columns
of ``A`` have unit expected norm, so thresholding it gives a cheap level
set estimate. The noise grows quickly as fewer measurements are taken.
"""
from tvlevelset import (
    default_phantom_spec,
    estimate_lipschitz,
    excess_risk,
    generate_gaussian_operator,
    measure,
    proxy_observations,
    render_phantom,
    threshold_baseline,
)

x = render_phantom(default_phantom_spec())
p, gamma = x.size, 70.0

for k in (p, p // 2, p // 4):
    op = generate_gaussian_operator(k, p, seed=1)
    L = estimate_lipschitz(op)
    for sigma in (0.0, 10.0):
        meas = measure(op, x.ravel(), sigma, seed=2)
        z = proxy_observations(op, meas).reshape(x.shape)
        risk = excess_risk(x, gamma, threshold_baseline(z, gamma))
        print(f"k={k:5d} sigma={sigma:4.1f}  L={L:7.2f}  proxy excess risk {risk:7.3f}")
