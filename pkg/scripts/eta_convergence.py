"""Exact diagonal-design distance against its leading term t(t-1)/2^N."""

from diagdesign.exact_analysis import eta_asymptotic, eta_exact, mixing_curve

for t in (2, 3, 4):
    print(f"t={t}")
    prev = None
    for n in range(2, 17):
        eta = eta_exact(n, t).value
        err = abs((1 << n) * eta - t * (t - 1))
        ratio = "" if prev in (None, 0) else f"{float(err / prev):.4f}"
        print(f"  N={n:2d}  eta={float(eta):.6e}  eta/leading={float(eta / eta_asymptotic(n, t)):.6f}  err ratio {ratio}")
        prev = err

print("\nmixing protocol gain, scaled by 2^(N(t-1))")
for t in (2, 3):
    vals = [float((1 << (n * (t - 1))) * mixing_curve(n, t).improvement) for n in range(2, 11)]
    print(f"  t={t}: " + "  ".join(f"{v:.4f}" for v in vals))
