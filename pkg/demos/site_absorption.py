"""Absorption probability per x-axis site, three ways, for a walk with positive drifts."""

from quarterwalk import StartPoint, WalkParams, dp_absorption, non_absorption_probability, site_asymptotics, site_probability

params = WalkParams(0.3, 0.2, 0.3, 0.2)
start = StartPoint(2, 1)
table = dp_absorption(params, start, i_cap=60, n_cap=4000, grid_cap=300)
dp_totals = table.site_totals()[0]
law = site_asymptotics(params, start)

print(f"{'i':>4} {'lattice':>14} {'integral':>14} {'asymptotic':>14}")
for i in (1, 2, 5, 10, 20, 40, 60):
    print(f"{i:>4} {dp_totals[i]:14.6e} {site_probability(params, start, i):14.6e} {law(i):14.6e}")
print(f"mass not absorbed within the caps: {table.tail_mass:.4f} (escape probability {non_absorption_probability(params, start):.4f})")
