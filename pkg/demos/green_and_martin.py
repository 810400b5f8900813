"""Visit counts against their asymptotic laws, then the Martin kernel across directions."""

import math

import numpy as np

from quarterwalk import StartPoint, WalkParams, green_asymptotics, green_box, martin_kernel

symmetric = WalkParams(0.25, 0.25, 0.25, 0.25)
drifting = WalkParams(0.3, 0.2, 0.3, 0.2)
origin = StartPoint(1, 1)

for params, box in ((symmetric, 400), (drifting, 300)):
    table = green_box(params, origin, box)
    print(f"{params.drift_class.value}: box {box}, exit probability {table.residual_bound:.2e}")
    for i, j in ((10, 10), (20, 20), (40, 20), (60, 60)):
        law = green_asymptotics(params, origin, i, j).value
        print(f"  G({i},{j}) = {table.G[i, j]:.6e}  law {law:.6e}  ratio {table.G[i, j] / law:.4f}")

start = StartPoint(2, 3)
print(f"\nMartin kernel of {drifting.drift_class.value} from {start.n0, start.m0}")
for gamma in np.linspace(0, math.pi / 2, 7):
    print(f"  gamma = {gamma:.3f}  K = {martin_kernel(drifting, start, gamma):.6f}")
print(f"  axis-x K = {martin_kernel(drifting, start, 'axis-x'):.6f}, axis-y K = {martin_kernel(drifting, start, 'axis-y'):.6f}")
