"""
The bounded and the standard ADMM recursions are the same algorithm.

Started consistently, the bounded form's x at step k equals the standard
form's x at step k + 1, while z and the multiplier agree step by step. A huge
box around the multiplier changes nothing once the projection stops acting.
"""

import numpy as np

from tvfixpoint import make_scenario, running, sets

stream = make_scenario({"scenario": "tv_admm_consensus", "omega": 0.0, "T": 100, "seed": 3})
std = running.run_admm(stream, 1.0, form="standard")
dim = std.aux["p"].shape[1]
bnd = running.run_admm(stream, 1.0, {"x": std.aux["x"][1]}, B=sets.whole_space(dim), form="bounded")
T = stream.horizon
print("max |x_bounded[k] - x_standard[k+1]|:", f"{np.abs(bnd.aux['x'][:T] - std.aux['x'][1:]).max():.2e}")
print("max |z_bounded[k] - z_standard[k]|:  ", f"{np.abs(bnd.aux['z'] - std.aux['z']).max():.2e}")
print("max |p_bounded[k] - nu_standard[k]|: ", f"{np.abs(bnd.aux['p'] - std.aux['nu']).max():.2e}")

huge = running.run_admm(stream, 1.0, {"x": std.aux["x"][1]}, B=sets.box(-1e6, 1e6, dim), form="bounded")
print("huge box, steps 20 onward:           ", f"{np.abs(huge.aux['z'][20:] - std.aux['z'][20:]).max():.2e}")
print(f"declared alpha {bnd.alpha[0]:.4f}, contraction {bnd.contraction[0]:.4f}")
