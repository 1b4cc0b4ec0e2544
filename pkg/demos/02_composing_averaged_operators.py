"""
Composing averaged operators and auditing the composed constant.

A projection (1/2-averaged) after a gradient step (lambda M / 2-averaged) is
averaged with constant a1 + a2 - 2 a1 a2 over 1 - a1 a2. The audit below
checks the defining inequality on ten thousand random pairs.
"""

import numpy as np

from tvfixpoint import functions as fn
from tvfixpoint import operators as ops
from tvfixpoint import sets

rng = np.random.default_rng(0)
n = 4
R = rng.normal(size=(n, n))
f = fn.Quadratic(R @ R.T + np.eye(n))
box = sets.box(-0.5, 0.5, n)

for scale in (0.5, 1.0, 1.5, 1.9):
    lam = scale / f.M
    grad = ops.gradient_step(f, lam)
    T = ops.compose_averaged(ops.projection_operator(box), grad)
    ok, worst = ops.check_averaged(T, T.alpha, ops.random_pairs(rng, n, 10_000))
    print(f"lambda M = {scale:.1f}: gradient alpha {grad.alpha:.3f}, composed alpha {T.alpha:.4f}, "
          f"audit {'passes' if ok else 'FAILS'} (worst {worst:+.2e})")

# an operator declared more averaged than it is fails the audit
reflection = ops.AveragedOperator(lambda x: -x, 0.9, n)
ok, worst = ops.check_averaged(reflection, 0.5, ops.random_pairs(rng, n, 1000))
print(f"reflection x -> -x claimed 1/2-averaged: audit {'passes' if ok else 'fails'} (worst {worst:+.2e})")
