"""Split states into diagonal and antidiagonal parts and compare the three norms.

The split turns the indefinite cross term into a difference of squares, and the
weighted modal norm shows how a sequence can converge weakly while staying a
fixed distance away in energy.
"""
import numpy as np

from linking_saddle import (
    DiagonalSplitting,
    DomainSpec,
    StatePair,
    build_grid,
    build_modal_basis,
    mixed_weak_norm,
    weighted_modal_norm,
)

grid, op = build_grid(DomainSpec.interval(63))
split = DiagonalSplitting(grid, op)

rng = np.random.default_rng(0)
x = StatePair(rng.standard_normal(63), rng.standard_normal(63))
p = split.antidiagonal_part(x)
q = split.diagonal_part(x)

print(f"|x|^2      = {split.pair_norm(x)**2:.6f}")
print(f"|Px|^2+|Qx|^2 = {split.pair_norm(p)**2 + split.pair_norm(q)**2:.6f}  (Pythagoras)")
print(f"cross term    = {split.cross_form(x):.6f}")
print(f"half-square difference = {0.5*split.pair_norm(q)**2 - 0.5*split.pair_norm(p)**2:.6f}")

basis = build_modal_basis(split, count=32)
print(f"\nmodal basis of {basis.count} antidiagonal directions, weights 1/2, 1/4, ...")

# a bounded sequence that goes to zero weakly but not in energy
print("k   weak norm      energy norm")
for k in (0, 4, 12, 31):
    step = 0.5 * basis.direction(k)
    print(f"{k:2d}  {weighted_modal_norm(basis, step):.3e}      {split.pair_norm(step):.3f}")

y = split.antidiagonal_part(x)
print(f"\nweak norm never exceeds energy norm: "
      f"{weighted_modal_norm(basis, y):.4f} <= {split.pair_norm(y):.4f}")
print(f"mixed norm dominates both split parts: "
      f"{mixed_weak_norm(basis, x):.4f} >= |Qx| = {split.pair_norm(q):.4f}")
