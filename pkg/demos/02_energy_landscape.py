"""Walk the energy of the coupled system on the smallest possible mesh.

With a single interior node and cubic couplings the functional is a polynomial in
two variables, so every feature (the saddle at u = v = 2*sqrt(2), the negative
escape directions) can be seen by printing numbers.
"""
import numpy as np

from linking_saddle import (
    DomainSpec,
    ProblemSpec,
    StatePair,
    discretize,
    evaluate_J,
    power_nonlinearity,
    validate_hypotheses,
)

spec = ProblemSpec(DomainSpec.interval(1), power_nonlinearity(), lam=0.0, delta=0.0)
problem = discretize(spec)

crest = 2.0 * np.sqrt(2.0)
for a in (0.5, 1.0, 2.0, crest, 4.0):
    br = evaluate_J(problem, StatePair(np.array([a]), np.array([a])))
    print(f"J({a:6.4f}, {a:6.4f}) = {br.total:12.6f}   "
          f"cross {br.cross:10.4f}  potentials {br.potential_u + br.potential_v:10.4f}")

print(f"\nalong the diagonal the maximum sits at 2*sqrt(2) with value "
      f"{evaluate_J(problem, StatePair(np.array([crest]), np.array([crest]))).total:.1f}")

# antidiagonal directions are downhill from the origin: strongly indefinite
for a in (0.5, 1.0, 2.0):
    br = evaluate_J(problem, StatePair(np.array([a]), np.array([-a])))
    print(f"J({a:4.1f}, {-a:4.1f}) = {br.total:10.4f}")

report = validate_hypotheses(problem.nl)
print(f"\nstructural hypotheses hold: {report.all_ok}")
print(f"  growth bound        {report.growth_ok}")
print(f"  small-amplitude     {report.small_amplitude_ok}")
print(f"  superquadratic      {report.superquadratic_ok}")
