"""The randomized snapshot schedule, checked three ways.

The loopless optimizer replaces SARAH's inner loop with a per-iteration coin:
with probability 1/m the estimator is refreshed by a full (snapshot)
gradient.  Writing N(t1:t) for "the last refresh at or before t happened at
t1", the law is

    P(N(t1:t)) = (1/m) (1 - 1/m)^(t - t1)   for 1 <= t1 <= t
    P(N(0:t))  = (1 - 1/m)^t                (never refreshed yet)

and these events partition the sample space.  Below: exhaustive enumeration
of all coin sequences, a Monte-Carlo frequency check, and the geometric law
of the gaps between refreshes.
"""

import numpy as np

from vropt.diagnostics import enumerate_snapshot_law, geometric_gap_chisquare
from vropt.sampling import Rng, snapshot_event_probability

m, t = 4, 6
print(f"exhaustive enumeration of all 2^{t} sequences, m={m}:")
rep = enumerate_snapshot_law(m, t)[-1]
for t1 in range(t + 1):
    print(f"  last snapshot at t1={t1}: enumerated {rep.enumerated[t1]:.10f}"
          f"  formula {rep.formula[t1]:.10f}")
print(f"  max discrepancy {rep.max_discrepancy:.2e}, "
      f"total mass {rep.total_mass:.12f}")

N = 400_000
flags = Rng(0, 1).below_block(m, N) == 0
print(f"\n{N} coin flips at 1/m = {1 / m}: empirical mean {flags.mean():.5f}")

pos = np.flatnonzero(flags)
gaps = np.diff(pos)
chi = geometric_gap_chisquare(gaps[:50_000], m)
print(f"gap law: mean gap {gaps.mean():.3f} (expect {m}); chi-square "
      f"{chi.statistic:.1f} vs critical {chi.critical:.1f} at "
      f"alpha={chi.alpha} -> {'consistent' if chi.passed else 'REJECTED'}")

print("\nclosed form, m=2, t=3:",
      [snapshot_event_probability(2, 3, t1) for t1 in range(4)])
