"""Why coherent querying wins: the incoherent baselines.

A single query of a triad channel reduces to discriminating three states
with pairwise overlap 1/2, where the best single measurement succeeds
with probability 2/3. Repeating that measurement four times and taking a
majority vote reaches about 74%; even a unanimous quadruple outcome only
carries 99.2% confidence; and four rounds of optimal unambiguous
discrimination conclude with probability 93.75%. The coherent four-query
program identifies the channel deterministically.
"""

from spinkey import baselines

triad = baselines.symmetric_states(3)
print("pairwise overlap magnitudes:",
      [round(v, 6) for v in triad.overlap_magnitudes()])

print(f"\nsingle-shot minimum error:     {baselines.me_single_shot(triad):.6f}")
for k in (2, 3, 4, 6, 8):
    print(f"majority vote of {k} queries:    {baselines.me_majority(triad, k):.6f}")
print(f"posterior, 4 unanimous:        {baselines.posterior_all_agree(triad, 4):.6f}")
print(f"unambiguous, single trial:     {baselines.ud_success(triad):.6f}")
print(f"unambiguous, best of 4 trials: {baselines.ud_multi(triad, 4):.6f}")

print("\ncomparison against a 99.4%-accurate coherent run:")
for row in baselines.advantage_report(0.994):
    flag = "" if row["beaten"] is None else ("  beaten" if row["beaten"] else "  NOT beaten")
    print(f"   {row['strategy']:28s} {row['success_probability']:.6f}{flag}")
