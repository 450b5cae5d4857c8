"""Paired comparison of screening methods on a simulated design.

Every method sees the same seeded replicates, so differences in minimum
model size (MMS) and true positive rate (TPR) are not Monte-Carlo noise
from different datasets. This is a scaled-down run; increase p and the
replicate count to reproduce benchmark-quality numbers.

Run with: python demos/benchmark_comparison.py
"""

from coxscreen import ConditioningSet, example_config
from coxscreen.benchmark import run_benchmark

config = example_config(2, n=100, p=200, censor_target=0.2, seed=7)
methods = ("cs-mple", "cs-wald", "cs-plik", "psis-wald", "psis-plik", "cors", "cris")

scores, summaries = run_benchmark(
    config,
    replicates=20,
    methods=methods,
    conditioning=ConditioningSet((1,)),
)

print(f"design: n={config.n}, p={config.p}, target censoring {config.censor_target}")
print(f"{'method':<10} {'median MMS':>10} {'IQR':>8} {'median TPR':>10} {'sure rate':>10}")
for s in summaries:
    print(f"{s.method:<10} {s.median_mms:>10g} {s.iqr_mms:>8g} "
          f"{s.median_tpr:>10g} {s.sure_rate:>10g}")

print("\nthe active set here is {1, p}; variable p is marginally weak, which is")
print("why the marginal baselines need a much larger model to cover it")
