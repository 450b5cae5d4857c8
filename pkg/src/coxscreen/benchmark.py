"""Paired Monte-Carlo benchmark: every method sees the same seeded replicates."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import baselines, metrics, screening, simulate
from .cox import FitControl
from .data import ConditioningSet
from .errors import ValidationError

CS_METHODS = ("cs-mple", "cs-wald", "cs-plik")
MARGINAL_METHODS = (baselines.PSIS_WALD, baselines.PSIS_PLIK, baselines.CORS, baselines.CRIS)
ALL_METHODS = CS_METHODS + MARGINAL_METHODS

AUTO_CONDITIONING = "auto"


def _resolve_conditioning(spec, dataset, control):
    if spec == AUTO_CONDITIONING:
        return screening.default_conditioning(dataset, control)
    if spec is None:
        return ConditioningSet((1,))
    return spec if isinstance(spec, ConditioningSet) else ConditioningSet(tuple(spec))


def _score(method, ranking, rep, conditioning, budget, sure_k):
    cond = conditioning if method in CS_METHODS else ConditioningSet()
    penalty = cond.q
    m = metrics.mms(ranking, rep.true_active, penalty, cond)
    t = metrics.tpr(ranking, rep.true_active, budget, cond)
    sure = set(rep.true_active) <= set(cond.indices) | set(ranking[:sure_k])
    return metrics.ReplicateScore(method, rep.replicate_id, m, t, sure)


def run_replicate(args):
    """Scores for one replicate; top-level so worker pools can pickle it."""
    config, replicate_id, methods, conditioning_spec, control = args
    rep = simulate.gen_replicate(config, replicate_id)
    dataset = rep.dataset
    budget = config.n
    sure_k = screening.default_top_k(config.n)
    scores = []

    cs_requested = [m for m in methods if m in CS_METHODS]
    if cs_requested:
        cond = _resolve_conditioning(conditioning_spec, dataset, control)
        stats = tuple(m.split("-", 1)[1] for m in cs_requested)
        result = screening.screen(dataset, cond, control, statistics=stats)
        for method in cs_requested:
            ranking = result.rankings[method.split("-", 1)[1]]
            scores.append(_score(method, ranking, rep, cond, budget, sure_k))

    psis_requested = [m for m in methods if m in (baselines.PSIS_WALD, baselines.PSIS_PLIK)]
    if psis_requested:
        flavors = tuple(m.split("-", 1)[1] for m in psis_requested)
        marginal = screening.screen(dataset, ConditioningSet(), control, statistics=flavors)
        for method in psis_requested:
            ranking = marginal.rankings[method.split("-", 1)[1]]
            scores.append(_score(method, ranking, rep, ConditioningSet(), budget, sure_k))

    if baselines.CORS in methods:
        scores.append(
            _score(baselines.CORS, baselines.cors(dataset).ranking, rep, ConditioningSet(), budget, sure_k)
        )
    if baselines.CRIS in methods:
        scores.append(
            _score(baselines.CRIS, baselines.cris(dataset).ranking, rep, ConditioningSet(), budget, sure_k)
        )
    order = {m: i for i, m in enumerate(methods)}
    return sorted(scores, key=lambda s: order[s.method])


def run_benchmark(
    config: simulate.SimConfig,
    replicates: int,
    methods=ALL_METHODS,
    conditioning=None,
    control: FitControl = FitControl(),
    workers: int = 1,
):
    """Run all methods on `replicates` shared datasets; returns (scores, summaries)."""
    methods = tuple(methods)
    for m in methods:
        if m not in ALL_METHODS:
            raise ValidationError(f"unknown method '{m}'; choose from {ALL_METHODS}")
    if replicates < 1:
        raise ValidationError("need at least 1 replicate")
    if config.censor_upper is None and config.censor_target > 0:
        c, _ = simulate.calibrate_censoring(config)
        config = replace(config, censor_upper=c)

    jobs = [(config, rid, methods, conditioning, control) for rid in range(replicates)]
    if workers <= 1:
        per_rep = [run_replicate(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_rep = list(pool.map(run_replicate, jobs, chunksize=max(1, replicates // (4 * workers))))
    scores = [s for rep_scores in per_rep for s in rep_scores]
    summaries = [
        metrics.summarize([s for s in scores if s.method == method]) for method in methods
    ]
    return scores, summaries
