from .benchmark import (MetricsReport, SamplerConfig, geometric_checkpoints, iterations_to_reach,
                        run_benchmark)
from .metrics import all_metrics, auc_pr, auc_roc, p_plus_minus
from .synthetic import (SyntheticGgmInstance, chain_ising_instance, generate_bvs_instance,
                        generate_ggm_instance, gibbs_ising)

__all__ = [
    "auc_pr", "auc_roc", "p_plus_minus", "all_metrics", "generate_ggm_instance",
    "generate_bvs_instance", "chain_ising_instance", "gibbs_ising", "SyntheticGgmInstance",
    "SamplerConfig", "MetricsReport", "run_benchmark", "iterations_to_reach",
    "geometric_checkpoints",
]
