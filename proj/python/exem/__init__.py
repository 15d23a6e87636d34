"""Exploratory semi-supervised EM.

Typical use::

    import exem
    raw = exem.generate_synthetic(num_classes=5, instances_per_class=200, vocab_size=50)
    parts = exem.make_partitions(raw, num_seed_classes=2)
    data = raw.featurize(exem.Family.NB)
    run = exem.exploratory_em(data, parts[0], exem.Family.NB, exem.Criterion.JS)
    exem.evaluate(data, parts[0], run)["macro_f1_seed"]

Partitions index instances of the featurized dataset, so build them from the
same cleaned data (``featurize`` only drops instances that are empty under
tf-idf; synthetic corpora normally lose none).
"""

from ._core import (
    BoundsError,
    ConfigError,
    CrpPick,
    Criterion,
    Dataset,
    DomainError,
    Family,
    InputFormat,
    NumericalError,
    ParseError,
    RunResult,
    SeedPartition,
    Selection,
    crp_gibbs,
    evaluate,
    exploratory_em,
    generate_synthetic,
    js_criterion,
    js_divergence,
    make_partitions,
    max_weight_matching,
    minmax_criterion,
    run_experiment,
    score_model,
    seed_macro_f1,
    semisup_em,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
