from .candidates import (NIL, Candidate, candidate_metrics,
                         format_candidate_report, generate_candidates,
                         generate_with_diagnostics)
from .queries import expand_queries
from .features import RawFeatures, raw_features, linking_word_pieces
from .ranker import (Ranker, RankerConfig, RankerOutput, link, rank,
                     train_ranker)

__all__ = ["NIL", "Candidate", "candidate_metrics",
           "format_candidate_report", "generate_candidates",
           "generate_with_diagnostics", "expand_queries", "RawFeatures",
           "raw_features", "linking_word_pieces", "Ranker", "RankerConfig",
           "RankerOutput", "link", "rank", "train_ranker"]
