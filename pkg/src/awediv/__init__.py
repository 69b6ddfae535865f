"""Accuracy-weighted ensembles for drifting streams, with ensemble
diversity measured in block, incremental, sliding-window and fading modes."""

from .core import (Chunk, ContingencyTable, Instance, LabelIndex, OracleMatrix,
                   contingency_from_oracle)
from .diversity import (AccuracySummary, NonPairwiseMeasures, PairwiseMeasures,
                        ensemble_accuracy, nonpairwise_measures, pairwise_averages,
                        pairwise_measures, static_measures)
from .ensemble import (AccuracyWeightedEnsemble, BenefitMatrix, EnsembleConfig,
                       EnsembleMember, WeightReport, benefit_of_classifier,
                       mse_of_classifier, mse_random, predict_weighted, reweight)
from .learners import ClassDistribution, decision_stump_fit, naive_bayes_fit
from .stream_diversity import (DiversityReport, FadingCounts, FadingTracker,
                               PairCountState, WindowState, block_report,
                               fading_measures, fading_update, incremental_update,
                               window_report)
from .streams import (ConceptParams, CsvSchema, DriftEvent, DriftSchedule, chunker,
                      generate, open_csv)

__version__ = "0.1.0"
