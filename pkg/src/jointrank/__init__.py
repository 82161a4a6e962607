"""Joint-rank-density anomaly detection for cases-by-variables data."""

from .coding import (CodedMatrix, ConsumptionRecord, DateWindow, EventRecord,
                     PartitionSpec, code_consumption, code_events,
                     double_log_transform, random_numeric_coding,
                     random_partition)
from .distance import (DistanceVector, choose_k, kaiser_guttman_k,
                       ordinal_distances, variance_fraction_k)
from .joint import (AnomalyReport, JointRankDensity, RankVector,
                    align_common_cases, detect_anomalies, joint_density,
                    rank_distances)
from .linalg import (SvdResult, ca_target_full_diagonal,
                     ca_target_sparse_diagonal, ca_target_vectorized,
                     correspondence_matrix, principal_coordinates, svd)
from .ordination import Ordination, ordinate_ca, ordinate_pca, scree
from .pipeline import PipelineConfig, run_pipeline
from .synth import SyntheticSpec, generate_synthetic

__version__ = "0.1.0"
