"""Lane-detection geometry, losses and CULane-style evaluation on numpy."""
from .coordmaps import CoordMaps, make_coord_maps
from .errors import DatasetError, InvalidLaneError, LaneFileError, LaneKitError
from .evaluation import (
    Categories,
    EvalConfig,
    MatchResult,
    MetricsReport,
    evaluate_dataset,
    f1_from_counts,
    iou_matrix,
    lane_iou,
    match_iou_matrix,
    match_lanes,
    rasterize_lane,
)
from .fov import FovWindow, clip_lane, evaluate_fov, fov_window
from .lane_model import ImageSpec, Lane, SampledLane, sample_lane_at_rows
from .losses import (
    DIoUCoefficients,
    ExpansionConfig,
    LossWeights,
    d_iou_grad,
    d_iou_loss,
    dl_iou,
    dr_iou,
    p_iou,
    total_loss_v1,
    total_loss_v2,
)
from .sampling import RowSampler, SamplingMode, dedup_rows, focusing_rows, uniform_rows

__version__ = "0.1.0"
