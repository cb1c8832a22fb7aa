# Copyright 2026 The pseudobox Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Pseudo-label generation for LiDAR 3D detection from 2D instance masks."""

from ._core import (
    Box,
    Calibration,
    ConfigError,
    DegenerateClusterError,
    EmptyForegroundError,
    InputError,
    InstanceMask,
    MalformedFileError,
    PipelineConfig,
    SceneTooDenseError,
    SynthConfig,
    bev_iou,
    boundary_distance,
    bucket_percentages,
    dbscan,
    distribution_score,
    ds_score,
    encode_rle,
    evaluate,
    extract_seed_points,
    fit_box,
    generate,
    iou3d,
    meta_shape_score,
    nms,
    process_frame,
    radius_schedule,
    sample_scene,
    shrink_mask,
    synthesize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
