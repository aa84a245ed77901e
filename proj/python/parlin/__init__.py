# Copyright 2026 The Parlin Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Distributed least-squares regression with a master/worker cluster."""

from ._parlin import (
    GramPartial,
    ModelCoefficients,
    ParlinError,
    compute_gradient_partial,
    compute_gram_partial,
    format_percent,
    gd_step,
    generate_synthetic,
    make_partitions,
    merge_gram,
    percent_reduction,
    predict,
    rmse,
    solve_normal,
    standalone_run,
    summarize,
    train_test_split,
)

__all__ = [
    "GramPartial",
    "ModelCoefficients",
    "ParlinError",
    "compute_gradient_partial",
    "compute_gram_partial",
    "format_percent",
    "gd_step",
    "generate_synthetic",
    "make_partitions",
    "merge_gram",
    "percent_reduction",
    "predict",
    "rmse",
    "solve_normal",
    "standalone_run",
    "summarize",
    "train_test_split",
]
