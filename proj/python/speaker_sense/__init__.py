# Copyright 2026 The Speaker Sense Authors.
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
"""Speaker-name sensitivity toolkit."""

from ._core import (
    Error,
    InfeasibleError,
    InvalidArgument,
    ParseError,
    back_substitute,
    bleu,
    cross_attention_loss,
    decoder_hidden_loss,
    derive_seed,
    detect_mentions,
    paired_significance,
    perturb,
    popularity_groups,
    replace_names,
    rouge_l,
    rouge_n,
    score,
    sensitivity,
    tokenize,
    total_loss,
    uniqueness_score,
)

__version__ = "0.1.0"
