/*
 * Copyright 2026 The pseudobox Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>

#include "pseudobox/scoring.hpp"

namespace pseudobox
{

std::vector<ScoredProposal> nms(std::vector<ScoredProposal> scored, double iou_threshold)
{
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredProposal & a, const ScoredProposal & b) {
                     if (a.ds != b.ds) {
                       return a.ds > b.ds;
                     }
                     const double area_a = a.proposal.box.bev_area();
                     const double area_b = b.proposal.box.bev_area();
                     if (area_a != area_b) {
                       return area_a > area_b;
                     }
                     return a.proposal.instance_id < b.proposal.instance_id;
                   });

  std::vector<ScoredProposal> kept;
  for (auto & candidate : scored) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const ScoredProposal & k) {
      return bev_iou(k.proposal.box, candidate.proposal.box) > iou_threshold;
    });
    if (!suppressed) {
      kept.push_back(std::move(candidate));
    }
  }
  return kept;
}

}  // namespace pseudobox
