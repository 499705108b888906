#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "segmarket/market.hpp"
#include "segmarket/meeting.hpp"

namespace segmarket {

/// A parsed scenario file: primitives plus an optional segmentation
/// directive. Unknown fields anywhere in the document are rejected.
struct Scenario {
  MeetingFunction meeting = MeetingFunction::ces(1.0, 1.0, 1.0);
  Prior prior = Prior::uniform(1);
  double k = 1.0;
  SurplusSplit split = SurplusSplit::constant(1.0);
  Segmentation segmentation;          // resolved from the directive
  std::string segmentation_kind;      // "perfect", "pooled", "binary", "explicit"
  std::optional<int> mesh;            // LP refinement override
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

}  // namespace segmarket
