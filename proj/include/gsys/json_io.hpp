#pragma once

#include <json.hpp>

#include "gsys/classify.hpp"
#include "gsys/verify.hpp"

namespace gsys {

// Encoders. Report encodings follow the published schemas exactly.
nlohmann::json measure_to_json(const MeasureSpec& m);
nlohmann::json process_to_json(const ProcessSpec& p);
nlohmann::json pair_to_json(const PairSpec& p);
nlohmann::json stationarity_report_to_json(const StationarityReport& r);
nlohmann::json equal_in_law_mc_report_to_json(const EqualInLawMcReport& r);
nlohmann::json classification_report_to_json(const ClassificationReport& r);
nlohmann::json certificate_to_json(const EqualInLawCertificate& c);

// Strict decoders: unknown object keys raise ConfigError with a JSON path.
MeasureSpec measure_from_json(const nlohmann::json& j, const std::string& ctx = "measure");
ProcessSpec process_from_json(const nlohmann::json& j, const std::string& ctx = "process");
PairSpec pair_from_json(const nlohmann::json& j, const std::string& ctx = "pair");
TimePoint time_from_json(const nlohmann::json& j, int dim, const std::string& ctx);
std::vector<Interval> boxes_from_json(const nlohmann::json& j, const std::string& ctx);
StatDesign design_from_json(const nlohmann::json& j, int dim, const std::string& ctx = "design");

}  // namespace gsys
