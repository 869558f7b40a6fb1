// JSON/CSV serialization for reports and function values, plus the config
// hash echoed into every output file.
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "lavlab/func_model.hpp"
#include "lavlab/interval_set.hpp"
#include "lavlab/lavrentiev.hpp"
#include "lavlab/smoothing.hpp"

namespace lavlab {

using nlohmann::json;

// FNV-1a over the canonical dump of the effective config.
std::string config_hash(const json& config);

json to_json(const RealFunc& f);
json to_json(const ConditionReport& report);
json to_json(const GapReport& report);
json to_json(const Certificate& cert);
json to_json(const IntervalSet& set);
json to_json(const Partition& partition);
json to_json(const LevelPartitionReport& report);

// Numbers are printed with 17 significant digits so identical runs produce
// byte-identical files.
std::string csv_number(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lavlab
