#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "lrexp/factor_model.hpp"
#include "lrexp/fit.hpp"
#include "lrexp/table.hpp"

namespace lrexp {

using Json = nlohmann::ordered_json;

// One matrix row per line. Empty fields and "nan" (any case) are missing.
MaskedMatrix read_matrix_csv(std::istream& in, bool header = false);
void write_matrix_csv(std::ostream& out, const MaskedMatrix& x, bool header = false);
MaskedMatrix read_matrix_csv(const std::filesystem::path& path, bool header = false);
void write_matrix_csv(const std::filesystem::path& path, const MaskedMatrix& x, bool header = false);

struct SavedModel {
  FactorModel model;
  Tau tau{0.5};
  NormalizationInfo info;
};

Json model_to_json(const SavedModel& saved);
SavedModel model_from_json(const Json& doc);
void save_model(const std::filesystem::path& path, const SavedModel& saved);
SavedModel load_model(const std::filesystem::path& path);

Json report_to_json(const FitReport& report);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path, const std::vector<Column>& schema);

}  // namespace lrexp
