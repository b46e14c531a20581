#pragma once

// File formats: headered numeric CSV datasets and the JSON model document.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "electrogp/model.hpp"

namespace electrogp {

struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // empty fields parse as NaN
};

// Throws ValidationError naming the row/column of the first malformed field.
// Row numbers count the header as line 1.
Table read_csv(std::istream& in, bool allow_missing = false);
Table read_csv(const std::filesystem::path& path, bool allow_missing = false);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values);

// Shortest decimal form that round-trips (17 significant digits at most).
std::string format_real(double v);

// FNV-1a over the IEEE bit patterns of the matrix, row-major, with the shape
// mixed in. Rendered as 16 hex digits.
std::string data_checksum(const Eigen::MatrixXd& data);

std::string model_to_json(const FittedModel& model);
// Rebuilds the model against `data`; throws IntegrityError if the stored
// checksum does not match.
FittedModel model_from_json(const std::string& json, const Eigen::MatrixXd& data);

void save_model(const std::filesystem::path& path, const FittedModel& model);
FittedModel load_model(const std::filesystem::path& path, const Eigen::MatrixXd& data);

// Stored objective recorded in a model document.
double stored_objective(const std::string& json);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace electrogp
