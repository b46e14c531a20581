#include "electrogp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "electrogp/error.hpp"

namespace electrogp {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Table read_csv(std::istream& in, bool allow_missing) {
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: empty input (expected a header row)");
  for (std::string_view name : split(line)) table.header.emplace_back(name);
  const std::size_t cols = table.header.size();

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != cols) {
      std::ostringstream msg;
      msg << "csv: row " << line_no << " has " << fields.size() << " fields, header has " << cols;
      throw ValidationError(msg.str());
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string_view f = fields[c];
      if (f.empty()) {
        if (!allow_missing) {
          std::ostringstream msg;
          msg << "csv: row " << line_no << ", column " << c + 1 << " (" << table.header[c]
              << ") is empty";
          throw ValidationError(msg.str());
        }
        values.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "csv: row " << line_no << ", column " << c + 1 << " (" << table.header[c]
            << "): '" << f << "' is not a finite number";
        throw ValidationError(msg.str());
      }
      values.push_back(v);
    }
    ++rows;
  }

  table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
  return table;
}

Table read_csv(const std::filesystem::path& path, bool allow_missing) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_csv(in, allow_missing);
}

std::string format_real(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols())
    throw ValidationError("csv: header length does not match column count");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_real(values(r, c));
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_csv(out, header, values);
}

std::string data_checksum(const Eigen::MatrixXd& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(data.rows()));
  mix(static_cast<std::uint64_t>(data.cols()));
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      std::uint64_t bits = 0;
      const double v = data(r, c);
      std::memcpy(&bits, &v, sizeof bits);
      mix(bits);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string model_to_json(const FittedModel& model) {
  json doc;
  doc["format"] = "electrogp-model";
  doc["version"] = 1;
  doc["n"] = model.n();
  doc["d"] = model.d();
  doc["data_checksum"] = data_checksum(model.data());
  doc["corp"] = {{"r", model.corp().r}, {"quad_points", model.corp().quad_points}};
  doc["include_prior"] = model.include_prior();
  doc["latent"] = model.latent().vector();
  json hyper = json::array();
  for (const KernelParams& p : model.theta().dims)
    hyper.push_back({{"phi", p.phi()}, {"alpha", p.alpha()}, {"sigma2", p.sigma2()}});
  doc["hyperparameters"] = std::move(hyper);
  doc["centering"] = model.centering();
  doc["objective"] = model.objective_value();
  doc["stages"] = {{"initial", model.stages.initial},
                   {"hyper_only", model.stages.hyper_only},
                   {"final", model.stages.final},
                   {"hyper_iterations", model.stages.hyper_iterations},
                   {"joint_iterations", model.stages.joint_iterations}};
  return doc.dump(2) + "\n";
}

FittedModel model_from_json(const std::string& text, const Eigen::MatrixXd& data) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "electrogp-model")
      throw ValidationError("model: not an electrogp model document");
    const auto n = doc.at("n").get<std::size_t>();
    const auto d = doc.at("d").get<std::size_t>();
    if (n != static_cast<std::size_t>(data.rows()) || d != static_cast<std::size_t>(data.cols()) ||
        doc.at("data_checksum").get<std::string>() != data_checksum(data)) {
      throw IntegrityError("model/data checksum mismatch: the model was fitted to different data");
    }

    CorpConfig corp;
    corp.r = doc.at("corp").at("r").get<double>();
    corp.quad_points = doc.at("corp").at("quad_points").get<int>();

    HyperParams theta;
    for (const json& h : doc.at("hyperparameters"))
      theta.dims.push_back(KernelParams::natural(h.at("phi").get<double>(), h.at("alpha").get<double>(),
                                                 h.at("sigma2").get<double>()));
    FittedModel model(data, LatentConfig(doc.at("latent").get<std::vector<double>>()),
                      std::move(theta), corp, doc.at("centering").get<std::vector<double>>(),
                      doc.value("include_prior", true));
    if (doc.contains("stages")) {
      const json& s = doc.at("stages");
      model.stages.initial = s.value("initial", 0.0);
      model.stages.hyper_only = s.value("hyper_only", 0.0);
      model.stages.final = s.value("final", 0.0);
      model.stages.hyper_iterations = s.value("hyper_iterations", 0);
      model.stages.joint_iterations = s.value("joint_iterations", 0);
    }
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: missing or mistyped field: ") + e.what());
  }
}

double stored_objective(const std::string& text) {
  try {
    return json::parse(text).at("objective").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: cannot read objective: ") + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

void save_model(const std::filesystem::path& path, const FittedModel& model) {
  write_text(path, model_to_json(model));
}

FittedModel load_model(const std::filesystem::path& path, const Eigen::MatrixXd& data) {
  return model_from_json(read_text(path), data);
}

}  // namespace electrogp
