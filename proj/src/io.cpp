#include "mixedts/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mixedts/error.hpp"

namespace mixedts::io {

namespace {

double number(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw InvalidParameter(std::string("params: missing key '") + key + "'");
  if (!it->is_number()) throw InvalidParameter(std::string("params: '") + key + "' must be a number");
  return it->get<double>();
}

CtsParams cts_from_json(const Json& j) {
  return {number(j, "alpha"), number(j, "lambda_plus"), number(j, "lambda_minus")};
}

void put_cts(Json& j, const CtsParams& c) {
  j["alpha"] = c.alpha;
  j["lambda_plus"] = c.lambda_plus;
  j["lambda_minus"] = c.lambda_minus;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

ParamSet params_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidParameter("params: expected a JSON object");
  if (j.contains("marginals")) {
    const Json& ms = j.at("marginals");
    if (!ms.is_array() || ms.empty()) throw InvalidParameter("params: 'marginals' must be a non-empty array");
    MultivariateParams p;
    for (const Json& m : ms) {
      if (!m.is_object()) throw InvalidParameter("params: each marginal must be an object");
      MarginalBlock b;
      b.mu = number(m, "mu");
      b.beta = number(m, "beta");
      b.cts = cts_from_json(m);
      b.l = number(m, "l");
      b.m = number(m, "m");
      p.marginals.push_back(b);
    }
    p.n = number(j, "n");
    p.k = j.contains("k") ? number(j, "k") : 1.0;
    validate(p);
    return p;
  }
  UnivariateParams p;
  p.mu = number(j, "mu");
  p.beta = number(j, "beta");
  p.cts = cts_from_json(j);
  p.a = number(j, "a");
  p.b = number(j, "b");
  validate(p);
  return p;
}

Json to_json(const UnivariateParams& p) {
  Json j;
  j["mu"] = p.mu;
  j["beta"] = p.beta;
  put_cts(j, p.cts);
  j["a"] = p.a;
  j["b"] = p.b;
  return j;
}

Json to_json(const MultivariateParams& p) {
  Json j;
  Json ms = Json::array();
  for (const MarginalBlock& b : p.marginals) {
    Json m;
    m["mu"] = b.mu;
    m["beta"] = b.beta;
    put_cts(m, b.cts);
    m["l"] = b.l;
    m["m"] = b.m;
    ms.push_back(std::move(m));
  }
  j["marginals"] = std::move(ms);
  j["n"] = p.n;
  j["k"] = p.k;
  return j;
}

Json to_json(const ParamSet& p) {
  return std::visit([](const auto& v) { return to_json(v); }, p);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw InvalidParameter("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string sample_to_csv(const SampleMatrix& sample) {
  std::string out;
  for (Eigen::Index c = 0; c < sample.cols(); ++c) {
    if (c > 0) out += ',';
    out += 'y' + std::to_string(c + 1);
  }
  out += '\n';
  for (Eigen::Index r = 0; r < sample.rows(); ++r) {
    for (Eigen::Index c = 0; c < sample.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_double(sample(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string columns_to_csv(const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw InvalidParameter("csv: header/column count mismatch");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) out += ',';
    out += header[c];
  }
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw InvalidParameter("csv: columns differ in length");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c > 0) out += ',';
      out += format_double(columns[c].at(r));
    }
    out += '\n';
  }
  return out;
}

SampleMatrix sample_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidParameter("csv: missing header row");
  const std::size_t cols = split(line).size();
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols) {
      throw InvalidParameter("csv: line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(cols));
    }
    for (std::string_view cell : cells) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw InvalidParameter("csv: line " + std::to_string(line_no) + ": '" +
                               std::string(cell) + "' is not a number");
      }
      values.push_back(v);
    }
    ++rows;
  }
  SampleMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
    }
  }
  return m;
}

SampleMatrix read_sample(const std::filesystem::path& path) {
  return sample_from_csv(read_text(path));
}

}  // namespace mixedts::io
