#include "lattice_input.hpp"

#include "arcoh/error.hpp"

#include <json.hpp>

#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

namespace arcoh::cli {

namespace {

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "not a number: '" + item + "'");
    }
    if (used != item.size()) throw Error(ErrorCode::invalid_argument, "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::invalid_argument, "empty number list");
  return out;
}

int as_count(double v, const char* what) {
  if (v < 1 || v != static_cast<int>(v)) throw Error(ErrorCode::invalid_rank, std::string(what) + " must be a positive integer");
  return static_cast<int>(v);
}

MetrizedLattice diagonal(const NumberField& f, const std::vector<double>& scales) {
  std::optional<MetrizedLattice> out;
  for (double c : scales) {
    MetrizedLattice piece = scale(standard_lattice(f, 1), c);
    out = out ? direct_sum(*out, piece) : piece;
  }
  return *out;
}

MetrizedLattice from_file(const std::string& path, const std::optional<FieldSpec>& requested) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open lattice file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    FieldSpec spec = requested.value_or(FieldSpec::rational());
    if (doc.contains("field")) {
      const FieldSpec own = FieldSpec::parse(doc.at("field").get<std::string>());
      if (requested && !(own == *requested))
        throw Error(ErrorCode::field_mismatch, "lattice file is over " + own.to_string() + ", requested " +
                                                   requested->to_string());
      spec = own;
    }
    const NumberField field = NumberField::make(spec);
    const auto rows = doc.at("basis").get<std::vector<std::vector<double>>>();
    const int n = doc.contains("n") ? doc.at("n").get<int>() : static_cast<int>(rows.size()) / field.degree();
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != basis.cols())
        throw Error(ErrorCode::dimension_mismatch, "ragged basis in '" + path + "'");
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    MetrizedLattice l = from_basis(field, n, basis);
    return doc.contains("label") ? l.with_label(doc.at("label").get<std::string>()) : l;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, "malformed lattice file '" + path + "': " + e.what());
  }
}

}  // namespace

MetrizedLattice load_lattice(const std::string& source, const std::optional<FieldSpec>& field) {
  const auto colon = source.find(':');
  const std::string kind = colon == std::string::npos ? "" : source.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : source.substr(colon + 1);
  const NumberField f = NumberField::make(field.value_or(FieldSpec::rational()));
  if (kind == "standard") return standard_lattice(f, as_count(split_numbers(rest).at(0), "rank")).with_label(source);
  if (kind == "diag") return diagonal(f, split_numbers(rest)).with_label(source);
  if (kind == "random") {
    const auto p = split_numbers(rest);
    if (p.size() != 4) throw Error(ErrorCode::invalid_argument, "random:<n>,<degree>,<spread>,<seed>");
    return random_lattice(f, as_count(p[0], "rank"), p[1], p[2], static_cast<std::uint64_t>(p[3])).with_label(source);
  }
  return from_file(source, field);
}

Complex parse_complex(const std::string& text) {
  static const std::regex full(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(?:([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*i)?\s*$)");
  static const std::regex imaginary(R"(^\s*([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*i\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, imaginary)) {
    const double magnitude = m[2].matched ? std::stod(m[2].str()) : 1.0;
    return {0.0, m[1].str() == "-" ? -magnitude : magnitude};
  }
  if (!text.empty() && std::regex_match(text, m, full) && (m[1].matched || m[2].matched)) {
    const double re = m[1].matched ? std::stod(m[1].str()) : 0.0;
    double im = 0.0;
    if (m[2].matched) {
      im = m[3].matched ? std::stod(m[3].str()) : 1.0;
      if (m[2].str() == "-") im = -im;
    }
    return {re, im};
  }
  throw Error(ErrorCode::invalid_argument, "cannot parse complex number '" + text + "'");
}

}  // namespace arcoh::cli
