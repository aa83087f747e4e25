// Copyright 2026 The curvlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "curvlab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace curvlab::io {

std::string format_double(double v) {
  char buf[64];
  // 17 significant digits always round-trip; use the shortest precision that
  // reproduces the value so files stay readable.
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ============================================================================
// Tensor format
// ============================================================================

std::string write_tensor_string(const CurvatureTensor& r) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"n\": " << r.dim() << ",\n";
  out << "  \"format\": \"sym-reduced\",\n";
  out << "  \"entries\": [\n";
  const core::PairBasis& basis = r.pairs();
  bool first = true;
  for (int a = 0; a < basis.size(); ++a)
    for (int b = a; b < basis.size(); ++b) {
      const auto [i, j] = basis.pair(a);
      const auto [k, l] = basis.pair(b);
      if (!first) out << ",\n";
      first = false;
      out << "    [" << i << ", " << j << ", " << k << ", " << l << ", "
          << format_double(r.pair_matrix()(a, b)) << "]";
    }
  out << "\n  ]\n}\n";
  return out.str();
}

CurvatureTensor read_tensor_string(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("tensor document is not valid JSON: ") +
                     e.what());
  }
  if (!doc.contains("n") || !doc.contains("format") || !doc.contains("entries"))
    throw InputError("tensor document needs fields n, format, entries");
  if (doc["format"] != "sym-reduced")
    throw InputError("unsupported tensor format '" +
                     doc["format"].get<std::string>() + "'");
  const int n = doc["n"].get<int>();
  std::vector<core::TensorEntry> entries;
  for (const auto& item : doc["entries"]) {
    if (!item.is_array() || item.size() != 5)
      throw InputError("each entry must be [i, j, k, l, value]");
    entries.push_back(core::TensorEntry{item[0].get<int>(), item[1].get<int>(),
                                        item[2].get<int>(), item[3].get<int>(),
                                        item[4].get<double>()});
  }
  return core::make_tensor(n, entries).tensor;
}

void write_tensor_file(const std::string& path, const CurvatureTensor& r) {
  atomic_write(path, write_tensor_string(r));
}

CurvatureTensor read_tensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open tensor file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return read_tensor_string(buffer.str());
}

// ============================================================================
// Reports
// ============================================================================

namespace {

std::string matrix_rows_json(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out << "[";
  for (int r = 0; r < m.rows(); ++r) {
    if (r) out << ", ";
    out << "[";
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ", ";
      out << format_double(m(r, c));
    }
    out << "]";
  }
  out << "]";
  return out.str();
}

std::string vector_json(const Eigen::VectorXd& v) {
  std::ostringstream out;
  out << "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << format_double(v[i]);
  }
  out << "]";
  return out.str();
}

}  // namespace

std::string condition_report_json(const conditions::ConditionReport& report) {
  std::ostringstream out;
  out << "{\"cone\": \"" << report.cone.name() << "\""
      << ", \"margin\": " << format_double(report.margin);
  out << ", \"minimizer\": {";
  bool first = true;
  auto field = [&](const std::string& name, const std::string& value) {
    if (!first) out << ", ";
    first = false;
    out << "\"" << name << "\": " << value;
  };
  const auto& m = report.minimizer;
  // The frame is serialized row-wise: row a = the frame vector e_{a+1}.
  if (m.frame) field("frame", matrix_rows_json(m.frame->transpose()));
  if (m.lambda) field("lambda", format_double(*m.lambda));
  if (m.mu) field("mu", format_double(*m.mu));
  if (m.two_form) field("two_form", vector_json(*m.two_form));
  if (m.two_form_b) field("two_form_b", vector_json(*m.two_form_b));
  if (m.plane) field("plane", matrix_rows_json(m.plane->transpose()));
  if (m.plane_b) field("plane_b", matrix_rows_json(m.plane_b->transpose()));
  if (m.vector) field("vector", vector_json(*m.vector));
  out << "}";
  out << ", \"restarts_used\": " << report.restarts_used;
  out << ", \"converged\": " << (report.converged ? "true" : "false");
  if (report.degenerate) out << ", \"degenerate\": true";
  if (report.ambiguous_minimizer) out << ", \"ambiguous_minimizer\": true";
  out << ", \"seed\": " << report.seed << "}";
  return out.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, target);
}

}  // namespace curvlab::io
