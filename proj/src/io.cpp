// Copyright 2026 The QUSUM Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qusum/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qusum {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path + "'");
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, origin + ": " + e.what());
  }
}

json real_rows(const ComplexMatrix& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_block(const ComplexMatrix& m) {
  return json{{"re", real_rows(m, false)}, {"im", real_rows(m, true)}};
}

// Reads {"re": rows, "im": rows}; "im" may be omitted for real matrices.
ComplexMatrix read_block(const json& j, Eigen::Index rows, Eigen::Index cols,
                         const std::string& origin) {
  try {
    if (!j.is_object() || !j.contains("re")) {
      throw Error(ErrorKind::kParse, origin + ": matrix block needs \"re\"");
    }
    const auto& re = j.at("re");
    const json* im = j.contains("im") ? &j.at("im") : nullptr;
    if (!re.is_array() || static_cast<Eigen::Index>(re.size()) != rows ||
        (im && (!im->is_array() || static_cast<Eigen::Index>(im->size()) != rows))) {
      throw Error(ErrorKind::kParse, origin + ": expected " + std::to_string(rows) + " rows");
    }
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& rrow = re.at(static_cast<std::size_t>(i));
      if (!rrow.is_array() || static_cast<Eigen::Index>(rrow.size()) != cols ||
          (im && static_cast<Eigen::Index>(im->at(static_cast<std::size_t>(i)).size()) != cols)) {
        throw Error(ErrorKind::kParse, origin + ": expected " + std::to_string(cols) + " columns");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        const double r = rrow.at(static_cast<std::size_t>(c)).get<double>();
        const double m_im =
            im ? im->at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>()
               : 0.0;
        m(i, c) = Complex(r, m_im);
      }
    }
    if (!all_finite(m)) throw Error(ErrorKind::kParse, origin + ": non-finite entry");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, origin + ": " + e.what());
  }
}

Eigen::Index positive_dim(const json& j, const char* key, const std::string& origin) {
  try {
    const auto d = j.at(key).get<long long>();
    if (d < 1) throw Error(ErrorKind::kParse, origin + ": \"" + key + "\" must be positive");
    return static_cast<Eigen::Index>(d);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, origin + ": " + e.what());
  }
}

const json& array_field(const json& j, const char* key, const std::string& origin) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_array() || j.at(key).empty()) {
    throw Error(ErrorKind::kParse, origin + ": \"" + key + "\" must be a non-empty array");
  }
  return j.at(key);
}

Povm povm_from_json(const json& j, const std::string& origin) {
  const auto dim = positive_dim(j, "dim", origin);
  std::vector<ComplexMatrix> elems;
  for (const auto& e : array_field(j, "elements", origin)) {
    elems.push_back(read_block(e, dim, dim, origin));
  }
  try {
    return Povm::from_elements(std::move(elems));
  } catch (const Error& e) {
    throw Error(ErrorKind::kParse, origin + ": invalid POVM (" + e.what() + ")");
  }
}

json povm_to_json(const Povm& m) {
  json elems = json::array();
  for (const auto& e : m.elements()) elems.push_back(matrix_block(e));
  return json{{"dim", m.dim()}, {"elements", std::move(elems)}};
}

}  // namespace

ComplexMatrix load_matrix_json(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  const auto dim = positive_dim(j, "dim", path);
  return read_block(j, dim, dim, path);
}

void save_matrix_json(const std::string& path, const ComplexMatrix& m) {
  json j = matrix_block(m);
  j["dim"] = m.rows();
  write_file(path, j.dump(1) + "\n");
}

Povm load_povm_json(const std::string& path) {
  return povm_from_json(parse_json(read_file(path), path), path);
}

void save_povm_json(const std::string& path, const Povm& m) {
  write_file(path, povm_to_json(m).dump(1) + "\n");
}

std::string povm_to_json_string(const Povm& m) { return povm_to_json(m).dump(); }

Povm povm_from_json_string(const std::string& text) {
  return povm_from_json(parse_json(text, "<povm>"), "<povm>");
}

KrausChannel load_channel_json(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  const auto in_dim = positive_dim(j, "in_dim", path);
  const auto out_dim = positive_dim(j, "out_dim", path);
  std::vector<ComplexMatrix> kraus;
  for (const auto& k : array_field(j, "kraus", path)) {
    kraus.push_back(read_block(k, out_dim, in_dim, path));
  }
  try {
    return KrausChannel::from_kraus(std::move(kraus));
  } catch (const Error& e) {
    throw Error(ErrorKind::kParse, path + ": invalid channel (" + e.what() + ")");
  }
}

void save_channel_json(const std::string& path, const KrausChannel& ch) {
  json kraus = json::array();
  for (const auto& k : ch.kraus_ops()) kraus.push_back(matrix_block(k));
  const json j{{"in_dim", ch.in_dim()}, {"out_dim", ch.out_dim()}, {"kraus", std::move(kraus)}};
  write_file(path, j.dump(1) + "\n");
}

}  // namespace qusum
