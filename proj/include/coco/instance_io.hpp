#ifndef COCO_INSTANCE_IO_HPP
#define COCO_INSTANCE_IO_HPP

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "coco/instance.hpp"

namespace coco {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// JSON has no infinities; unbounded sides are written as the strings
// "inf" / "-inf".
inline nlohmann::json bound_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

struct FieldReader {
  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ParseError("instance document: field '" + path + "': " + what);
  }

  static const nlohmann::json& member(const nlohmann::json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
    return *it;
  }

  static double number(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  static double bound(const nlohmann::json& v, const std::string& path) {
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return kInf;
      if (s == "-inf") return -kInf;
      fail(path, "unknown bound string '" + s + "'");
    }
    return number(v, path);
  }

  static std::size_t count(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  static const nlohmann::json& array(const nlohmann::json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
  }
};

}  // namespace detail

inline std::string write_instance(const MilpInstance& inst) {
  nlohmann::json doc;
  doc["format"] = "coco-milp";
  doc["version"] = 1;
  doc["name"] = inst.name;
  doc["sense"] = to_string(inst.sense);
  doc["n"] = inst.num_vars;
  doc["p"] = inst.num_binary;
  doc["c"] = inst.objective;
  auto lower = nlohmann::json::array();
  auto upper = nlohmann::json::array();
  for (std::size_t j = 0; j < inst.num_vars; ++j) {
    lower.push_back(detail::bound_to_json(inst.lower[j]));
    upper.push_back(detail::bound_to_json(inst.upper[j]));
  }
  doc["lower"] = std::move(lower);
  doc["upper"] = std::move(upper);
  auto rows = nlohmann::json::array();
  for (const auto& r : inst.rows) {
    rows.push_back({{"cols", r.cols}, {"coefs", r.coefs}, {"rel", to_string(r.relation)}, {"rhs", r.rhs}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(1) + "\n";
}

inline MilpInstance read_instance(std::string_view text) {
  using detail::FieldReader;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("instance document: line " + std::to_string(detail::line_of(text, e.byte)) + ": " +
                     e.what());
  }
  MilpInstance inst;
  const auto& format = FieldReader::member(doc, "format", "");
  if (format != "coco-milp") FieldReader::fail("format", "expected \"coco-milp\"");
  if (FieldReader::count(FieldReader::member(doc, "version", ""), "version") != 1)
    FieldReader::fail("version", "unsupported version");
  const auto& name = FieldReader::member(doc, "name", "");
  if (!name.is_string()) FieldReader::fail("name", "expected a string");
  inst.name = name.get<std::string>();
  const auto& sense = FieldReader::member(doc, "sense", "");
  if (sense == "minimize") inst.sense = Sense::minimize;
  else if (sense == "maximize") inst.sense = Sense::maximize;
  else FieldReader::fail("sense", "expected \"minimize\" or \"maximize\"");
  inst.num_vars = FieldReader::count(FieldReader::member(doc, "n", ""), "n");
  inst.num_binary = FieldReader::count(FieldReader::member(doc, "p", ""), "p");
  if (inst.num_binary > inst.num_vars) FieldReader::fail("p", "p exceeds n");

  auto read_vector = [&](const char* key, bool bounds) {
    const auto& arr = FieldReader::array(FieldReader::member(doc, key, ""), key);
    if (arr.size() != inst.num_vars) FieldReader::fail(key, "length differs from n");
    std::vector<double> out;
    out.reserve(arr.size());
    for (std::size_t j = 0; j < arr.size(); ++j) {
      const std::string path = std::string(key) + "[" + std::to_string(j) + "]";
      out.push_back(bounds ? FieldReader::bound(arr[j], path) : FieldReader::number(arr[j], path));
    }
    return out;
  };
  inst.objective = read_vector("c", false);
  inst.lower = read_vector("lower", true);
  inst.upper = read_vector("upper", true);

  const auto& rows = FieldReader::array(FieldReader::member(doc, "rows", ""), "rows");
  inst.rows.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string path = "rows[" + std::to_string(i) + "]";
    const auto& r = rows[i];
    ConstraintRow row;
    const auto& cols = FieldReader::array(FieldReader::member(r, "cols", path), path + ".cols");
    const auto& coefs = FieldReader::array(FieldReader::member(r, "coefs", path), path + ".coefs");
    if (cols.size() != coefs.size()) FieldReader::fail(path, "cols and coefs differ in length");
    if (cols.empty()) FieldReader::fail(path, "empty row");
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto col = FieldReader::count(cols[k], path + ".cols[" + std::to_string(k) + "]");
      if (col >= inst.num_vars) FieldReader::fail(path + ".cols[" + std::to_string(k) + "]", "index out of range");
      if (k > 0 && col == row.cols.back())
        FieldReader::fail(path + ".cols[" + std::to_string(k) + "]", "duplicate column index " + std::to_string(col));
      if (k > 0 && col < row.cols.back())
        FieldReader::fail(path + ".cols[" + std::to_string(k) + "]", "column indices must be ascending");
      row.cols.push_back(col);
      row.coefs.push_back(FieldReader::number(coefs[k], path + ".coefs[" + std::to_string(k) + "]"));
    }
    const auto& rel = FieldReader::member(r, "rel", path);
    if (rel == "<=") row.relation = Relation::less_equal;
    else if (rel == ">=") row.relation = Relation::greater_equal;
    else if (rel == "==") row.relation = Relation::equal;
    else FieldReader::fail(path + ".rel", "expected one of \"<=\", \">=\", \"==\"");
    row.rhs = FieldReader::number(FieldReader::member(r, "rhs", path), path + ".rhs");
    inst.rows.push_back(std::move(row));
  }
  try {
    inst.validate();
  } catch (const InstanceError& e) {
    throw ParseError(std::string("instance document: ") + e.what());
  }
  return inst;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline MilpInstance load_instance(const std::string& path) { return read_instance(read_text_file(path)); }
inline void save_instance(const std::string& path, const MilpInstance& inst) {
  write_text_file(path, write_instance(inst));
}

}  // namespace coco

#endif  // COCO_INSTANCE_IO_HPP
