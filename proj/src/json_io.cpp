#include "opshift/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "opshift/errors.hpp"

namespace opshift {

namespace {

void write_number(std::ostream& os, double v) {
  if (!std::isfinite(v)) {
    os << "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

bool is_scalar_array(const json& v) {
  for (const auto& e : v) {
    if (e.is_array() || e.is_object()) return false;
  }
  return true;
}

void write_value(std::ostream& os, const json& v, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_value(os, it.value(), depth + 1);
      }
      os << '\n' << close_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      // Short numeric rows such as [re, im] pairs and multi-indices stay inline.
      if (is_scalar_array(v)) {
        os << '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) os << ", ";
          write_value(os, v[i], depth + 1);
        }
        os << ']';
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_value(os, v[i], depth + 1);
      }
      os << '\n' << close_pad << ']';
      return;
    }
    case json::value_t::number_float:
      write_number(os, v.get<double>());
      return;
    default:
      os << v.dump();
      return;
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SchemaError(path + ": missing key \"" + key + "\"");
  }
  return obj.at(key);
}

int require_int(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "." + key + ": expected an integer");
  return v.get<int>();
}

}  // namespace

std::string dump_canonical(const json& value) {
  std::ostringstream os;
  write_value(os, value, 0);
  os << '\n';
  return os.str();
}

json to_json_value(const MultiIndex& alpha) { return json(alpha.components()); }

MultiIndex multi_index_from_json(const json& value, std::size_t d, const std::string& path) {
  if (!value.is_array()) throw SchemaError(path + ": expected an integer array");
  if (value.size() != d) {
    throw SchemaError(path + ": expected " + std::to_string(d) + " components, got " +
                      std::to_string(value.size()));
  }
  std::vector<int> c;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number_integer() || value[i].get<long long>() < 0) {
      throw SchemaError(path + "[" + std::to_string(i) + "]: expected a non-negative integer");
    }
    c.push_back(value[i].get<int>());
  }
  return MultiIndex(std::move(c));
}

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
    throw SchemaError(path + ": expected [re, im] pair");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

json to_json_value(const MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXcd matrix_from_json(const json& value, const std::string& path) {
  if (!value.is_array() || value.empty()) throw SchemaError(path + ": expected a non-empty row array");
  const std::size_t rows = value.size();
  if (!value[0].is_array()) throw SchemaError(path + "[0]: expected a row array");
  const std::size_t cols = value[0].size();
  MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!value[i].is_array() || value[i].size() != cols) {
      throw SchemaError(rp + ": expected a row of " + std::to_string(cols) + " entries");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          complex_from_json(value[i][k], rp + "[" + std::to_string(k) + "]");
    }
  }
  return m;
}

json family_to_json_value(const Family& fam) {
  json doc;
  doc["d"] = fam.dim();
  doc["degree_cap"] = fam.cap();
  json overrides = json::array();
  for (const auto& [alpha, n] : fam.fibers().overrides) {
    overrides.push_back({{"alpha", to_json_value(alpha)}, {"dim", n}});
  }
  doc["fiber_dims"] = {{"default", fam.fibers().default_dim}, {"overrides", overrides}};
  json weights = json::array();
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    for (std::size_t r = 0; r < fam.stored_count(); ++r) {
      weights.push_back({{"j", j + 1},
                         {"alpha", to_json_value(fam.box().unrank(r))},
                         {"matrix", to_json_value(fam.weight(j, r))}});
    }
  }
  doc["weights"] = std::move(weights);
  return doc;
}

Family family_from_json_value(const json& doc) {
  if (!doc.is_object()) throw SchemaError("$: expected an object");
  const int d = require_int(doc, "d", "$");
  const int cap = require_int(doc, "degree_cap", "$");
  if (d < 1) throw SchemaError("$.d: must be >= 1");
  if (cap < 1) throw SchemaError("$.degree_cap: must be >= 1");
  const TruncationBox box(static_cast<std::size_t>(d), cap);

  const json& fd = require(doc, "fiber_dims", "$");
  FiberMap fibers(require_int(fd, "default", "$.fiber_dims"));
  if (fibers.default_dim < 1) throw SchemaError("$.fiber_dims.default: must be >= 1");
  if (fd.contains("overrides")) {
    const json& ov = fd.at("overrides");
    if (!ov.is_array()) throw SchemaError("$.fiber_dims.overrides: expected an array");
    for (std::size_t i = 0; i < ov.size(); ++i) {
      const std::string p = "$.fiber_dims.overrides[" + std::to_string(i) + "]";
      MultiIndex alpha = multi_index_from_json(require(ov[i], "alpha", p), box.dim(), p + ".alpha");
      if (!box.contains(alpha)) throw SchemaError(p + ".alpha: outside the degree cap");
      const int n = require_int(ov[i], "dim", p);
      if (n < 1) throw SchemaError(p + ".dim: must be >= 1");
      if (!fibers.overrides.emplace(std::move(alpha), n).second) {
        throw SchemaError(p + ": duplicate override");
      }
    }
  }

  const json& ws = require(doc, "weights", "$");
  if (!ws.is_array()) throw SchemaError("$.weights: expected an array");
  std::map<std::pair<std::size_t, std::size_t>, MatrixXcd> table;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const std::string p = "$.weights[" + std::to_string(i) + "]";
    const int j = require_int(ws[i], "j", p);
    if (j < 1 || j > d) throw SchemaError(p + ".j: must lie in 1.." + std::to_string(d));
    MultiIndex alpha = multi_index_from_json(require(ws[i], "alpha", p), box.dim(), p + ".alpha");
    if (alpha.order() > cap - 1) {
      throw SchemaError(p + ".alpha: weights exist only for |alpha| <= degree_cap - 1");
    }
    MatrixXcd m = matrix_from_json(require(ws[i], "matrix", p), p + ".matrix");
    const auto key = std::make_pair(static_cast<std::size_t>(j - 1), box.rank(alpha));
    if (!table.emplace(key, std::move(m)).second) throw SchemaError(p + ": duplicate weight");
  }

  return Family(box, fibers, [&](std::size_t j, const MultiIndex& alpha) {
    auto it = table.find({j, box.rank(alpha)});
    if (it == table.end()) {
      throw MissingWeightError("missing weight at (j=" + std::to_string(j + 1) +
                               ", alpha=" + alpha.to_string() + ")");
    }
    return it->second;
  });
}

std::string to_json(const Family& fam) { return dump_canonical(family_to_json_value(fam)); }

Family from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("$: invalid JSON: ") + e.what());
  }
  return family_from_json_value(doc);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": invalid JSON: " + e.what());
  }
}

}  // namespace opshift
