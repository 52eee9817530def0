#include "optidesign/pool_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "optidesign/errors.hpp"

namespace optidesign {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + ": expected a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw ParseError(what + ": rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != cols) {
      throw ParseError(what + ": row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        throw ParseError(what + ": entry (" + std::to_string(i) + "," + std::to_string(c) +
                         ") is not a number");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(what + ": entry " + std::to_string(i) + " is not a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json pool_to_json(const Pool& pool) {
  json exps = json::array();
  for (const Experiment& e : pool.experiments()) {
    exps.push_back({{"id", e.id()}, {"A", matrix_to_json(e.A())}, {"R", matrix_to_json(e.R().matrix())}});
  }
  return {{"p", pool.p()},
          {"prior_mean", vector_to_json(pool.prior_mean())},
          {"prior_cov", matrix_to_json(pool.prior_cov().matrix())},
          {"target", matrix_to_json(pool.target())},
          {"experiments", std::move(exps)}};
}

Pool pool_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("pool: top level must be an object");
  for (const char* key : {"p", "prior_mean", "prior_cov", "target", "experiments"}) {
    if (!j.contains(key)) throw ParseError(std::string("pool: missing field '") + key + "'");
  }
  if (!j["p"].is_number_integer()) throw ParseError("pool: 'p' must be an integer");
  const auto p = j["p"].get<Eigen::Index>();
  Vector mean = vector_from_json(j["prior_mean"], "prior_mean");
  if (mean.size() != p) throw DimensionMismatch("pool: prior_mean length differs from p");
  Matrix cov = matrix_from_json(j["prior_cov"], "prior_cov");
  Matrix target = matrix_from_json(j["target"], "target");
  if (!j["experiments"].is_array()) throw ParseError("pool: 'experiments' must be an array");
  std::vector<Experiment> exps;
  exps.reserve(j["experiments"].size());
  for (const json& e : j["experiments"]) {
    if (!e.is_object() || !e.contains("id") || !e.contains("A") || !e.contains("R")) {
      throw ParseError("pool: each experiment needs 'id', 'A' and 'R'");
    }
    if (!e["id"].is_number_integer()) throw ParseError("pool: experiment id must be an integer");
    const auto id = e["id"].get<ExperimentId>();
    const std::string tag = "experiment " + std::to_string(id);
    exps.push_back(make_experiment(id, matrix_from_json(e["A"], tag + " A"),
                                   matrix_from_json(e["R"], tag + " R")));
  }
  return Pool(std::move(exps), std::move(mean), cov, std::move(target));
}

Pool load_pool(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return pool_from_json(j);
}

void save_pool(const Pool& pool, const std::filesystem::path& path) {
  write_file_atomic(path, pool_to_json(pool).dump(1) + "\n");
}

json design_to_json(const Design& d) {
  json a = json::array();
  for (const auto& [id, c] : d.counts()) a.push_back({{"id", id}, {"count", c}});
  return a;
}

Design design_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("design: expected an array of {id, count}");
  Design d;
  for (const json& e : j) {
    if (!e.is_object() || !e.contains("id") || !e.contains("count")) {
      throw ParseError("design: entries need 'id' and 'count'");
    }
    d.add(e["id"].get<ExperimentId>(), e["count"].get<int>());
  }
  return d;
}

std::string pool_hash(const Pool& pool) {
  const std::string canonical = pool_to_json(pool).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw InvalidArgument("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace optidesign
