#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ablip/covering.hpp"
#include "ablip/embedding.hpp"
#include "ablip/frames.hpp"
#include "ablip/point_cloud.hpp"
#include "ablip/probe.hpp"
#include "ablip/prevalence.hpp"

namespace ablip {

using nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a content hash, used as the input digest in reports.
inline std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Reports are written via a temp file plus rename so readers never observe a
// partial write.
inline void atomic_write(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + tmp);
    out << bytes;
  }
  std::filesystem::rename(tmp, path);
}

// --- cloud schema: {"norm": "sup|euclidean|l1", "points": [[..], ..],
//     "label": str} -------------------------------------------------------

inline json cloud_to_json(const PointCloud& cloud) {
  json j;
  j["norm"] = to_string(cloud.norm_kind);
  j["points"] = cloud.points;
  j["label"] = cloud.label;
  return j;
}

inline PointCloud cloud_from_json(const json& j) {
  if (!j.is_object() || !j.contains("norm") || !j.contains("points"))
    throw std::runtime_error("cloud json: expected object with 'norm' and 'points'");
  const NormKind kind = norm_kind_from_string(j.at("norm").get<std::string>());
  std::vector<Vec> pts;
  for (const auto& row : j.at("points")) {
    if (!row.is_array())
      throw std::runtime_error("cloud json: 'points' must be an array of arrays");
    pts.push_back(row.get<Vec>());
  }
  std::string label = j.value("label", "");
  return PointCloud(std::move(pts), kind, std::move(label));
}

inline std::vector<std::vector<double>> parse_csv_rows(const std::string& text,
                                                       const std::string& path) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": cannot parse '" + cell + "' as a number");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline PointCloud load_cloud(const std::string& path, NormKind csv_norm) {
  const std::string bytes = read_file(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    return PointCloud(parse_csv_rows(bytes, path), csv_norm, path);
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return cloud_from_json(j);
}

inline FiniteMetricSpace load_distance_matrix(const std::string& path) {
  return FiniteMetricSpace(parse_csv_rows(read_file(path), path));
}

inline std::string cloud_to_csv(const PointCloud& cloud) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& p : cloud.points) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) out << ',';
      out << p[i];
    }
    out << '\n';
  }
  return out.str();
}

// --- module result serialisation; infinities become explicit sentinels so
//     no report field is ever NaN/inf in JSON -----------------------------

inline json finite_or_sentinel(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? json("inf") : json("-inf");
}

inline json frames_to_json(const std::vector<ScaleFrame>& frames) {
  json out = json::array();
  for (const auto& f : frames) {
    json jf;
    jf["scale"] = f.n;
    jf["R"] = f.R;
    jf["m_n"] = f.m_n;
    jf["op_norm_bound"] = f.op_norm_bound();
    jf["centers"] = f.centers;
    json weights = json::array();
    for (const auto& fn : f.functionals) weights.push_back(fn.weights);
    jf["weights"] = weights;
    out.push_back(std::move(jf));
  }
  return out;
}

inline json homogeneity_to_json(const HomogeneityParams& p) {
  json j;
  j["M"] = p.M;
  j["s"] = p.s;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["residual"] = p.residual;
  j["at_origin"] = p.at_origin;
  j["scale_grid"] = p.scale_grid;
  return j;
}

inline json dimension_to_json(const DimensionEstimate& d) {
  json j;
  j["kind"] = d.kind == DimensionEstimate::Kind::BoxCounting ? "box_counting"
                                                             : "assouad";
  j["value"] = d.value;
  j["residual"] = d.residual;
  j["scales_used"] = d.scales_used;
  return j;
}

inline json distortion_to_json(const DistortionReport& r) {
  json j;
  j["delta"] = r.delta;
  j["lower_constant"] = finite_or_sentinel(r.lower_constant);
  j["upper_constant"] = finite_or_sentinel(r.upper_constant);
  j["worst_pair"] = {r.worst_pair.first, r.worst_pair.second};
  j["skipped_pairs"] = r.skipped_pairs;
  j["violations"] = r.violations;
  j["informative_pairs"] = r.informative_pairs;
  j["pass"] = r.pass;
  return j;
}

inline json probe_to_json(const ProbeSample& s) {
  json j;
  j["gamma"] = s.gamma;
  j["k"] = s.k;
  j["seed"] = s.seed;
  json rows = json::array();
  for (Eigen::Index i = 0; i < s.matrix.rows(); ++i) {
    Vec row(s.matrix.cols());
    for (Eigen::Index c = 0; c < s.matrix.cols(); ++c)
      row[static_cast<std::size_t>(c)] = s.matrix(i, c);
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

inline json qn_to_json(const std::vector<QnEstimate>& estimates) {
  json out = json::array();
  for (const auto& e : estimates) {
    json j;
    j["n"] = e.n;
    j["empirical_measure"] = e.empirical_measure;
    j["theoretical_bound"] = e.theoretical_bound;
    j["annulus_size"] = e.annulus_size;
    j["empty_annulus"] = e.empty_annulus;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace ablip
