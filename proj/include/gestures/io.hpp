// Copyright 2026 The gestures Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Manifest and feature-file formats.
//
// Manifest: a JSON document
//   {version, step_seconds, records: [{seizure_id, patient_id, label, t0, tG,
//    t1, fps, views: [{tag, path, blank}]}]}
// where tG is a number or the string "inf". View paths are relative to the
// manifest's directory.
//
// Feature file (little-endian): magic "FSEQ0001", u32 T, u32 m, then T*m
// float32 values row-major (one row per feature vector). Files ending in
// ".csv" are read as text: a "T,m" header line, a line with the two counts,
// then T rows of m comma-separated values.

#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gestures/core.hpp"
#include "gestures/error.hpp"

namespace gestures {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

inline constexpr char kFseqMagic[8] = {'F', 'S', 'E', 'Q', '0', '0', '0', '1'};

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::filesystem::path& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError(path, "unexpected end of file");
  return value;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(std::string cell, const std::filesystem::path& path) {
  cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
  try {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw IoError(path, "cannot parse number '" + cell + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Feature files

inline FeatureSequence read_fseq_binary(const std::filesystem::path& path,
                                        double step_seconds = kDefaultStepSeconds) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open feature file");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kFseqMagic, 8) != 0) throw IoError(path, "bad FSEQ magic");
  const auto length = detail::read_pod<std::uint32_t>(in, path);
  const auto dim = detail::read_pod<std::uint32_t>(in, path);
  if (length == 0 || dim == 0) throw IoError(path, "empty feature sequence");
  std::vector<float> buffer(static_cast<std::size_t>(length) * dim);
  in.read(reinterpret_cast<char*>(buffer.data()),
          static_cast<std::streamsize>(buffer.size() * sizeof(float)));
  if (!in) throw IoError(path, "truncated feature payload");
  // Row-major T x m on disk is column-major m x T in memory.
  Eigen::Map<const Eigen::MatrixXf> view(buffer.data(), dim, length);
  try {
    return FeatureSequence(view.cast<double>(), step_seconds);
  } catch (const DataError& e) {
    throw IoError(path, e.what());
  }
}

inline FeatureSequence read_fseq_csv(const std::filesystem::path& path,
                                     double step_seconds = kDefaultStepSeconds) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open feature file");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path, "missing header");
  auto header = detail::split_csv(line);
  if (header.size() == 2 && header[0] == "T" && header[1].rfind('m', 0) == 0) {
    if (!std::getline(in, line)) throw IoError(path, "missing size line");
    header = detail::split_csv(line);
  }
  if (header.size() != 2) throw IoError(path, "expected 'T,m' sizes");
  const double t_value = detail::parse_double(header[0], path);
  const double m_value = detail::parse_double(header[1], path);
  if (t_value < 1 || m_value < 1) throw IoError(path, "empty feature sequence");
  const auto length = static_cast<Eigen::Index>(t_value);
  const auto dim = static_cast<Eigen::Index>(m_value);
  Eigen::MatrixXd steps(dim, length);
  for (Eigen::Index k = 0; k < length; ++k) {
    if (!std::getline(in, line)) throw IoError(path, "expected " + std::to_string(length) + " rows");
    auto cells = detail::split_csv(line);
    if (static_cast<Eigen::Index>(cells.size()) != dim) {
      throw IoError(path, "row " + std::to_string(k) + " has " + std::to_string(cells.size()) +
                              " values, expected " + std::to_string(dim));
    }
    for (Eigen::Index j = 0; j < dim; ++j) steps(j, k) = detail::parse_double(cells[j], path);
  }
  try {
    return FeatureSequence(std::move(steps), step_seconds);
  } catch (const DataError& e) {
    throw IoError(path, e.what());
  }
}

/// Reads FSEQ binary, or CSV when the extension is ".csv".
inline FeatureSequence read_feature_sequence(const std::filesystem::path& path,
                                             double step_seconds = kDefaultStepSeconds) {
  if (path.extension() == ".csv") return read_fseq_csv(path, step_seconds);
  return read_fseq_binary(path, step_seconds);
}

/// Reads only the (T, m) header of a feature file.
inline std::pair<std::size_t, std::size_t> peek_feature_shape(const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    auto seq = read_fseq_csv(path);
    return {seq.length(), seq.dim()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open feature file");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kFseqMagic, 8) != 0) throw IoError(path, "bad FSEQ magic");
  const auto length = detail::read_pod<std::uint32_t>(in, path);
  const auto dim = detail::read_pod<std::uint32_t>(in, path);
  return {length, dim};
}

inline void write_fseq_binary(const std::filesystem::path& path, const Eigen::MatrixXd& steps) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot create feature file");
  out.write(kFseqMagic, 8);
  detail::write_pod(out, static_cast<std::uint32_t>(steps.cols()));
  detail::write_pod(out, static_cast<std::uint32_t>(steps.rows()));
  const Eigen::MatrixXf values = steps.cast<float>();
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out) throw IoError(path, "write failed");
}

inline void write_fseq_binary(const std::filesystem::path& path, const FeatureSequence& seq) {
  write_fseq_binary(path, seq.matrix());
}

inline void write_fseq_csv(const std::filesystem::path& path, const FeatureSequence& seq) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot create feature file");
  out.precision(9);
  out << "T,m\n" << seq.length() << ',' << seq.dim() << '\n';
  for (std::size_t k = 0; k < seq.length(); ++k) {
    for (std::size_t j = 0; j < seq.dim(); ++j) {
      if (j) out << ',';
      out << seq.matrix()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    }
    out << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

// ---------------------------------------------------------------------------
// Manifest

namespace detail {

inline double time_from_json(const nlohmann::json& value, const char* field) {
  if (value.is_string()) {
    const auto text = value.get<std::string>();
    if (text == "inf" || text == "+inf" || text == "Infinity") return kInfinity;
    throw DataError(std::string("field '") + field + "' has non-numeric value '" + text + "'");
  }
  if (!value.is_number()) throw DataError(std::string("field '") + field + "' must be a number");
  return value.get<double>();
}

inline nlohmann::json time_to_json(double t) {
  if (std::isinf(t) && t > 0) return "inf";
  return t;
}

}  // namespace detail

inline Manifest manifest_from_json(const nlohmann::json& doc) {
  try {
    Manifest manifest;
    manifest.version = doc.value("version", 1);
    manifest.step_seconds = doc.value("step_seconds", kDefaultStepSeconds);
    for (const auto& rec : doc.at("records")) {
      SeizureRecord record;
      record.seizure_id = rec.at("seizure_id").get<std::string>();
      record.patient_id = rec.value("patient_id", std::string{});
      record.label = rec.at("label").get<int>();
      record.annotations.onset = detail::time_from_json(rec.at("t0"), "t0");
      record.annotations.generalization =
          rec.contains("tG") ? detail::time_from_json(rec.at("tG"), "tG") : kInfinity;
      record.annotations.offset = detail::time_from_json(rec.at("t1"), "t1");
      record.annotations.fps = rec.value("fps", kDefaultFps);
      for (const auto& view : rec.at("views")) {
        StreamRef ref;
        const auto tag = view.at("tag").get<std::string>();
        auto parsed = parse_view_tag(tag);
        if (!parsed) throw DataError("unknown view tag '" + tag + "' in " + record.seizure_id);
        ref.view = *parsed;
        ref.path = view.at("path").get<std::string>();
        ref.blank = view.value("blank", false);
        record.views.push_back(std::move(ref));
      }
      manifest.records.push_back(std::move(record));
    }
    return manifest;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
}

inline nlohmann::ordered_json manifest_to_json(const Manifest& manifest) {
  nlohmann::ordered_json doc;
  doc["version"] = manifest.version;
  doc["step_seconds"] = manifest.step_seconds;
  doc["records"] = nlohmann::ordered_json::array();
  for (const auto& r : manifest.records) {
    nlohmann::ordered_json rec;
    rec["seizure_id"] = r.seizure_id;
    rec["patient_id"] = r.patient_id;
    rec["label"] = r.label;
    rec["t0"] = r.annotations.onset;
    rec["tG"] = detail::time_to_json(r.annotations.generalization);
    rec["t1"] = r.annotations.offset;
    rec["fps"] = r.annotations.fps;
    rec["views"] = nlohmann::ordered_json::array();
    for (const auto& v : r.views) {
      rec["views"].push_back(
          {{"tag", std::string(to_string(v.view))}, {"path", v.path.generic_string()}, {"blank", v.blank}});
    }
    doc["records"].push_back(std::move(rec));
  }
  return doc;
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open manifest");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("invalid JSON: ") + e.what());
  }
  return manifest_from_json(doc);
}

inline void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot create manifest");
  out << manifest_to_json(manifest).dump(2) << '\n';
  if (!out) throw IoError(path, "write failed");
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string seizure_id;
  std::string what;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks every record invariant and that every feature file loads with one
/// feature dimension across the dataset. Throws IoError for unreadable files.
inline std::vector<Violation> validate_manifest(const Manifest& manifest,
                                                const std::filesystem::path& base_dir) {
  std::vector<Violation> out;
  std::set<std::string> seen;
  std::optional<std::size_t> dataset_dim;
  if (!(manifest.step_seconds > 0.0)) out.push_back({"", "step_seconds>0"});
  for (const auto& r : manifest.records) {
    const auto& a = r.annotations;
    if (!seen.insert(r.seizure_id).second) out.push_back({r.seizure_id, "duplicate seizure_id"});
    if (!(a.onset < a.offset)) out.push_back({r.seizure_id, "t0<t1"});
    if (a.generalizes() && !(a.onset <= a.generalization && a.generalization <= a.offset)) {
      out.push_back({r.seizure_id, "t0<=tG<=t1"});
    }
    if (std::isnan(a.generalization)) out.push_back({r.seizure_id, "tG is NaN"});
    if (!(a.fps > 0.0)) out.push_back({r.seizure_id, "fps>0"});
    if (r.label != kFos && r.label != kTcs) {
      out.push_back({r.seizure_id, "label in {0,1}"});
    } else if ((r.label == kTcs) != a.generalizes()) {
      out.push_back({r.seizure_id, "label=1 iff tG finite"});
    }
    if (r.views.size() != 2) {
      out.push_back({r.seizure_id, "exactly two views"});
    } else if (r.views[0].view == r.views[1].view) {
      out.push_back({r.seizure_id, "duplicate view tag"});
    }
    for (const auto& v : r.views) {
      const auto [length, dim] = peek_feature_shape(base_dir / v.path);
      if (length < 1 || dim < 1) {
        out.push_back({r.seizure_id, "empty feature file " + v.path.generic_string()});
        continue;
      }
      if (!dataset_dim) dataset_dim = dim;
      if (*dataset_dim != dim) {
        out.push_back({r.seizure_id, "inconsistent m: " + std::to_string(dim) + " vs " +
                                         std::to_string(*dataset_dim)});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loaded dataset

/// One view stream of one seizure within a loaded dataset.
struct StreamEntry {
  std::size_t record = 0;
  std::size_t view = 0;
};

/// A validated manifest with its feature sequences in memory.
struct Dataset {
  Manifest manifest;
  std::vector<std::array<FeatureSequence, 2>> features;  // per record, per view slot
  std::size_t dim = 0;

  std::size_t size() const noexcept { return manifest.records.size(); }
  const SeizureRecord& record(std::size_t i) const { return manifest.records.at(i); }
  const FeatureSequence& stream(const StreamEntry& s) const { return features.at(s.record).at(s.view); }
  bool blank(const StreamEntry& s) const { return record(s.record).views.at(s.view).blank; }
  int label(const StreamEntry& s) const { return record(s.record).label; }
};

inline Dataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  Dataset ds;
  ds.manifest = read_manifest(manifest_path);
  auto violations = validate_manifest(ds.manifest, dir);
  if (!violations.empty()) {
    std::string msg = "manifest " + manifest_path.string() + " is invalid:";
    for (const auto& v : violations) msg += "\n  " + v.seizure_id + ": " + v.what;
    throw DataError(msg);
  }
  ds.features.reserve(ds.manifest.records.size());
  for (const auto& r : ds.manifest.records) {
    std::array<FeatureSequence, 2> views;
    for (std::size_t v = 0; v < 2; ++v) {
      views[v] = read_feature_sequence(dir / r.views[v].path, ds.manifest.step_seconds);
    }
    ds.features.push_back(std::move(views));
  }
  ds.dim = ds.features.empty() ? 0 : ds.features.front()[0].dim();
  return ds;
}

}  // namespace gestures
