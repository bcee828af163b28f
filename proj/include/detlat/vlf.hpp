#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "detlat/grid.hpp"

namespace detlat {

static_assert(std::endian::native == std::endian::little,
              "VLF i/o assumes a little-endian host");

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace vlf_detail {

inline nlohmann::json header_json(const GridSpec& spec, const char* dtype) {
  nlohmann::json j;
  j["dims"] = spec.dims;
  j["spacing"] = spec.spacing;
  j["origin"] = spec.origin;
  j["dtype"] = dtype;
  j["order"] = "x-fastest";
  j["endian"] = "little";
  return j;
}

inline GridSpec parse_header(const std::string& json_path, std::string expect_dtype) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(json_path + ": invalid json: " + e.what());
  }
  for (const char* key : {"dims", "spacing", "origin", "dtype", "order", "endian"})
    if (!j.contains(key)) throw IoError(json_path + ": missing key '" + key + "'");
  if (j["order"] != "x-fastest") throw IoError(json_path + ": unsupported order");
  if (j["endian"] != "little") throw IoError(json_path + ": unsupported endian");
  if (j["dtype"] != expect_dtype)
    throw IoError(json_path + ": dtype is '" + j["dtype"].get<std::string>() +
                  "', expected '" + expect_dtype + "'");
  GridSpec spec;
  try {
    spec.dims = j["dims"].get<std::array<int, 3>>();
    spec.spacing = j["spacing"].get<std::array<double, 3>>();
    spec.origin = j["origin"].get<std::array<double, 3>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(json_path + ": malformed header field: " + e.what());
  }
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw IoError(json_path + ": " + e.what());
  }
  return spec;
}

template <typename T>
std::vector<T> read_payload(const std::string& bin_path, std::size_t count) {
  std::ifstream in(bin_path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + bin_path);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != count * sizeof(T))
    throw IoError(bin_path + ": payload length mismatch (got " + std::to_string(bytes) +
                  " bytes, expected " + std::to_string(count * sizeof(T)) + ")");
  std::vector<T> data(count);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(data.data()), std::streamsize(bytes));
  if (!in) throw IoError(bin_path + ": short read");
  return data;
}

template <typename T>
void write_payload(const std::string& bin_path, const std::vector<T>& data) {
  std::ofstream out(bin_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + bin_path + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()),
            std::streamsize(data.size() * sizeof(T)));
  if (!out) throw IoError(bin_path + ": short write");
}

inline void write_header(const std::string& json_path, const nlohmann::json& j) {
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + json_path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError(json_path + ": short write");
}

}  // namespace vlf_detail

// A volume named `base` is the pair `base.json` (header) + `base.bin` (payload).

inline void save_volume(const std::string& base, const LabeledVolume& v) {
  validate(v);
  vlf_detail::write_header(base + ".json", vlf_detail::header_json(v.spec, "u32"));
  vlf_detail::write_payload(base + ".bin", v.labels);
}

inline void save_volume(const std::string& base, const ScalarField& f) {
  validate(f);
  std::vector<float> narrow(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) narrow[i] = float(f.values[i]);
  vlf_detail::write_header(base + ".json", vlf_detail::header_json(f.spec, "f32"));
  vlf_detail::write_payload(base + ".bin", narrow);
}

inline LabeledVolume load_labeled_volume(const std::string& base) {
  const GridSpec spec = vlf_detail::parse_header(base + ".json", "u32");
  LabeledVolume v{spec, vlf_detail::read_payload<std::uint32_t>(base + ".bin", spec.voxel_count())};
  return v;
}

inline ScalarField load_scalar_field(const std::string& base) {
  const GridSpec spec = vlf_detail::parse_header(base + ".json", "f32");
  const auto narrow = vlf_detail::read_payload<float>(base + ".bin", spec.voxel_count());
  ScalarField f{spec, std::vector<double>(narrow.begin(), narrow.end())};
  return f;
}

}  // namespace detlat
