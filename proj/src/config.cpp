/**
 * Copyright 2026 The ttaforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ttaforge/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "ttaforge/error.hpp"

namespace ttaforge {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("expected a non-negative integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<int> to_int_list(const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(trim(item)));
  if (out.empty()) throw ConfigError("expected a comma-separated list of integers");
  return out;
}

struct Field {
  std::string key;
  std::function<void(AdaptationConfig&, const std::string&)> set;
  std::function<std::string(const AdaptationConfig&)> get;
};

#define TTAFORGE_REAL(name, member)                                              \
  Field {                                                                        \
    name, [](AdaptationConfig& c, const std::string& v) { c.member = to_double(v); }, \
        [](const AdaptationConfig& c) { return num(c.member); }                  \
  }
#define TTAFORGE_SIZE(name, member)                                                \
  Field {                                                                          \
    name, [](AdaptationConfig& c, const std::string& v) { c.member = to_u64(v); }, \
        [](const AdaptationConfig& c) { return std::to_string(c.member); }         \
  }
#define TTAFORGE_INT(name, member)                                                 \
  Field {                                                                          \
    name, [](AdaptationConfig& c, const std::string& v) { c.member = to_int(v); }, \
        [](const AdaptationConfig& c) { return std::to_string(c.member); }         \
  }
#define TTAFORGE_BOOL(name, member)                                                 \
  Field {                                                                           \
    name, [](AdaptationConfig& c, const std::string& v) { c.member = to_bool(v); }, \
        [](const AdaptationConfig& c) { return std::string(c.member ? "true" : "false"); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      TTAFORGE_REAL("th_pl", th_pl),
      TTAFORGE_REAL("th_me", th_me),
      TTAFORGE_REAL("gamma", gamma),
      TTAFORGE_SIZE("m", m),
      TTAFORGE_SIZE("capacity", capacity),
      TTAFORGE_REAL("alpha", alpha),
      TTAFORGE_REAL("beta", beta),
      TTAFORGE_REAL("lr_text", lr_text),
      TTAFORGE_REAL("lr_visual", lr_visual),
      TTAFORGE_SIZE("batch_size", batch_size),
      TTAFORGE_REAL("adam_beta1", adam_beta1),
      TTAFORGE_REAL("adam_beta2", adam_beta2),
      TTAFORGE_REAL("adam_eps", adam_eps),
      TTAFORGE_REAL("weight_decay", weight_decay),
      TTAFORGE_SIZE("seed", seed),
      TTAFORGE_REAL("warm_noise", warm_noise),
      TTAFORGE_REAL("nms_iou", nms_iou),
      TTAFORGE_BOOL("enable_enhancement", enable_enhancement),
      TTAFORGE_BOOL("enable_hallucination", enable_hallucination),
      Field{"eval_with", [](AdaptationConfig& c, const std::string& v) { c.eval_with = parse_eval_source(v); },
            [](const AdaptationConfig& c) { return to_string(c.eval_with); }},
      Field{"resize_scales",
            [](AdaptationConfig& c, const std::string& v) { c.augment.resize_scales = to_int_list(v); },
            [](const AdaptationConfig& c) {
              std::string out;
              for (int s : c.augment.resize_scales) out += (out.empty() ? "" : ",") + std::to_string(s);
              return out;
            }},
      Field{"color_ops",
            [](AdaptationConfig& c, const std::string& v) {
              c.augment.color_ops.clear();
              if (v == "none") return;
              std::stringstream ss(v);
              std::string item;
              while (std::getline(ss, item, ',')) c.augment.color_ops.push_back(parse_color_op(trim(item)));
            },
            [](const AdaptationConfig& c) {
              std::string out;
              for (auto op : c.augment.color_ops) out += (out.empty() ? "" : ",") + to_string(op);
              return out.empty() ? std::string("none") : out;
            }},
      TTAFORGE_INT("max_erase", augment.max_erase),
      TTAFORGE_REAL("erase_max_fraction", augment.erase_max_fraction),
      TTAFORGE_REAL("erase_fill", augment.erase_fill),
      TTAFORGE_INT("halluc_max_instances", halluc.max_instances),
      TTAFORGE_REAL("halluc_th_iou", halluc.th_iou),
      TTAFORGE_INT("halluc_max_retries", halluc.max_retries),
      TTAFORGE_REAL("halluc_beta_a", halluc.beta_a),
      TTAFORGE_REAL("halluc_beta_b", halluc.beta_b),
      TTAFORGE_REAL("halluc_scale_lo", halluc.scale_lo),
      TTAFORGE_REAL("halluc_scale_hi", halluc.scale_hi),
  };
  return kFields;
}

#undef TTAFORGE_REAL
#undef TTAFORGE_SIZE
#undef TTAFORGE_INT
#undef TTAFORGE_BOOL

}  // namespace

bool ParsedConfig::has(std::string_view key) const { return std::find(keys.begin(), keys.end(), key) != keys.end(); }

ParsedConfig parse_config(std::string_view text, const std::string& origin) {
  ParsedConfig out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    const auto hash = raw.find('#');
    const std::string line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto& fs = fields();
    const auto it = std::find_if(fs.begin(), fs.end(), [&](const Field& f) { return f.key == key; });
    if (it == fs.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (out.has(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      it->set(out.config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
    out.keys.push_back(key);
  }
  try {
    out.config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return out;
}

ParsedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string render_config(const AdaptationConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.push_back(f.key);
    return keys;
  }();
  return kKeys;
}

}  // namespace ttaforge
