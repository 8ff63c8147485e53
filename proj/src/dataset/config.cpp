#include "blursynth/dataset/config.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <toml.hpp>

namespace blursynth::dataset {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

template <class T>
T get_or(const toml::node_view<const toml::node>& node, T fallback,
         const char* key) {
  if (!node) return fallback;
  if (auto v = node.value<T>()) return *v;
  throw std::invalid_argument(std::string("config: key '") + key +
                              "' has the wrong type");
}

int get_int(const toml::node_view<const toml::node>& node, int fallback,
            const char* key) {
  return static_cast<int>(get_or<std::int64_t>(node, fallback, key));
}

std::array<double, 3> read_vec3(const toml::array& arr, const char* key) {
  if (arr.size() != 3) {
    throw std::invalid_argument(std::string("config: '") + key +
                                "' must have 3 entries");
  }
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = arr[i].value<double>();
    if (!v) {
      throw std::invalid_argument(std::string("config: '") + key +
                                  "' entries must be numbers");
    }
    out[i] = *v;
  }
  return out;
}

void read_profile(const toml::table& root, JobConfig& cfg) {
  const auto node = root["profile"];
  if (!node) return;
  const std::string mode = get_or<std::string>(node["mode"], "random", "profile.mode");
  if (mode == "random") {
    cfg.profile_mode = ProfileMode::PerSequenceRandom;
  } else if (mode == "fixed") {
    cfg.profile_mode = ProfileMode::Fixed;
  } else {
    throw std::invalid_argument("config: profile.mode must be 'random' or 'fixed', got '" +
                                mode + "'");
  }

  const std::string cfa = get_or<std::string>(node["cfa"], "RGGB", "profile.cfa");
  cfg.random_cfa = parse_cfa(cfa);

  isp::CameraProfile p = isp::CameraProfile::identity(parse_cfa(cfa));
  if (const auto* gains = node["wb_gains"].as_array()) {
    p.wb_gains = read_vec3(*gains, "profile.wb_gains");
  }
  if (const auto* ccm = node["ccm"].as_array()) {
    if (ccm->size() != 3) {
      throw std::invalid_argument("config: 'profile.ccm' must have 3 rows");
    }
    for (int r = 0; r < 3; ++r) {
      const auto* row = (*ccm)[static_cast<std::size_t>(r)].as_array();
      if (!row) {
        throw std::invalid_argument("config: 'profile.ccm' rows must be arrays");
      }
      const auto vals = read_vec3(*row, "profile.ccm");
      for (int c = 0; c < 3; ++c) p.ccm(r, c) = vals[static_cast<std::size_t>(c)];
    }
  }
  const std::string crf = get_or<std::string>(node["crf"], "gamma", "profile.crf");
  if (crf == "gamma") {
    p.crf = isp::Crf::gamma(get_or<double>(node["gamma"], 2.2, "profile.gamma"));
  } else if (crf == "srgb") {
    p.crf = isp::Crf::srgb();
  } else {
    throw std::invalid_argument("config: profile.crf must be 'gamma' or 'srgb', got '" +
                                crf + "'");
  }
  cfg.fixed_profile = p;
}

}  // namespace

void JobConfig::validate() const {
  if (input_root.empty()) throw std::invalid_argument("config: input root not set");
  if (output_root.empty()) throw std::invalid_argument("config: output root not set");
  if (factor < 1 || !std::has_single_bit(static_cast<unsigned>(factor))) {
    throw std::invalid_argument("config: factor must be a power of two, got " +
                                std::to_string(factor));
  }
  window.validate();
  flow.validate();
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (profile_mode == ProfileMode::Fixed) fixed_profile.validate();
}

JobConfig parse_config(std::string_view toml_text,
                       const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: " << e.description() << " (line " << e.source().begin.line
        << ")";
    throw std::invalid_argument(msg.str());
  }
  const toml::table& view = root;

  JobConfig cfg;
  if (auto in = view["input"].value<std::string>()) cfg.input_root = resolve(base_dir, *in);
  if (auto out = view["output"].value<std::string>()) cfg.output_root = resolve(base_dir, *out);
  cfg.seed = static_cast<std::uint64_t>(get_or<std::int64_t>(view["seed"], 0, "seed"));
  cfg.factor = get_int(view["factor"], cfg.factor, "factor");
  cfg.baseline_rgb = get_or<bool>(view["baseline_rgb"], false, "baseline_rgb");
  cfg.workers = get_int(view["workers"], cfg.workers, "workers");
  cfg.frame_rate = get_or<double>(view["frame_rate"], cfg.frame_rate, "frame_rate");

  const auto window = view["window"];
  cfg.window.m_min = get_int(window["m_min"], cfg.window.m_min, "window.m_min");
  cfg.window.m_max = get_int(window["m_max"], cfg.window.m_max, "window.m_max");
  cfg.window.stride = get_int(window["stride"], cfg.window.m_max, "window.stride");

  const auto flow = view["flow"];
  cfg.flow.levels = get_int(flow["levels"], cfg.flow.levels, "flow.levels");
  cfg.flow.window_radius =
      get_int(flow["window_radius"], cfg.flow.window_radius, "flow.window_radius");
  cfg.flow.iterations_per_level =
      get_int(flow["iterations"], cfg.flow.iterations_per_level, "flow.iterations");
  cfg.flow.max_flow = get_or<double>(flow["max_flow"], cfg.flow.max_flow, "flow.max_flow");

  read_profile(view, cfg);
  return cfg;
}

JobConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("config: cannot read " + file.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), file.parent_path());
}

}  // namespace blursynth::dataset
