#include "blursynth/dataset/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include "blursynth/dataset/png_io.hpp"

namespace blursynth::dataset {

using nlohmann::json;

std::string_view to_string(Domain d) { return d == Domain::Raw ? "raw" : "rgb"; }

namespace {

Domain parse_domain(const std::string& s) {
  if (s == "raw") return Domain::Raw;
  if (s == "rgb") return Domain::Rgb;
  throw std::invalid_argument("manifest: unknown domain '" + s + "'");
}

}  // namespace

json profile_to_json(const isp::CameraProfile& p) {
  json ccm = json::array();
  for (int r = 0; r < 3; ++r) {
    ccm.push_back({p.ccm(r, 0), p.ccm(r, 1), p.ccm(r, 2)});
  }
  json crf;
  if (p.crf.kind() == isp::Crf::Kind::Gamma) {
    crf = {{"kind", "gamma"}, {"exponent", p.crf.exponent()}};
  } else {
    crf = {{"kind", "srgb"}};
  }
  return {{"wb_gains", p.wb_gains},
          {"ccm", ccm},
          {"crf", crf},
          {"cfa", std::string(to_string(p.cfa))}};
}

isp::CameraProfile profile_from_json(const json& j) {
  isp::CameraProfile p;
  p.wb_gains = j.at("wb_gains").get<std::array<double, 3>>();
  const auto& ccm = j.at("ccm");
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.ccm(r, c) = ccm.at(r).at(c).get<double>();
  }
  const auto& crf = j.at("crf");
  const auto kind = crf.at("kind").get<std::string>();
  if (kind == "gamma") {
    p.crf = isp::Crf::gamma(crf.at("exponent").get<double>());
  } else if (kind == "srgb") {
    p.crf = isp::Crf::srgb();
  } else {
    throw std::invalid_argument("manifest: unknown CRF kind '" + kind + "'");
  }
  p.cfa = parse_cfa(j.at("cfa").get<std::string>());
  return p;
}

json entry_to_json(const ManifestEntry& entry) {
  if (const auto* f = std::get_if<SequenceFailure>(&entry)) {
    return {{"status", "failed"}, {"sequence", f->sequence}, {"error", f->error}};
  }
  const auto& r = std::get<ManifestRecord>(entry);
  return {{"status", "ok"},
          {"sequence", r.sequence},
          {"pair_index", r.pair_index},
          {"window",
           {{"start", r.window.start()},
            {"length", r.window.length()},
            {"center", r.window.center()}}},
          {"profile", r.profile ? profile_to_json(*r.profile) : json(nullptr)},
          {"blurry", r.blurry},
          {"sharp", r.sharp},
          {"domain", std::string(to_string(r.domain))},
          {"seeds",
           {{"master", r.seeds.master},
            {"sequence", r.seeds.sequence},
            {"window", r.seeds.window},
            {"profile", r.seeds.profile}}},
          {"factor", r.factor},
          {"frame_rate", r.frame_rate}};
}

ManifestEntry entry_from_json(const json& j) {
  if (j.at("status").get<std::string>() == "failed") {
    return SequenceFailure{j.at("sequence").get<std::string>(),
                           j.at("error").get<std::string>()};
  }
  ManifestRecord r;
  r.sequence = j.at("sequence").get<std::string>();
  r.pair_index = j.at("pair_index").get<std::size_t>();
  const auto& w = j.at("window");
  r.window = synth::ExposureWindow(w.at("start").get<std::size_t>(),
                                   w.at("length").get<std::size_t>());
  if (!j.at("profile").is_null()) r.profile = profile_from_json(j.at("profile"));
  r.blurry = j.at("blurry").get<std::string>();
  r.sharp = j.at("sharp").get<std::string>();
  r.domain = parse_domain(j.at("domain").get<std::string>());
  const auto& s = j.at("seeds");
  r.seeds = {s.at("master").get<std::uint64_t>(), s.at("sequence").get<std::uint64_t>(),
             s.at("window").get<std::uint64_t>(), s.at("profile").get<std::uint64_t>()};
  r.factor = j.at("factor").get<int>();
  r.frame_rate = j.at("frame_rate").get<double>();
  return r;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest " + path.string());
  for (const auto& e : entries) out << entry_to_json(e).dump() << '\n';
  if (!out) throw IoError("cannot write manifest " + path.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      entries.push_back(entry_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("manifest " + path.string() + " line " +
                                  std::to_string(line_no) + ": " + e.what());
    }
  }
  return entries;
}

}  // namespace blursynth::dataset
