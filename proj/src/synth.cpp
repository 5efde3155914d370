#include "sigverify/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "sigverify/core.hpp"
#include "sigverify/text.hpp"

namespace sigverify {

namespace {

// std distributions are implementation-defined; these keep output identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * n); }

  double normal() {
    if (spare_) {
      spare_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * std::numbers::pi * u2);
    spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
  bool spare_ = false;
  double cached_ = 0.0;
};

struct Wave {
  double amplitude, frequency, phase;
};

struct Subject {
  std::array<Wave, 3> wx, wy;
  double slant;  // left-to-right drift of x
  Wave pressure;
  bool finger;
};

double eval_axis(const std::array<Wave, 3>& waves, const std::array<double, 3>& gain, double u) {
  double v = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& w = waves[k];
    v += gain[k] * w.amplitude * std::sin(2.0 * std::numbers::pi * w.frequency * u + w.phase);
  }
  return v;
}

Subject make_subject(Rng& rng, bool finger) {
  Subject s;
  auto wave = [&](double fmin, double fmax) {
    return Wave{rng.uniform(0.3, 1.0), rng.uniform(fmin, fmax),
                rng.uniform(0.0, 2.0 * std::numbers::pi)};
  };
  for (auto& w : s.wx) w = wave(0.5, 3.0);
  for (auto& w : s.wy) w = wave(1.0, 4.0);
  s.slant = rng.uniform(1.0, 3.0);
  s.pressure = Wave{rng.uniform(0.1, 0.3), rng.uniform(0.5, 2.0),
                    rng.uniform(0.0, 2.0 * std::numbers::pi)};
  s.finger = finger;
  return s;
}

struct Variation {
  std::array<double, 3> gain_x{1.0, 1.0, 1.0};
  std::array<double, 3> gain_y{1.0, 1.0, 1.0};
  double warp = 0.0;  // signed strength of the smooth time warp
  int warp_cycles = 1;
};

RawSignature render(const Subject& s, const Variation& v, const SynthSpec& spec, Rng& rng,
                    std::string id, Label label) {
  RawSignature sig;
  sig.id = std::move(id);
  sig.meta.input_tool = s.finger ? InputTool::finger : InputTool::stylus;
  sig.meta.scenario = s.finger ? Scenario::mobile : Scenario::office;
  sig.meta.label = label;
  const double period = 1000.0 / spec.sample_rate_hz;
  const int n = spec.points;
  const double m = 2.0 * std::numbers::pi * v.warp_cycles;
  sig.points.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double u0 = static_cast<double>(k) / (n - 1);
    // w(u) = u + a sin(m u) / m: monotone for |a| < 1, fixed at both ends
    const double u = u0 + v.warp * std::sin(m * u0) / m;
    SignaturePoint p;
    p.x = s.slant * u + eval_axis(s.wx, v.gain_x, u) + spec.sigma_g * rng.normal();
    p.y = eval_axis(s.wy, v.gain_y, u) + spec.sigma_g * rng.normal();
    p.t = k * period;
    if (!s.finger) {
      const auto& w = s.pressure;
      const double z = 0.6 + w.amplitude * std::sin(2.0 * std::numbers::pi * w.frequency * u + w.phase);
      p.p = std::max(0.05, z + 0.1 * spec.sigma_g * rng.normal());
    }
    sig.points.push_back(p);
  }
  return sig;
}

std::string uuid_like(Rng& rng) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (int group : {8, 4, 4, 4, 12}) {
    if (!out.empty()) out += '-';
    for (int i = 0; i < group; ++i) out += kHex[rng.bits() & 0xF];
  }
  return out;
}

}  // namespace

void validate(const SynthSpec& s) {
  if (s.subjects < 2) throw ValidationError("synth: subjects must be >= 2");
  if (s.genuine_per_subject < 2) throw ValidationError("synth: genuine_per_subject must be >= 2");
  if (s.skilled_per_subject < 1) throw ValidationError("synth: skilled_per_subject must be >= 1");
  if (!(s.sigma_g >= 0.0)) throw ValidationError("synth: sigma_g must be >= 0");
  if (!(s.warp_amplitude > s.sigma_g)) {
    throw ValidationError("synth: warp_amplitude must exceed sigma_g");
  }
  if (!(s.warp_amplitude < 1.0)) throw ValidationError("synth: warp_amplitude must be < 1");
  if (!(s.amplitude_perturbation >= 0.0 && s.amplitude_perturbation < 1.0)) {
    throw ValidationError("synth: amplitude_perturbation must lie in [0, 1)");
  }
  if (s.points < 3) throw ValidationError("synth: points must be >= 3");
  if (!(s.sample_rate_hz > 0.0)) throw ValidationError("synth: sample_rate_hz must be positive");
  if (!(s.finger_fraction >= 0.0 && s.finger_fraction <= 1.0)) {
    throw ValidationError("synth: finger_fraction must lie in [0, 1]");
  }
}

SynthSpec parse_synth_spec(std::string_view content) {
  auto kv = text::parse_key_values(content);
  SynthSpec s;
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto v = it->second;
    kv.erase(it);
    return v;
  };
  if (auto v = take("subjects")) s.subjects = static_cast<int>(text::parse_int(*v));
  if (auto v = take("genuine_per_subject")) s.genuine_per_subject = static_cast<int>(text::parse_int(*v));
  if (auto v = take("skilled_per_subject")) s.skilled_per_subject = static_cast<int>(text::parse_int(*v));
  if (auto v = take("seed")) {
    const auto seed = text::parse_int(*v);
    if (seed < 0) throw ValidationError("synth: seed must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  if (auto v = take("sigma_g")) s.sigma_g = text::parse_real(*v);
  if (auto v = take("warp_amplitude")) s.warp_amplitude = text::parse_real(*v);
  if (auto v = take("amplitude_perturbation")) s.amplitude_perturbation = text::parse_real(*v);
  if (auto v = take("points")) s.points = static_cast<int>(text::parse_int(*v));
  if (auto v = take("sample_rate_hz")) s.sample_rate_hz = text::parse_real(*v);
  if (auto v = take("finger_fraction")) s.finger_fraction = text::parse_real(*v);
  if (!kv.empty()) throw FormatError("unknown synth key '" + kv.begin()->first + "'");
  validate(s);
  return s;
}

std::string serialize_synth_spec(const SynthSpec& s) {
  return text::serialize_key_values({
      {"subjects", std::to_string(s.subjects)},
      {"genuine_per_subject", std::to_string(s.genuine_per_subject)},
      {"skilled_per_subject", std::to_string(s.skilled_per_subject)},
      {"seed", std::to_string(s.seed)},
      {"sigma_g", text::format_real(s.sigma_g)},
      {"warp_amplitude", text::format_real(s.warp_amplitude)},
      {"amplitude_perturbation", text::format_real(s.amplitude_perturbation)},
      {"points", std::to_string(s.points)},
      {"sample_rate_hz", text::format_real(s.sample_rate_hz)},
      {"finger_fraction", text::format_real(s.finger_fraction)},
  });
}

SynthDataset generate_synthetic(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  SynthDataset ds;
  std::set<std::string> used;
  auto fresh_id = [&] {
    for (;;) {
      auto id = uuid_like(rng);
      if (used.insert(id).second) return id;
    }
  };

  const int fingers = static_cast<int>(std::lround(spec.finger_fraction * spec.subjects));
  const int stylus = spec.subjects - fingers;
  // genuine[s][g] and skilled[s][k] index into ds.signatures
  std::vector<std::vector<std::size_t>> genuine(spec.subjects), skilled(spec.subjects);

  for (int s = 0; s < spec.subjects; ++s) {
    const Subject subject = make_subject(rng, s >= stylus);
    for (int g = 0; g < spec.genuine_per_subject; ++g) {
      genuine[s].push_back(ds.signatures.size());
      ds.signatures.push_back(render(subject, {}, spec, rng, fresh_id(), Label::genuine));
    }
    for (int k = 0; k < spec.skilled_per_subject; ++k) {
      // Forger skill varies, so some forgeries land close to the genuine set.
      const double severity = rng.uniform(0.2, 1.0);
      Variation v;
      for (auto* gains : {&v.gain_x, &v.gain_y}) {
        for (double& g : *gains) g = 1.0 + severity * spec.amplitude_perturbation * rng.normal();
      }
      v.warp = severity * spec.warp_amplitude * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      v.warp_cycles = 1 + static_cast<int>(rng.index(2));
      skilled[s].push_back(ds.signatures.size());
      ds.signatures.push_back(render(subject, v, spec, rng, fresh_id(), Label::skilled_forgery));
    }
  }

  auto group_comparisons = [&](int first, int last) {
    ComparisonList list;
    for (int s = first; s < last; ++s) {
      const auto& ref = ds.signatures[genuine[s][0]].id;
      for (std::size_t g = 1; g < genuine[s].size(); ++g) {
        list.entries.push_back({ref, ds.signatures[genuine[s][g]].id, Label::genuine});
      }
      for (auto k : skilled[s]) {
        list.entries.push_back({ref, ds.signatures[k].id, Label::skilled_forgery});
      }
      if (last - first < 2) continue;
      for (std::size_t r = 1; r < genuine[s].size(); ++r) {
        int other = first + static_cast<int>(rng.index(static_cast<std::size_t>(last - first - 1)));
        if (other >= s) ++other;
        const auto pick = genuine[other][rng.index(genuine[other].size())];
        list.entries.push_back({ref, ds.signatures[pick].id, Label::random_forgery});
      }
    }
    rng.shuffle(list.entries);
    return list;
  };

  ds.tasks[1] = group_comparisons(0, stylus);
  ds.tasks[2] = group_comparisons(stylus, spec.subjects);

  auto& t1 = ds.tasks[1].entries;
  auto& t2 = ds.tasks[2].entries;
  const std::size_t half = std::min(t1.size(), t2.size()) / 2;
  ComparisonList mixed;
  for (const auto* src : {&t1, &t2}) {
    auto pool = *src;
    rng.shuffle(pool);
    mixed.entries.insert(mixed.entries.end(), pool.begin(), pool.begin() + half);
  }
  rng.shuffle(mixed.entries);
  ds.tasks[3] = std::move(mixed);
  for (auto it = ds.tasks.begin(); it != ds.tasks.end();) {
    it = it->second.entries.empty() ? ds.tasks.erase(it) : std::next(it);
  }
  return ds;
}

void write_synthetic(const SynthDataset& ds, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "signatures", ec);
  if (ec) throw IoError("cannot create '" + (dir / "signatures").string() + "': " + ec.message());

  DatasetManifest manifest;
  for (const auto& sig : ds.signatures) {
    const fs::path rel = fs::path("signatures") / (sig.id + ".txt");
    write_text_file(dir / rel, serialize_signature(sig));
    manifest.signatures[sig.id] = {rel, sig.meta};
  }
  for (const auto& [task, list] : ds.tasks) {
    const std::string stem = "task" + std::to_string(task);
    write_text_file(dir / (stem + "_comparisons.txt"), serialize_comparisons(list, false));
    write_text_file(dir / (stem + "_ground_truth.txt"), serialize_comparisons(list, true));
    manifest.task_files[task] = stem + "_ground_truth.txt";
  }
  write_text_file(dir / "manifest.txt", serialize_manifest(manifest));
}

}  // namespace sigverify
