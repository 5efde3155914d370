#include "sigverify/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include "sigverify/path_signature.hpp"
#include "sigverify/text.hpp"

namespace sigverify {

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<PreprocessStep, 4> kSteps{{
    {PreprocessStep::resample, "resample"},
    {PreprocessStep::drop_zero_pressure, "drop_zero_pressure"},
    {PreprocessStep::scale_unit01, "scale_unit01"},
    {PreprocessStep::scale_sym11, "scale_sym11"},
}};
constexpr NameTable<ExtractorKind, 5> kExtractors{{
    {ExtractorKind::baseline, "baseline"},
    {ExtractorKind::dlvc12, "dlvc12"},
    {ExtractorKind::sig9, "sig9"},
    {ExtractorKind::mad13, "mad13"},
    {ExtractorKind::pathsig, "pathsig"},
}};
constexpr NameTable<MatcherKind, 3> kMatchers{{
    {MatcherKind::dtw, "dtw"},
    {MatcherKind::softdtw, "softdtw"},
    {MatcherKind::feature_l1, "feature_l1"},
}};
constexpr NameTable<LocalMetric, 2> kMetrics{{
    {LocalMetric::euclidean, "euclidean"},
    {LocalMetric::sq_euclidean, "sq_euclidean"},
}};
constexpr NameTable<SoftDtwNormalization, 2> kSoftNorms{{
    {SoftDtwNormalization::none, "none"},
    {SoftDtwNormalization::length_sum, "length_sum"},
}};
constexpr NameTable<ThresholdScorer, 3> kThresholds{{
    {ThresholdScorer::none, "none"},
    {ThresholdScorer::sigstat_local, "sigstat_local"},
    {ThresholdScorer::sigstat_global, "sigstat_global"},
}};
constexpr NameTable<PressureMode, 3> kPressureModes{{
    {PressureMode::automatic, "auto"},
    {PressureMode::as_is, "as_is"},
    {PressureMode::constant_one, "constant_one"},
}};
constexpr NameTable<ScoreOrientation, 2> kOrientations{{
    {ScoreOrientation::higher_is_genuine, "higher_is_genuine"},
    {ScoreOrientation::lower_is_genuine, "lower_is_genuine"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
E parse_enum(const NameTable<E, N>& table, std::string_view token, std::string_view key) {
  for (const auto& [e, name] : table) {
    if (name == token) return e;
  }
  throw ValidationError("unknown value '" + std::string(token) + "' for " + std::string(key));
}

bool is_sequence(ExtractorKind k) {
  return k == ExtractorKind::baseline || k == ExtractorKind::dlvc12 || k == ExtractorKind::sig9;
}

// Keys are consumed as they are read so leftovers can be reported.
class KeyReader {
 public:
  KeyReader(std::map<std::string, std::string>& kv, std::string prefix)
      : kv_(kv), prefix_(std::move(prefix)) {}

  std::optional<std::string> take(std::string_view key) {
    auto it = kv_.find(prefix_ + std::string(key));
    if (it == kv_.end()) return std::nullopt;
    auto v = it->second;
    kv_.erase(it);
    return v;
  }

  void real(std::string_view key, double& out) {
    if (auto v = take(key)) out = text::parse_real(*v);
  }
  void integer(std::string_view key, int& out) {
    if (auto v = take(key)) out = static_cast<int>(text::parse_int(*v));
  }
  void boolean(std::string_view key, bool& out) {
    if (auto v = take(key)) out = text::parse_bool(*v);
  }
  template <typename E, std::size_t N>
  void choice(std::string_view key, const NameTable<E, N>& table, E& out) {
    if (auto v = take(key)) out = parse_enum(table, *v, key);
  }

 private:
  std::map<std::string, std::string>& kv_;
  std::string prefix_;
};

BranchConfig read_branch(KeyReader& r) {
  BranchConfig b;
  if (auto steps = r.take("preprocess.steps")) {
    for (auto tok : text::split(*steps, ',')) {
      tok = text::trim(tok);
      if (tok.empty()) continue;
      b.preprocess.push_back(parse_enum(kSteps, tok, "preprocess.steps"));
    }
  }
  r.real("preprocess.resample_hz", b.resample_hz);
  r.choice("features.extractor", kExtractors, b.extractor);
  r.boolean("features.znorm", b.znorm);
  r.choice("features.pressure", kPressureModes, b.pressure);
  r.integer("features.path_depth", b.path_depth);
  r.boolean("features.path_normal", b.path_normal);

  r.choice("matcher.kind", kMatchers, b.matcher);
  b.metric = b.matcher == MatcherKind::softdtw ? LocalMetric::sq_euclidean : LocalMetric::euclidean;
  r.choice("matcher.metric", kMetrics, b.metric);
  r.real("matcher.gamma", b.gamma);
  r.boolean("matcher.path_normalize", b.path_normalize);
  r.choice("matcher.softdtw_normalization", kSoftNorms, b.softdtw_normalization);

  r.choice("scorer.threshold", kThresholds, b.threshold);
  r.real("scorer.sigstat_s", b.sigstat_s);
  r.real("scorer.g_th", b.g_th);
  r.real("scorer.f_th", b.f_th);
  r.real("scorer.d_g_min", b.d_g_min);
  r.real("scorer.d_f_med", b.d_f_med);
  if (auto o = r.take("scorer.orientation"); o && *o != "auto") {
    b.orientation = parse_enum(kOrientations, *o, "scorer.orientation");
  }
  r.boolean("scorer.tanh", b.tanh);
  r.real("scorer.tanh_mu", b.tanh_mu);
  r.real("scorer.tanh_sigma", b.tanh_sigma);
  return b;
}

void write_branch(const BranchConfig& b, const std::string& prefix,
                  std::map<std::string, std::string>& kv) {
  std::string steps;
  for (auto s : b.preprocess) {
    if (!steps.empty()) steps += ',';
    steps += name_of(kSteps, s);
  }
  auto put = [&](const char* key, std::string value) { kv[prefix + key] = std::move(value); };
  auto flag = [](bool v) { return std::string(v ? "true" : "false"); };
  put("preprocess.steps", steps);
  put("preprocess.resample_hz", text::format_real(b.resample_hz));
  put("features.extractor", std::string(name_of(kExtractors, b.extractor)));
  put("features.znorm", flag(b.znorm));
  put("features.pressure", std::string(name_of(kPressureModes, b.pressure)));
  put("features.path_depth", std::to_string(b.path_depth));
  put("features.path_normal", flag(b.path_normal));
  put("matcher.kind", std::string(name_of(kMatchers, b.matcher)));
  put("matcher.metric", std::string(name_of(kMetrics, b.metric)));
  put("matcher.gamma", text::format_real(b.gamma));
  put("matcher.path_normalize", flag(b.path_normalize));
  put("matcher.softdtw_normalization", std::string(name_of(kSoftNorms, b.softdtw_normalization)));
  put("scorer.threshold", std::string(name_of(kThresholds, b.threshold)));
  put("scorer.sigstat_s", text::format_real(b.sigstat_s));
  put("scorer.g_th", text::format_real(b.g_th));
  put("scorer.f_th", text::format_real(b.f_th));
  put("scorer.d_g_min", text::format_real(b.d_g_min));
  put("scorer.d_f_med", text::format_real(b.d_f_med));
  put("scorer.orientation",
      b.orientation ? std::string(name_of(kOrientations, *b.orientation)) : std::string("auto"));
  put("scorer.tanh", flag(b.tanh));
  put("scorer.tanh_mu", text::format_real(b.tanh_mu));
  put("scorer.tanh_sigma", text::format_real(b.tanh_sigma));
}

void validate_branch(const std::string& name, const BranchConfig& b) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("branch '" + name + "': " + what);
  };
  if (!(b.resample_hz > 0.0)) fail("resample_hz must be positive");
  const bool seq = is_sequence(b.extractor);
  if (seq && b.matcher == MatcherKind::feature_l1) fail("feature_l1 needs a global extractor");
  if (!seq && b.matcher != MatcherKind::feature_l1) fail("dtw/softdtw need a sequence extractor");
  if (b.matcher == MatcherKind::softdtw && !(b.gamma > 0.0)) fail("gamma must be positive");
  if (b.path_depth < 1 || b.path_depth > kMaxSignatureDepth) fail("path_depth must be 1..4");
  if (b.threshold == ThresholdScorer::sigstat_local && b.sigstat_s * b.f_th == b.g_th) {
    fail("sigstat_local needs s * f_th != g_th");
  }
  if (b.threshold == ThresholdScorer::sigstat_global && !(b.d_f_med > b.d_g_min)) {
    fail("sigstat_global needs d_f_med > d_g_min");
  }
  if (!(b.tanh_sigma > 0.0)) fail("tanh_sigma must be positive");
}

bool valid_branch_name(const std::string& n) {
  return !n.empty() && n.find_first_of(".,= \t") == std::string::npos;
}

}  // namespace

ScoreOrientation BranchConfig::effective_orientation() const {
  if (orientation) return *orientation;
  return threshold == ThresholdScorer::sigstat_local ? ScoreOrientation::higher_is_genuine
                                                     : ScoreOrientation::lower_is_genuine;
}

void validate(const PipelineConfig& config) {
  if (config.branches.empty()) throw ValidationError("pipeline has no branches");
  std::set<std::string> seen;
  for (const auto& [name, b] : config.branches) {
    if (!valid_branch_name(name)) throw ValidationError("invalid branch name '" + name + "'");
    if (!seen.insert(name).second) throw ValidationError("duplicate branch '" + name + "'");
    validate_branch(name, b);
  }
  const auto& w = config.fusion_weights;
  if (config.branches.size() > 1 || !w.empty()) {
    if (w.size() != config.branches.size()) {
      throw ValidationError("fusion.weights needs one weight per branch");
    }
    double sum = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) throw ValidationError("fusion weights must be nonnegative");
      sum += x;
    }
    if (!(sum > 0.0)) throw ValidationError("fusion weights sum to zero");
  }
}

PipelineConfig parse_config(std::string_view content) {
  auto kv = text::parse_key_values(content);
  PipelineConfig config;
  std::vector<std::string> names;
  if (auto it = kv.find("branches"); it != kv.end()) {
    for (auto tok : text::split(it->second, ',')) names.emplace_back(text::trim(tok));
    kv.erase(it);
  }
  if (names.empty()) {
    KeyReader r(kv, "");
    config.branches.emplace_back("main", read_branch(r));
  } else {
    for (const auto& n : names) {
      if (!valid_branch_name(n)) throw ValidationError("invalid branch name '" + n + "'");
      KeyReader r(kv, n + ".");
      config.branches.emplace_back(n, read_branch(r));
    }
  }
  if (auto it = kv.find("fusion.weights"); it != kv.end()) {
    for (auto tok : text::split(it->second, ',')) {
      config.fusion_weights.push_back(text::parse_real(text::trim(tok)));
    }
    kv.erase(it);
  }
  if (!kv.empty()) throw FormatError("unknown config key '" + kv.begin()->first + "'");
  validate(config);
  return config;
}

std::string serialize_config(const PipelineConfig& config) {
  std::map<std::string, std::string> kv;
  const bool single = config.branches.size() == 1 && config.fusion_weights.empty() &&
                      config.branches.front().first == "main";
  if (single) {
    write_branch(config.branches.front().second, "", kv);
  } else {
    std::string names;
    for (const auto& [name, b] : config.branches) {
      if (!names.empty()) names += ',';
      names += name;
      write_branch(b, name + ".", kv);
    }
    kv["branches"] = names;
  }
  if (!config.fusion_weights.empty()) {
    std::string w;
    for (double x : config.fusion_weights) {
      if (!w.empty()) w += ',';
      w += text::format_real(x);
    }
    kv["fusion.weights"] = w;
  }
  return text::serialize_key_values(kv);
}

PipelineConfig baseline_dtw_config() {
  PipelineConfig config;
  config.branches.emplace_back("main", BranchConfig{});
  return config;
}

Prepared prepare(const RawSignature& input, const BranchConfig& b) {
  RawSignature sig = input;
  for (auto step : b.preprocess) {
    switch (step) {
      case PreprocessStep::resample:
        sig = resample_uniform(sig, b.resample_hz);
        break;
      case PreprocessStep::drop_zero_pressure:
        if (sig.has_pressure()) sig = drop_zero_pressure(sig);
        break;
      case PreprocessStep::scale_unit01:
        sig = scale_center(sig, ScaleTarget::unit_01);
        break;
      case PreprocessStep::scale_sym11:
        sig = scale_center(sig, ScaleTarget::sym_11, b.extractor == ExtractorKind::pathsig);
        break;
    }
  }

  switch (b.extractor) {
    case ExtractorKind::mad13:
      return extract_mad13(sig);
    case ExtractorKind::pathsig:
      return extract_path_signature_features(sig, b.path_depth, b.path_normal);
    default:
      break;
  }

  TimeFunctionMatrix tfm = b.extractor == ExtractorKind::dlvc12 ? extract_dlvc12(sig)
                           : b.extractor == ExtractorKind::sig9 ? extract_sig9(sig)
                                                                : extract_baseline(sig);
  PressurePolicy policy = PressurePolicy::as_is;
  if (b.pressure == PressureMode::constant_one ||
      (b.pressure == PressureMode::automatic &&
       (sig.meta.input_tool == InputTool::finger || !sig.has_pressure()))) {
    policy = PressurePolicy::constant_one;
  }
  if (b.znorm) return znorm_channels(tfm, policy);
  if (policy == PressurePolicy::constant_one && tfm.has_channel(kPressureChannel)) {
    auto channels = tfm.channels();
    for (auto& ch : channels) {
      if (ch.name == kPressureChannel) std::fill(ch.values.begin(), ch.values.end(), 1.0);
    }
    return TimeFunctionMatrix(std::move(channels), tfm.sample_period());
  }
  return tfm;
}

namespace {

// Projects both matrices onto the channels they share, in reference order.
std::pair<Matrix, Matrix> shared_frames(const TimeFunctionMatrix& a, const TimeFunctionMatrix& b) {
  if (a.names() == b.names()) return {a.frames(), b.frames()};
  std::vector<Channel> ca, cb;
  for (const auto& ch : a.channels()) {
    if (b.has_channel(ch.name)) {
      ca.push_back(ch);
      cb.push_back(b.channel(ch.name));
    }
  }
  if (ca.empty()) throw ValidationError("time functions share no channels");
  return {TimeFunctionMatrix(std::move(ca), a.sample_period()).frames(),
          TimeFunctionMatrix(std::move(cb), b.sample_period()).frames()};
}

}  // namespace

double branch_distance(const Prepared& reference, const Prepared& probe, const BranchConfig& b) {
  if (b.matcher == MatcherKind::feature_l1) {
    const auto* fa = std::get_if<GlobalFeatureVector>(&reference);
    const auto* fb = std::get_if<GlobalFeatureVector>(&probe);
    if (fa == nullptr || fb == nullptr) throw ValidationError("feature_l1 needs global features");
    const auto diff = feature_diff(*fa, *fb);
    double sum = 0.0;
    for (double v : diff.values()) sum += v;
    return sum;
  }
  const auto* ta = std::get_if<TimeFunctionMatrix>(&reference);
  const auto* tb = std::get_if<TimeFunctionMatrix>(&probe);
  if (ta == nullptr || tb == nullptr) throw ValidationError("DTW matchers need time functions");
  const auto [fa, fb] = shared_frames(*ta, *tb);
  if (b.matcher == MatcherKind::dtw) {
    const auto r = dtw(fa, fb, b.metric);
    return b.path_normalize ? r.normalized_score : r.cumulative_cost;
  }
  double v = soft_dtw(fa, fb, b.gamma, b.metric);
  if (b.softdtw_normalization == SoftDtwNormalization::length_sum) {
    v /= static_cast<double>(fa.rows() + fb.rows());
  }
  return v;
}

double branch_score(double distance, const BranchConfig& b) {
  double v = distance;
  if (b.threshold == ThresholdScorer::sigstat_local) {
    v = sigstat_local_score(distance, b.g_th, b.f_th, b.sigstat_s);
  } else if (b.threshold == ThresholdScorer::sigstat_global) {
    v = sigstat_global_score(distance, b.d_g_min, b.d_f_med);
  }
  if (b.effective_orientation() == ScoreOrientation::lower_is_genuine) v = -v;
  if (b.tanh) v = tanh_normalize(std::span<const double>(&v, 1), b.tanh_mu, b.tanh_sigma)[0];
  return v;
}

double fuse_branch_scores(std::span<const double> branch_scores, const PipelineConfig& config) {
  if (config.fusion_weights.empty()) {
    if (branch_scores.size() != 1) throw ValidationError("several branches need fusion weights");
    return branch_scores[0];
  }
  return fuse_weighted(branch_scores, config.fusion_weights);
}

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Rethrows the
// exception of the lowest failing index.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (threads <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<std::vector<double>> compute_branch_distances(const PipelineConfig& config,
                                                          const SignatureLoader& load,
                                                          const ComparisonList& comparisons,
                                                          unsigned workers) {
  validate(config);
  std::map<std::string, std::size_t> index;
  for (const auto& e : comparisons.entries) {
    index.emplace(e.reference_id, 0);
    index.emplace(e.probe_id, 0);
  }
  std::vector<std::string> ids;
  for (auto& [id, slot] : index) {
    slot = ids.size();
    ids.push_back(id);
  }

  const std::size_t nb = config.branches.size();
  std::vector<std::optional<Prepared>> prepared(ids.size() * nb);
  parallel_for(ids.size(), workers, [&](std::size_t i) {
    const RawSignature sig = load(ids[i]);
    for (std::size_t b = 0; b < nb; ++b) {
      prepared[i * nb + b] = prepare(sig, config.branches[b].second);
    }
  });

  std::vector<std::vector<double>> distances(nb, std::vector<double>(comparisons.size()));
  parallel_for(comparisons.size(), workers, [&](std::size_t k) {
    const auto& e = comparisons.entries[k];
    const std::size_t ri = index.at(e.reference_id), pi = index.at(e.probe_id);
    for (std::size_t b = 0; b < nb; ++b) {
      distances[b][k] =
          branch_distance(*prepared[ri * nb + b], *prepared[pi * nb + b], config.branches[b].second);
    }
  });
  return distances;
}

namespace {

std::vector<double> fuse_all(const PipelineConfig& config,
                             const std::vector<std::vector<double>>& distances) {
  const std::size_t n = distances.empty() ? 0 : distances.front().size();
  std::vector<double> scores(n);
  std::vector<double> per_branch(config.branches.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t b = 0; b < config.branches.size(); ++b) {
      per_branch[b] = branch_score(distances[b][k], config.branches[b].second);
    }
    scores[k] = fuse_branch_scores(per_branch, config);
  }
  return scores;
}

}  // namespace

std::vector<double> score_comparisons(const PipelineConfig& config, const SignatureLoader& load,
                                      const ComparisonList& comparisons, unsigned workers) {
  return fuse_all(config, compute_branch_distances(config, load, comparisons, workers));
}

std::vector<double> score_comparisons(const PipelineConfig& config,
                                      const DatasetManifest& manifest,
                                      const ComparisonList& comparisons, unsigned workers) {
  check_resolves(manifest, comparisons);
  return score_comparisons(
      config, [&](const std::string& id) { return load_signature(manifest, id); }, comparisons,
      workers);
}

PipelineConfig calibrate(const PipelineConfig& input, const SignatureLoader& load,
                         const ComparisonList& labelled, unsigned workers) {
  if (!labelled.has_ground_truth()) {
    throw ValidationError("calibration needs labelled comparisons");
  }
  PipelineConfig config = input;
  const auto distances = compute_branch_distances(config, load, labelled, workers);
  std::vector<Label> labels;
  for (const auto& e : labelled.entries) labels.push_back(*e.expected);

  std::vector<std::vector<double>> streams;
  for (std::size_t b = 0; b < config.branches.size(); ++b) {
    auto& branch = config.branches[b].second;
    std::vector<double> genuine, forgery;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      (labels[k] == Label::genuine ? genuine : forgery).push_back(distances[b][k]);
    }
    if (genuine.empty() || forgery.empty()) {
      throw ValidationError("calibration needs genuine and forgery comparisons");
    }
    if (branch.threshold != ThresholdScorer::none) {
      const auto t = estimate_sigstat_thresholds(genuine, forgery);
      branch.g_th = t.g_th;
      branch.f_th = t.f_th;
      branch.d_g_min = t.d_g_min;
      branch.d_f_med = t.d_f_med;
    }
    if (branch.tanh) {
      BranchConfig raw = branch;
      raw.tanh = false;
      std::vector<double> genuine_scores;
      for (double d : genuine) genuine_scores.push_back(branch_score(d, raw));
      const auto p = estimate_tanh_params(genuine_scores);
      branch.tanh_mu = p.mu;
      branch.tanh_sigma = p.sigma;
    }
    std::vector<double> stream;
    for (double d : distances[b]) stream.push_back(branch_score(d, branch));
    streams.push_back(std::move(stream));
  }
  if (config.branches.size() > 1) config.fusion_weights = search_fusion_weights(streams, labels);
  validate(config);
  return config;
}

}  // namespace sigverify
