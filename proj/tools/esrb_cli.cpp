// Command-line front end: simulate, degrade, edi, solve, sequence, stats, metrics.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "esrb/edi.hpp"
#include "esrb/io.hpp"
#include "esrb/metrics.hpp"
#include "esrb/simulate.hpp"
#include "esrb/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kTimestampsFile = "timestamps.txt";

std::string frame_name(std::size_t index, int width) {
  std::ostringstream os;
  os << "frame_" << std::setw(width) << std::setfill('0') << index << ".pgm";
  return os.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// Y.pgm -> Y.manifest.json; a directory gets DIR/manifest.json.
fs::path default_manifest(const fs::path& primary, bool is_dir) {
  if (is_dir) return primary / "manifest.json";
  fs::path m = primary;
  m.replace_extension(".manifest.json");
  return m;
}

/// Run record: every option value, the seed, the version and the outputs.
class Manifest {
 public:
  Manifest(const CLI::App& sub, std::uint64_t seed) {
    doc_["command"] = sub.get_name();
    doc_["version"] = ESRB_VERSION;
    doc_["seed"] = seed;
    json config = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "help" || name == "config") continue;
      if (opt->count() > 0) {
        config[name] = opt->as<std::string>();
      } else if (opt->get_expected_min() == 0) {
        config[name] = "false";  // unset flag
      } else {
        config[name] = opt->get_default_str();
      }
    }
    doc_["config"] = config;
    doc_["outputs"] = json::array();
  }

  void output(const fs::path& p) { doc_["outputs"].push_back(p.generic_string()); }
  json& extra() { return doc_; }

  void write(const fs::path& path) {
    doc_["created"] = utc_now();
    ensure_parent(path);
    std::ofstream out(path);
    out << doc_.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
  }

 private:
  json doc_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

// --- frame directories ------------------------------------------------------

void write_frame_dir(const esrb::FrameSequence& frames, const fs::path& dir, Manifest& m) {
  fs::create_directories(dir);
  const int width = std::max<int>(4, static_cast<int>(std::to_string(frames.size()).size()));
  std::ofstream ts(dir / kTimestampsFile);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const fs::path p = dir / frame_name(k, width);
    esrb::write_intensity(frames[k], p);
    m.output(p);
    ts << std::llround(frames[k].t * 1e6) << '\n';
  }
  if (!ts) throw std::runtime_error("failed writing timestamps");
  m.output(dir / kTimestampsFile);
}

esrb::FrameSequence read_frame_dir(const fs::path& dir) {
  std::ifstream ts(dir / kTimestampsFile);
  if (!ts) throw std::runtime_error("cannot open " + (dir / kTimestampsFile).string());
  std::vector<long long> us;
  std::string line;
  int lineno = 0;
  while (std::getline(ts, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream is(line);
    long long v;
    if (!(is >> v)) {
      throw esrb::ParseError((dir / kTimestampsFile).string(),
                             esrb::ParseError("expected integer microseconds", lineno));
    }
    us.push_back(v);
  }
  const int width = std::max<int>(4, static_cast<int>(std::to_string(us.size()).size()));
  esrb::FrameSequence seq;
  for (std::size_t k = 0; k < us.size(); ++k) {
    esrb::Frame f = esrb::read_intensity(dir / frame_name(k, width));
    f.t = static_cast<double>(us[k]) * 1e-6;
    if (!seq.empty() && !f.same_shape(seq.front())) {
      throw std::runtime_error("frame " + std::to_string(k) + " has a different size");
    }
    seq.push_back(std::move(f));
  }
  return seq;
}

// Exposure window of an event file combined with a blurry frame.
struct Observation {
  esrb::Frame blurry;
  esrb::EventStream events;
};

Observation load_observation(const fs::path& blurry, const fs::path& events) {
  Observation o{esrb::read_intensity(blurry), esrb::read_events(events)};
  if (o.blurry.width != o.events.width() || o.blurry.height != o.events.height()) {
    throw std::runtime_error("blurry frame and event sensor sizes differ");
  }
  if (!(o.events.duration() > 0.0)) throw std::runtime_error("event window is empty");
  return o;
}

double absolute_reference(const esrb::EventStream& s, double offset) {
  if (offset < 0.0 || offset > s.duration() + 1e-12) {
    throw std::domain_error("--f must lie in [0, T] relative to the exposure start");
  }
  return std::min(s.t_start() + offset, s.t_end());
}

unsigned thread_budget(unsigned requested) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* env = std::getenv("ESRB_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

// --- config files -----------------------------------------------------------

// Expands `--config FILE` into `--key=value` arguments placed right after the
// subcommand so that options given on the command line win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> injected;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      continue;
    }
    for (auto& [key, value] : esrb::read_key_values(fs::path(path))) {
      std::string k = key;
      std::replace(k.begin(), k.end(), '_', '-');
      injected.push_back("--" + k + "=" + value);
    }
  }
  if (!injected.empty() && !args.empty()) {
    args.insert(args.begin() + 1, injected.begin(), injected.end());
  }
  return args;
}

// --- subcommands ------------------------------------------------------------

struct SimulateArgs {
  std::string scene = "moving-edge";
  fs::path frames_dir;
  fs::path out_dir;
  fs::path events_out;
  fs::path manifest;
  int width = 128, height = 128, frames = 17;
  double exposure = 0.017;
  double threshold = 0.25;
  double x0 = 24.0, speed = 3000.0, slant = 0.15, ramp = 2.0, gain = 1.0;
  double lo = 30.0, hi = 90.0, period = 40.0;
};

void run_simulate(const CLI::App& sub, const SimulateArgs& a) {
  Manifest m(sub, 0);
  esrb::FrameSequence seq;
  if (!a.frames_dir.empty()) {
    seq = read_frame_dir(a.frames_dir);
  } else {
    if (a.scene != "moving-edge") throw std::domain_error("unknown scene '" + a.scene + "'");
    if (a.frames < 2) throw std::domain_error("--frames must be at least 2");
    if (a.out_dir.empty()) throw std::domain_error("--out-dir is required to render a scene");
    esrb::MovingEdge edge;
    edge.x0 = a.x0;
    edge.speed = a.speed;
    edge.slant = a.slant;
    edge.ramp_width = a.ramp;
    edge.log_gain = a.gain;
    const esrb::Frame texture = esrb::textured_base(a.width, a.height, a.lo, a.hi, a.period);
    std::vector<double> times;
    for (int k = 0; k < a.frames; ++k) {
      times.push_back(static_cast<double>(std::llround(k * a.exposure / (a.frames - 1) * 1e6)) * 1e-6);
    }
    seq = esrb::render_moving_edge(texture, times, edge);
    write_frame_dir(seq, a.out_dir, m);
  }
  if (!a.events_out.empty()) {
    const auto events = esrb::simulate_events(seq, a.threshold);
    ensure_parent(a.events_out);
    esrb::write_events(events, a.events_out);
    m.output(a.events_out);
    m.extra()["event_count"] = events.size();
    std::cout << "events = " << events.size() << '\n';
  }
  if (a.out_dir.empty() && a.events_out.empty()) {
    throw std::domain_error("nothing to write: give --out-dir or --events-out");
  }
  m.write(!a.manifest.empty()            ? a.manifest
          : !a.out_dir.empty()           ? default_manifest(a.out_dir, true)
                                         : default_manifest(a.events_out, false));
}

struct DegradeArgs {
  fs::path frames_dir, blurry_out, events_out, manifest;
  esrb::DegradationConfig cfg;
};

void run_degrade(const CLI::App& sub, DegradeArgs a) {
  Manifest m(sub, a.cfg.rng_seed);
  const auto seq = read_frame_dir(a.frames_dir);
  const auto r = esrb::degrade(seq, a.cfg);
  ensure_parent(a.blurry_out);
  ensure_parent(a.events_out);
  esrb::write_intensity(r.blurry, a.blurry_out);
  esrb::write_events(r.events, a.events_out);
  m.output(a.blurry_out);
  m.output(a.events_out);
  m.extra()["signal_events"] = r.signal_events;
  m.extra()["noise_events"] = r.noise_events;
  std::cout << "signal_events = " << r.signal_events << "\nnoise_events = " << r.noise_events
            << '\n';
  m.write(a.manifest.empty() ? default_manifest(a.blurry_out, false) : a.manifest);
}

struct EdiArgs {
  fs::path blurry, events, out, manifest;
  double threshold = 0.25;
  double f = 0.0;
};

void run_edi(const CLI::App& sub, const EdiArgs& a) {
  Manifest m(sub, 0);
  const auto o = load_observation(a.blurry, a.events);
  const auto e = esrb::resm(o.events, absolute_reference(o.events, a.f), a.threshold);
  ensure_parent(a.out);
  esrb::write_intensity(esrb::edi_reconstruct(o.blurry, e), a.out);
  m.output(a.out);
  m.write(a.manifest.empty() ? default_manifest(a.out, false) : a.manifest);
}

struct SolveArgs {
  fs::path blurry, events, out, image_out, manifest;
  fs::path dict_image, dict_event, dict_high_res;
  std::string dict = "dct";
  int kernel = 5;
  int atoms = 8;
  std::uint64_t dict_seed = 1;
  double threshold = 0.25;
  double f = 0.0;
  esrb::SolverConfig cfg;
};

esrb::DictionarySet build_dictionaries(const SolveArgs& a) {
  using esrb::DictionaryKind;
  using esrb::DictionaryRole;
  const int s2 = a.cfg.scale * a.cfg.scale;
  const int k = a.kernel;
  esrb::DictionarySet d;
  if (a.dict == "identity") {
    d = {esrb::make_dictionary(DictionaryKind::identity, {1, 1, 1, 1}),
         esrb::make_dictionary(DictionaryKind::identity, {1, 1, 1, 1}, 0, DictionaryRole::event),
         esrb::make_dictionary(DictionaryKind::identity, {s2, 1, 1, 1}, 0, DictionaryRole::high_res)};
  } else if (a.dict == "dct") {
    d = {esrb::make_dictionary(DictionaryKind::dct, {1, k * k, k, k}),
         esrb::make_dictionary(DictionaryKind::dct, {1, k * k, k, k}, 0, DictionaryRole::event),
         esrb::make_dictionary(DictionaryKind::dct, {s2, k * k, k, k}, 0, DictionaryRole::high_res)};
  } else if (a.dict == "gaussian") {
    d = {esrb::make_dictionary(DictionaryKind::seeded_gaussian, {1, a.atoms, k, k}, a.dict_seed),
         esrb::make_dictionary(DictionaryKind::seeded_gaussian, {1, a.atoms, k, k},
                               a.dict_seed + 1, DictionaryRole::event),
         esrb::make_dictionary(DictionaryKind::seeded_gaussian, {s2, a.atoms, k, k},
                               a.dict_seed + 2, DictionaryRole::high_res)};
  } else {
    throw std::domain_error("unknown dictionary kind '" + a.dict + "'");
  }
  if (!a.dict_image.empty()) d.image = esrb::read_dictionary(a.dict_image, DictionaryRole::image);
  if (!a.dict_event.empty()) d.event = esrb::read_dictionary(a.dict_event, DictionaryRole::event);
  if (!a.dict_high_res.empty()) {
    d.high_res = esrb::read_dictionary(a.dict_high_res, DictionaryRole::high_res);
  }
  return d;
}

void run_solve(const CLI::App& sub, const SolveArgs& a) {
  Manifest m(sub, a.dict_seed);
  const auto o = load_observation(a.blurry, a.events);
  const auto e = esrb::resm(o.events, absolute_reference(o.events, a.f), a.threshold);
  const auto r = esrb::solve(o.blurry, e, build_dictionaries(a), a.cfg);
  ensure_parent(a.out);
  esrb::write_intensity(r.high_res, a.out);
  m.output(a.out);
  if (!a.image_out.empty()) {
    ensure_parent(a.image_out);
    esrb::write_intensity(r.image, a.image_out);
    m.output(a.image_out);
  }
  m.extra()["objective_trace"] = r.trace;
  std::cout << "objective = " << fmt(r.trace.front()) << " -> " << fmt(r.trace.back()) << '\n';
  m.write(a.manifest.empty() ? default_manifest(a.out, false) : a.manifest);
}

struct SequenceArgs {
  fs::path blurry, events, out_dir, manifest;
  double threshold = 0.25;
  int times = 13;
  unsigned threads = 0;
};

void run_sequence(const CLI::App& sub, const SequenceArgs& a) {
  Manifest m(sub, 0);
  if (a.times < 1) throw std::domain_error("--times must be at least 1");
  const auto o = load_observation(a.blurry, a.events);
  std::vector<double> times;
  for (int k = 0; k < a.times; ++k) {
    const double w = a.times == 1 ? 0.0 : static_cast<double>(k) / (a.times - 1);
    times.push_back(k + 1 == a.times && a.times > 1 ? o.events.t_end()
                                                    : o.events.t_start() + w * o.events.duration());
  }
  const auto frames = esrb::sequence_reconstruct(o.blurry, o.events, times, a.threshold,
                                                 thread_budget(a.threads));
  fs::create_directories(a.out_dir);
  const int width = std::max<int>(2, static_cast<int>(std::to_string(a.times - 1).size()));
  std::ofstream ts(a.out_dir / kTimestampsFile);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const fs::path p = a.out_dir / frame_name(k, width);
    esrb::write_intensity(frames[k], p);
    m.output(p);
    ts << std::setprecision(17) << frames[k].t << '\n';
  }
  m.output(a.out_dir / kTimestampsFile);
  m.write(a.manifest.empty() ? default_manifest(a.out_dir, true) : a.manifest);
}

struct StatsArgs {
  double rate = 50.0, threshold = 0.01, exposure = 1.0, f = 0.0;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  fs::path out;
};

void run_stats(const CLI::App& sub, const StatsArgs& a) {
  const auto model = esrb::noise_stats(a.rate, a.threshold, a.exposure, a.f);
  const auto mc = esrb::monte_carlo_E(a.rate, a.threshold, a.exposure, a.f, a.trials, a.seed);
  const std::pair<const char*, double> rows[] = {
      {"rho", model.rho},
      {"mu", model.mu},
      {"sigma", model.sigma},
      {"empirical_mean", mc.mean},
      {"empirical_variance", mc.variance},
      {"standard_error", mc.standard_error},
      {"linearized_mean", mc.linearized_mean},
      {"linearized_variance", mc.linearized_variance},
  };
  for (const auto& [k, v] : rows) std::cout << k << " = " << fmt(v) << '\n';
  if (!a.out.empty()) {
    Manifest m(sub, a.seed);
    json results = json::object();
    for (const auto& [k, v] : rows) results[k] = v;
    m.extra()["results"] = results;
    m.write(a.out);
  }
}

struct MetricsArgs {
  fs::path a, b, out;
  double peak = 255.0;
};

void run_metrics(const CLI::App& sub, const MetricsArgs& a) {
  const auto fa = esrb::read_intensity(a.a);
  const auto fb = esrb::read_intensity(a.b);
  const double p = esrb::psnr(fa, fb, a.peak);
  std::cout << "psnr = " << fmt(p) << '\n';
  json results = json::object();
  results["psnr"] = std::isinf(p) ? json("inf") : json(p);
  if (fa.width >= 11 && fa.height >= 11) {
    const double s = esrb::ssim(fa, fb, a.peak);
    std::cout << "ssim = " << fmt(s) << '\n';
    results["ssim"] = s;
  } else {
    std::cout << "ssim = n/a (frames smaller than 11x11)\n";
  }
  if (!a.out.empty()) {
    Manifest m(sub, 0);
    m.extra()["results"] = results;
    m.write(a.out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-guided deblurring and super-resolution toolkit", "esrb_cli"};
  app.set_version_flag("--version", ESRB_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string config_path;
  auto add_config = [&](CLI::App* s) {
    s->add_option("--config", config_path, "key = value file; keys are option names");
  };

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "render a synthetic scene and/or synthesize events");
  add_config(s_sim);
  s_sim->add_option("--scene", sim.scene, "synthetic scene")->capture_default_str();
  s_sim->add_option("--frames-dir", sim.frames_dir, "read frames instead of rendering a scene");
  s_sim->add_option("--out-dir", sim.out_dir, "where rendered frames go");
  s_sim->add_option("--events-out", sim.events_out, "write threshold-crossing events here");
  s_sim->add_option("--manifest", sim.manifest);
  s_sim->add_option("--width", sim.width)->capture_default_str();
  s_sim->add_option("--height", sim.height)->capture_default_str();
  s_sim->add_option("--frames", sim.frames)->capture_default_str();
  s_sim->add_option("--exposure", sim.exposure, "seconds")->capture_default_str();
  s_sim->add_option("--c,--threshold", sim.threshold)->capture_default_str();
  s_sim->add_option("--x0", sim.x0)->capture_default_str();
  s_sim->add_option("--speed", sim.speed, "pixels per second")->capture_default_str();
  s_sim->add_option("--slant", sim.slant)->capture_default_str();
  s_sim->add_option("--ramp", sim.ramp)->capture_default_str();
  s_sim->add_option("--gain", sim.gain, "log-intensity lift behind the edge")->capture_default_str();
  s_sim->add_option("--lo", sim.lo)->capture_default_str();
  s_sim->add_option("--hi", sim.hi)->capture_default_str();
  s_sim->add_option("--period", sim.period)->capture_default_str();

  DegradeArgs deg;
  auto* s_deg = app.add_subcommand("degrade", "blur, downsample and add noise to a frame sequence");
  add_config(s_deg);
  s_deg->add_option("--frames-dir", deg.frames_dir)->required();
  s_deg->add_option("--blurry-out", deg.blurry_out)->required();
  s_deg->add_option("--events-out", deg.events_out)->required();
  s_deg->add_option("--manifest", deg.manifest);
  s_deg->add_option("--c,--threshold", deg.cfg.threshold)->capture_default_str();
  s_deg->add_option("--exposure", deg.cfg.exposure, "0 = span of the sequence")->capture_default_str();
  s_deg->add_option("--scale", deg.cfg.scale)->capture_default_str();
  s_deg->add_option("--sigma,--frame-noise-sigma", deg.cfg.frame_noise_sigma)->capture_default_str();
  s_deg->add_option("--omega,--event-noise-ratio", deg.cfg.event_noise_ratio)->capture_default_str();
  s_deg->add_option("--seed", deg.cfg.rng_seed)->capture_default_str();

  EdiArgs edi;
  auto* s_edi = app.add_subcommand("edi", "deblur one frame by double integral of events");
  add_config(s_edi);
  s_edi->add_option("--blurry", edi.blurry)->required();
  s_edi->add_option("--events", edi.events)->required();
  s_edi->add_option("--out", edi.out)->required();
  s_edi->add_option("--manifest", edi.manifest);
  s_edi->add_option("--c,--threshold", edi.threshold)->capture_default_str();
  s_edi->add_option("--f", edi.f, "seconds after exposure start")->capture_default_str();

  SolveArgs sol;
  auto* s_sol = app.add_subcommand("solve", "dual sparse coding: denoise, deblur and upscale");
  add_config(s_sol);
  s_sol->add_option("--blurry", sol.blurry)->required();
  s_sol->add_option("--events", sol.events)->required();
  s_sol->add_option("--out", sol.out, "high-resolution output")->required();
  s_sol->add_option("--image-out", sol.image_out, "low-resolution sharp image");
  s_sol->add_option("--manifest", sol.manifest);
  s_sol->add_option("--c,--threshold", sol.threshold)->capture_default_str();
  s_sol->add_option("--f", sol.f, "seconds after exposure start")->capture_default_str();
  s_sol->add_option("--dict", sol.dict, "identity, dct or gaussian")->capture_default_str();
  s_sol->add_option("--kernel", sol.kernel)->capture_default_str();
  s_sol->add_option("--atoms", sol.atoms, "channels of gaussian dictionaries")->capture_default_str();
  s_sol->add_option("--dict-seed", sol.dict_seed)->capture_default_str();
  s_sol->add_option("--dict-image", sol.dict_image, "DSLD file overriding d_I");
  s_sol->add_option("--dict-event", sol.dict_event, "DSLD file overriding d_E");
  s_sol->add_option("--dict-high-res", sol.dict_high_res, "DSLD file overriding d_X");
  s_sol->add_option("--eta", sol.cfg.eta)->capture_default_str();
  s_sol->add_option("--lambda1", sol.cfg.lambda1)->capture_default_str();
  s_sol->add_option("--lambda2", sol.cfg.lambda2)->capture_default_str();
  s_sol->add_option("--lambda3", sol.cfg.lambda3)->capture_default_str();
  s_sol->add_option("--iterations", sol.cfg.iterations)->capture_default_str();
  s_sol->add_option("--scale", sol.cfg.scale)->capture_default_str();
  s_sol->add_flag("--step-halving", sol.cfg.step_halving);
  s_sol->add_flag("--freeze-beta", sol.cfg.freeze_beta);

  SequenceArgs seqa;
  auto* s_seq = app.add_subcommand("sequence", "reconstruct evenly spaced latent frames");
  add_config(s_seq);
  s_seq->add_option("--blurry", seqa.blurry)->required();
  s_seq->add_option("--events", seqa.events)->required();
  s_seq->add_option("--out-dir", seqa.out_dir)->required();
  s_seq->add_option("--manifest", seqa.manifest);
  s_seq->add_option("--c,--threshold", seqa.threshold)->capture_default_str();
  s_seq->add_option("--times", seqa.times)->capture_default_str();
  s_seq->add_option("--threads", seqa.threads, "0 = all cores, capped by ESRB_THREADS")
      ->capture_default_str();

  StatsArgs st;
  auto* s_st = app.add_subcommand("stats", "event-noise statistics of the double integral");
  add_config(s_st);
  s_st->add_option("--lambda", st.rate, "events per second per pixel")->capture_default_str();
  s_st->add_option("--c,--threshold", st.threshold)->capture_default_str();
  s_st->add_option("--T,--exposure", st.exposure)->capture_default_str();
  s_st->add_option("--f", st.f)->capture_default_str();
  s_st->add_option("--trials", st.trials)->capture_default_str();
  s_st->add_option("--seed", st.seed)->capture_default_str();
  s_st->add_option("--out,--manifest", st.out, "also write the results as JSON");

  MetricsArgs me;
  auto* s_me = app.add_subcommand("metrics", "PSNR and SSIM between two images");
  add_config(s_me);
  s_me->add_option("--a", me.a)->required();
  s_me->add_option("--b", me.b)->required();
  s_me->add_option("--peak", me.peak)->capture_default_str();
  s_me->add_option("--out,--manifest", me.out, "also write the results as JSON");

  try {
    std::vector<std::string> args;
    try {
      args = expand_config(argc, argv);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*s_sim) run_simulate(*s_sim, sim);
    else if (*s_deg) run_degrade(*s_deg, deg);
    else if (*s_edi) run_edi(*s_edi, edi);
    else if (*s_sol) run_solve(*s_sol, sol);
    else if (*s_seq) run_sequence(*s_seq, seqa);
    else if (*s_st) run_stats(*s_st, st);
    else if (*s_me) run_metrics(*s_me, me);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
