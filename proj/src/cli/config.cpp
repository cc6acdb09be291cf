#include "pbsrdd/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pbsrdd/cli/expression.hpp"
#include "pbsrdd/core/error.hpp"

namespace pbsrdd::cli {

using nlohmann::json;

bool operator==(const SpeciesSpec& a, const SpeciesSpec& b) {
  return a.name == b.name && a.diffusivity == b.diffusivity && a.radius == b.radius;
}

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ModelError("config: '" + key + "' " + what);
}

// Reads the members of one JSON object, remembering which keys were consumed
// so that anything left over is reported.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string key(std::string_view k) const { return path_.empty() ? std::string(k) : path_ + "." + std::string(k); }

  const json* find(std::string_view k) {
    seen_.insert(std::string(k));
    auto it = j_.find(std::string(k));
    return it == j_.end() ? nullptr : &*it;
  }

  void number(std::string_view k, double& out) {
    if (auto* v = find(k)) out = as_number(*v, key(k));
  }

  template <class Int>
  void integer(std::string_view k, Int& out) {
    if (auto* v = find(k)) out = as_integer<Int>(*v, key(k));
  }

  void string(std::string_view k, std::string& out) {
    if (auto* v = find(k)) {
      if (!v->is_string()) fail(key(k), "must be a string");
      out = v->get<std::string>();
    }
  }

  void boolean(std::string_view k, bool& out) {
    if (auto* v = find(k)) {
      if (!v->is_boolean()) fail(key(k), "must be true or false");
      out = v->get<bool>();
    }
  }

  void numbers(std::string_view k, std::vector<double>& out) {
    if (auto* v = find(k)) {
      if (!v->is_array()) fail(key(k), "must be an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_number((*v)[i], key(k) + "[" + std::to_string(i) + "]"));
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(key(it.key()), "is not a known setting");
  }

  static double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) fail(key, "must be a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "must be finite");
    return d;
  }

  template <class Int>
  static Int as_integer(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) {
      auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) fail(key, "is out of range");
      return static_cast<Int>(u);
    }
    if (v.is_number_integer()) {
      auto s = v.get<std::int64_t>();
      if constexpr (std::is_unsigned_v<Int>) {
        if (s < 0) fail(key, "must not be negative");
      }
      if (s > static_cast<std::int64_t>(std::numeric_limits<Int>::max())) fail(key, "is out of range");
      return static_cast<Int>(s);
    }
    fail(key, "must be an integer");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_solver(Reader& r, mfm::SolverSettings& s) {
  r.number("dt_max", s.dt_max);
  r.number("dt_min", s.dt_min);
  r.number("newton_tol", s.newton_tol);
  r.integer("newton_max_iters", s.newton_max_iters);
  r.number("krylov_tol", s.krylov_tol);
  r.integer("krylov_restart", s.krylov_restart);
  r.integer("krylov_max_iters", s.krylov_max_iters);
  r.number("positivity_tol", s.positivity_tol);
  r.integer("collocation_points", s.collocation_points);
  std::string path = s.convolution == mfm::ConvolutionPath::fft ? "fft" : "dense";
  r.string("convolution", path);
  if (path == "fft")
    s.convolution = mfm::ConvolutionPath::fft;
  else if (path == "dense")
    s.convolution = mfm::ConvolutionPath::dense;
  else
    fail(r.key("convolution"), "must be \"fft\" or \"dense\"");
}

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) fail(key, what);
}

bool sorted_within(const std::vector<double>& v, double lo, double hi) {
  return std::is_sorted(v.begin(), v.end()) && std::adjacent_find(v.begin(), v.end()) == v.end() &&
         (v.empty() || (v.front() >= lo && v.back() <= hi));
}

json to_json(const ExperimentConfig& c) {
  json species = json::array();
  for (const auto& s : c.species) species.push_back({{"name", s.name}, {"diffusivity", s.diffusivity}, {"radius", s.radius}});
  json initial = json::array();
  for (const auto& p : c.initial) {
    json e{{"mass", p.mass}};
    if (p.values.empty())
      e["expression"] = p.expression;
    else
      e["values"] = p.values;
    initial.push_back(e);
  }
  const auto& s = c.solver;
  return json{
      {"domain", {{"length", c.length}, {"voxels", c.voxels}}},
      {"species", species},
      {"potentials", {{"kappa", c.kappa}, {"cutoff_factor", c.cutoff_factor}}},
      {"reactions", {{"binding_rate", c.binding_rate}, {"unbinding_rate", c.unbinding_rate}, {"kernel_width", c.kernel_width}}},
      {"initial", initial},
      {"gamma", c.gammas},
      {"replicates", c.replicates},
      {"t_end", c.t_end},
      {"record_times", c.record_times},
      {"field_times", c.field_times},
      {"seed", c.seed},
      {"free_reference", c.free_reference},
      {"solver",
       {{"dt_max", s.dt_max},
        {"dt_min", s.dt_min},
        {"newton_tol", s.newton_tol},
        {"newton_max_iters", s.newton_max_iters},
        {"krylov_tol", s.krylov_tol},
        {"krylov_restart", s.krylov_restart},
        {"krylov_max_iters", s.krylov_max_iters},
        {"positivity_tol", s.positivity_tol},
        {"collocation_points", s.collocation_points},
        {"convolution", s.convolution == mfm::ConvolutionPath::fft ? "fft" : "dense"}}},
      {"workers", c.workers},
      {"output_dir", c.output_dir},
  };
}

}  // namespace

std::vector<std::string> ExperimentConfig::species_names() const {
  return {species[0].name, species[1].name, species[2].name};
}

void ExperimentConfig::finalize() {
  check(length > 0.0, "domain.length", "must be positive");
  check(voxels >= 3, "domain.voxels", "must be at least 3");
  std::set<std::string> names;
  for (std::size_t s = 0; s < 3; ++s) {
    const std::string key = "species[" + std::to_string(s) + "]";
    check(!species[s].name.empty(), key + ".name", "must not be empty");
    check(names.insert(species[s].name).second, key + ".name", "repeats another species name");
    check(species[s].diffusivity > 0.0, key + ".diffusivity", "must be positive");
    check(species[s].radius >= 0.0, key + ".radius", "must not be negative");
  }
  check(kappa >= 0.0, "potentials.kappa", "must not be negative");
  check(cutoff_factor > 0.0, "potentials.cutoff_factor", "must be positive");
  check(binding_rate >= 0.0, "reactions.binding_rate", "must not be negative");
  check(unbinding_rate >= 0.0, "reactions.unbinding_rate", "must not be negative");
  check(kernel_width > 0.0, "reactions.kernel_width", "must be positive");
  for (std::size_t s = 0; s < 3; ++s) {
    const std::string key = "initial[" + std::to_string(s) + "]";
    const auto& p = initial[s];
    check(p.mass >= 0.0, key + ".mass", "must not be negative");
    if (p.values.empty()) {
      try {
        Expression e(p.expression, length);
      } catch (const ModelError& err) {
        fail(key + ".expression", std::string("is invalid: ") + err.what());
      }
    } else {
      check(p.values.size() >= 2, key + ".values", "needs at least two samples");
      for (double v : p.values) check(v >= 0.0, key + ".values", "must not contain negative values");
    }
  }
  check(!gammas.empty(), "gamma", "must list at least one value");
  for (std::size_t k = 0; k < gammas.size(); ++k)
    check(gammas[k] > 0.0, "gamma[" + std::to_string(k) + "]", "must be positive");
  check(replicates >= 1, "replicates", "must be at least 1");
  check(t_end >= 0.0, "t_end", "must not be negative");
  if (record_times.empty())
    for (int k = 0; k <= 80; ++k) record_times.push_back(t_end * k / 80.0);
  if (field_times.empty()) field_times.push_back(t_end);
  check(sorted_within(record_times, 0.0, t_end), "record_times", "must be strictly increasing within [0, t_end]");
  check(sorted_within(field_times, 0.0, t_end), "field_times", "must be strictly increasing within [0, t_end]");
  for (double t : field_times)
    check(std::binary_search(record_times.begin(), record_times.end(), t), "field_times",
          "must be a subset of record_times");
  try {
    solver.validate();
  } catch (const ModelError& e) {
    fail("solver", e.what());
  }
  check(workers >= 1, "workers", "must be at least 1");
  check(!output_dir.empty(), "output_dir", "must not be empty");
}

ExperimentConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("config: not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Reader root(j, "");
  if (auto* d = root.find("domain")) {
    Reader r(*d, "domain");
    r.number("length", c.length);
    r.integer("voxels", c.voxels);
    r.finish();
  }
  if (auto* sp = root.find("species")) {
    if (!sp->is_array() || sp->size() != 3) fail("species", "must be an array of three species (A, B, C roles)");
    for (std::size_t s = 0; s < 3; ++s) {
      Reader r((*sp)[s], "species[" + std::to_string(s) + "]");
      r.string("name", c.species[s].name);
      r.number("diffusivity", c.species[s].diffusivity);
      r.number("radius", c.species[s].radius);
      r.finish();
    }
  }
  if (auto* p = root.find("potentials")) {
    Reader r(*p, "potentials");
    r.number("kappa", c.kappa);
    r.number("cutoff_factor", c.cutoff_factor);
    r.finish();
  }
  if (auto* p = root.find("reactions")) {
    Reader r(*p, "reactions");
    r.number("binding_rate", c.binding_rate);
    r.number("unbinding_rate", c.unbinding_rate);
    r.number("kernel_width", c.kernel_width);
    r.finish();
  }
  if (auto* in = root.find("initial")) {
    if (!in->is_array() || in->size() != 3) fail("initial", "must be an array of three profiles");
    for (std::size_t s = 0; s < 3; ++s) {
      const std::string key = "initial[" + std::to_string(s) + "]";
      Reader r((*in)[s], key);
      ProfileSpec p;
      p.mass = c.initial[s].mass;
      r.number("mass", p.mass);
      r.string("expression", p.expression);
      r.numbers("values", p.values);
      r.finish();
      if (p.expression.empty() == p.values.empty()) fail(key, "needs exactly one of 'expression' and 'values'");
      c.initial[s] = p;
    }
  }
  root.numbers("gamma", c.gammas);
  root.integer("replicates", c.replicates);
  root.number("t_end", c.t_end);
  root.numbers("record_times", c.record_times);
  root.numbers("field_times", c.field_times);
  root.integer("seed", c.seed);
  root.boolean("free_reference", c.free_reference);
  if (auto* s = root.find("solver")) {
    Reader r(*s, "solver");
    read_solver(r, c.solver);
    r.finish();
  }
  root.integer("workers", c.workers);
  root.string("output_dir", c.output_dir);
  root.finish();
  c.finalize();
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string echo_config(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

std::uint64_t config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("workers");
  j.erase("output_dir");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace pbsrdd::cli
