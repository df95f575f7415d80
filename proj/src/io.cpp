#include "hrt/io.hpp"

#include <fstream>

namespace hrt {
namespace {

using nlohmann::ordered_json;

const ordered_json& require_field(const ordered_json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw InputError(std::string("missing field '") + name + "'");
  }
  return *it;
}

double number_field(const ordered_json& j, const char* name) {
  const ordered_json& v = require_field(j, name);
  if (!v.is_number()) {
    throw InputError(std::string("field '") + name + "' must be a number");
  }
  return v.get<double>();
}

std::int64_t int_field(const ordered_json& j, const char* name) {
  const ordered_json& v = require_field(j, name);
  if (!v.is_number_integer()) {
    throw InputError(std::string("field '") + name + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string string_field(const ordered_json& j, const char* name,
                         const std::string& fallback) {
  const auto it = j.find(name);
  if (it == j.end()) return fallback;
  if (!it->is_string()) {
    throw InputError(std::string("field '") + name + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

ordered_json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open '" + path + "'");
  }
  try {
    return ordered_json::parse(in);
  } catch (const ordered_json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

ordered_json distribution_to_json(const BinnedDistribution& d) {
  ordered_json j;
  j["kind"] = d.kind() == SupportKind::Bins ? "bins" : "points";
  if (d.kind() == SupportKind::Bins) {
    j["lo"] = d.lo();
    j["hi"] = d.hi();
  }
  j["masses"] = std::vector<double>(d.masses().begin(), d.masses().end());
  j["label"] = d.label();
  return j;
}

BinnedDistribution distribution_from_json(const ordered_json& j) {
  if (!j.is_object()) {
    throw InputError("distribution must be a JSON object");
  }
  const ordered_json& kind = require_field(j, "kind");
  if (!kind.is_string() ||
      (kind.get<std::string>() != "bins" && kind.get<std::string>() != "points")) {
    throw InputError("field 'kind' must be \"bins\" or \"points\"");
  }
  const ordered_json& masses_json = require_field(j, "masses");
  if (!masses_json.is_array()) {
    throw InputError("field 'masses' must be an array of numbers");
  }
  std::vector<double> masses;
  masses.reserve(masses_json.size());
  for (const auto& v : masses_json) {
    if (!v.is_number()) {
      throw InputError("field 'masses' must be an array of numbers");
    }
    masses.push_back(v.get<double>());
  }
  const std::string label = string_field(j, "label", "");

  BinnedDistribution d;
  if (kind.get<std::string>() == "bins") {
    const double lo = number_field(j, "lo");
    const double hi = number_field(j, "hi");
    d = BinnedDistribution::bins(lo, hi, std::move(masses), label);
  } else {
    d = BinnedDistribution::points(std::move(masses), label);
  }
  const ValidationResult r = d.validate();
  if (!r.ok) {
    throw InputError("distribution '" + label + "' invalid: " + r.message);
  }
  return d;
}

BinnedDistribution load_distribution(const std::string& path) {
  try {
    return distribution_from_json(parse_json_file(path));
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + " (while loading '" + path + "')");
  }
}

void save_distribution(const BinnedDistribution& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write '" + path + "'");
  }
  out << distribution_to_json(d).dump(2) << '\n';
}

ordered_json batch_to_json(const SampleBatch& b) {
  ordered_json j;
  j["atom_indices"] = b.atom_indices;
  j["seed"] = b.seed;
  j["source_label"] = b.source_label;
  return j;
}

SampleBatch batch_from_json(const ordered_json& j) {
  if (!j.is_object()) {
    throw InputError("sample batch must be a JSON object");
  }
  const ordered_json& idx = require_field(j, "atom_indices");
  if (!idx.is_array()) {
    throw InputError("field 'atom_indices' must be an array of integers");
  }
  SampleBatch b;
  b.atom_indices.reserve(idx.size());
  for (const auto& v : idx) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw InputError("field 'atom_indices' must hold non-negative integers");
    }
    b.atom_indices.push_back(static_cast<std::uint32_t>(v.get<std::int64_t>()));
  }
  if (const auto it = j.find("seed"); it != j.end()) {
    b.seed = it->get<std::uint64_t>();
  }
  b.source_label = string_field(j, "source_label", "");
  return b;
}

SampleBatch load_sample_batch(const std::string& path) {
  try {
    return batch_from_json(parse_json_file(path));
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + " (while loading '" + path + "')");
  }
}

TestFamily test_family_from_name(const std::string& name) {
  if (name == "ml") return TestFamily::ML;
  if (name == "scheffe") return TestFamily::Scheffe;
  if (name == "baraud") return TestFamily::Baraud;
  if (name == "disjoint") return TestFamily::DisjointSupport;
  if (name == "midpoint") return TestFamily::HellingerMidpoint;
  throw InputError("unknown test family '" + name +
                   "' (expected ml|scheffe|baraud|disjoint|midpoint)");
}

std::string test_family_name(TestFamily family) {
  switch (family) {
    case TestFamily::ML: return "ml";
    case TestFamily::Scheffe: return "scheffe";
    case TestFamily::Baraud: return "baraud";
    case TestFamily::DisjointSupport: return "disjoint";
    case TestFamily::HellingerMidpoint: return "midpoint";
  }
  return "?";
}

namespace {

BinnedDistribution distribution_field(const ordered_json& j, const char* name) {
  const ordered_json& v = require_field(j, name);
  if (v.is_string()) return load_distribution(v.get<std::string>());
  return distribution_from_json(v);
}

}  // namespace

ExperimentConfig config_from_json(const ordered_json& j) {
  ExperimentConfig cfg;
  const ordered_json& test = require_field(j, "test");
  if (!test.is_string()) {
    throw InputError("field 'test' must be a string");
  }
  cfg.family = test_family_from_name(test.get<std::string>());
  cfg.p1 = distribution_field(j, "p1");
  cfg.p2 = distribution_field(j, "p2");
  cfg.p = distribution_field(j, "p");
  cfg.sample_count = int_field(j, "m");
  cfg.trials = int_field(j, "trials");
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("gamma")) cfg.gamma = number_field(j, "gamma");
  if (j.contains("delta")) cfg.delta = number_field(j, "delta");
  if (j.contains("threads")) {
    cfg.threads = static_cast<int>(int_field(j, "threads"));
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  try {
    return config_from_json(parse_json_file(path));
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + " (while loading '" + path + "')");
  }
}

}  // namespace hrt
