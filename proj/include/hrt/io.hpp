#pragma once

#include <stdexcept>
#include <string>

#include "hrt/distribution.hpp"
#include "hrt/harness.hpp"

#include "json.hpp"

namespace hrt {

/// Problem with user-supplied input (files, JSON schemas, invalid
/// distributions). The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Distribution file schema:
//   {"kind": "bins"|"points", "lo": number, "hi": number,
//    "masses": [number, ...], "label": string}
// lo/hi are required for "bins" and ignored for "points". The loader
// validates and rejects invalid distributions with a diagnostic naming the
// offending field or invariant.
nlohmann::ordered_json distribution_to_json(const BinnedDistribution& d);
BinnedDistribution distribution_from_json(const nlohmann::ordered_json& j);
BinnedDistribution load_distribution(const std::string& path);
void save_distribution(const BinnedDistribution& d, const std::string& path);

// Sample batch schema:
//   {"atom_indices": [int, ...], "seed": int, "source_label": string}
nlohmann::ordered_json batch_to_json(const SampleBatch& b);
SampleBatch batch_from_json(const nlohmann::ordered_json& j);
SampleBatch load_sample_batch(const std::string& path);

// Experiment config schema (simulate/sweep):
//   {"test": "ml"|"scheffe"|"baraud"|"disjoint"|"midpoint",
//    "p1": path-or-object, "p2": path-or-object, "p": path-or-object,
//    "m": int, "trials": int, "seed": int,
//    "gamma": number?, "delta": number?, "threads": int?}
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);
ExperimentConfig load_experiment_config(const std::string& path);

TestFamily test_family_from_name(const std::string& name);
std::string test_family_name(TestFamily family);

nlohmann::ordered_json parse_json_file(const std::string& path);

}  // namespace hrt
