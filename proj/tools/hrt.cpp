// hrt: robust two-hypothesis testing with respect to Hellinger distance.
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 criterion failure
// (reproduce only).

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hrt/adversarial.hpp"
#include "hrt/divergence.hpp"
#include "hrt/geodesic.hpp"
#include "hrt/harness.hpp"
#include "hrt/io.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

ordered_json json_number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

ordered_json envelope(const std::string& command, std::uint64_t seed) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = seed;
  return j;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag.has_value()) return *flag;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

void emit(const ordered_json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw hrt::InputError("cannot write '" + out_path + "'");
  out << text;
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw hrt::InputError("cannot write '" + out_path + "'");
  out << text;
}

ordered_json estimate_to_json(const hrt::ErrorEstimate& est) {
  ordered_json j;
  j["truth"] = est.truth == hrt::Truth::H0 ? "H0" : "H1";
  j["type1"] = est.type1;
  j["type2"] = est.type2;
  j["max_error"] = est.max_error;
  j["ci_halfwidth"] = est.ci_halfwidth;
  j["trials"] = est.trials;
  j["seed"] = est.seed;
  return j;
}

std::string estimate_csv_row(std::int64_t m, const hrt::ErrorEstimate& est) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%" PRId64 ",%.17g,%.17g,%.17g,%.17g,%" PRId64 ",%" PRIu64 "\n",
                m, est.type1, est.type2, est.max_error, est.ci_halfwidth,
                est.trials, est.seed);
  return buf;
}

constexpr const char* kCsvHeader = "m,type1,type2,max_error,ci,trials,seed\n";

int run_distances(const std::string& a, const std::string& b,
                  const std::string& out) {
  const hrt::BinnedDistribution d1 = hrt::load_distribution(a);
  hrt::BinnedDistribution d2 = hrt::load_distribution(b);
  hrt::BinnedDistribution d1a = d1;
  if (!d1.same_support(d2) && d1.kind() == hrt::SupportKind::Bins &&
      d2.kind() == hrt::SupportKind::Bins) {
    std::tie(d1a, d2) = hrt::align_supports(d1, d2);
  }
  const hrt::DivergenceReport r = hrt::divergence_report(d1a, d2);
  ordered_json j = envelope("distances", 0);
  j["a"] = d1.label();
  j["b"] = d2.label();
  j["hellinger_sq"] = r.hellinger_sq;
  j["bhattacharyya"] = r.bhattacharyya;
  j["tv"] = r.tv;
  j["sym_chi_sq"] = r.sym_chi_sq;
  emit(j, out);
  return 0;
}

int run_geodesic(const std::string& a, const std::string& b, double phi,
                 bool midpoint, bool phi_set, const std::string& out) {
  hrt::BinnedDistribution p1 = hrt::load_distribution(a);
  hrt::BinnedDistribution p2 = hrt::load_distribution(b);
  if (!p1.same_support(p2) && p1.kind() == hrt::SupportKind::Bins &&
      p2.kind() == hrt::SupportKind::Bins) {
    std::tie(p1, p2) = hrt::align_supports(p1, p2);
  }
  ordered_json j = envelope("geodesic", 0);
  if (midpoint == phi_set) {
    throw hrt::InputError("geodesic: pass exactly one of --phi or --midpoint");
  }
  if (midpoint) {
    const hrt::BinnedDistribution u = hrt::hellinger_midpoint(p1, p2);
    const hrt::CriticalRadius r = hrt::critical_radius(p1, p2);
    j["theta"] = hrt::hellinger_angle(p1, p2);
    j["r_star"] = r.value;
    j["degenerate"] = r.degenerate;
    j["midpoint"] = hrt::distribution_to_json(u);
  } else {
    const hrt::GeodesicPoint q = hrt::geodesic_point(p1, p2, phi);
    j["theta"] = q.theta;
    j["phi"] = q.phi;
    j["distribution"] = hrt::distribution_to_json(q.distribution);
  }
  emit(j, out);
  return 0;
}

int run_decide(const std::string& test_name, const std::string& a,
               const std::string& b, const std::string& samples_path,
               const std::string& from_path, std::int64_t count,
               const std::optional<std::uint64_t>& seed_flag,
               const std::string& out) {
  hrt::TestSpec spec;
  spec.family = hrt::test_family_from_name(test_name);
  spec.p1 = hrt::load_distribution(a);
  spec.p2 = hrt::load_distribution(b);
  if (!spec.p1.same_support(spec.p2) &&
      spec.p1.kind() == hrt::SupportKind::Bins &&
      spec.p2.kind() == hrt::SupportKind::Bins) {
    std::tie(spec.p1, spec.p2) = hrt::align_supports(spec.p1, spec.p2);
  }

  hrt::SampleBatch batch;
  if (!samples_path.empty()) {
    batch = hrt::load_sample_batch(samples_path);
  } else if (!from_path.empty()) {
    if (count < 1) throw hrt::InputError("decide --from needs --count >= 1");
    hrt::BinnedDistribution p = hrt::load_distribution(from_path);
    if (p.kind() == hrt::SupportKind::Bins &&
        spec.p1.kind() == hrt::SupportKind::Bins && !p.same_support(spec.p1)) {
      auto [p1a, pa] = hrt::align_supports(spec.p1, p);
      auto [p2a, pb] = hrt::align_supports(spec.p2, pa);
      spec.p1 = std::move(p1a);
      spec.p2 = std::move(p2a);
      p = std::move(pb);
      if (!spec.p1.same_support(spec.p2) || !spec.p1.same_support(p)) {
        throw hrt::InputError("decide: could not align --a/--b/--from grids");
      }
    }
    batch = hrt::sample(p, static_cast<std::size_t>(count),
                        resolve_seed(seed_flag));
  } else {
    throw hrt::InputError("decide: pass --samples or --from");
  }

  const hrt::TestDecision d = hrt::run_test(spec, batch);
  ordered_json j = envelope("decide", batch.seed);
  j["test"] = test_name;
  j["verdict"] = d.verdict == hrt::Verdict::H0 ? "H0" : "H1";
  j["statistic_value"] = json_number(d.statistic_value);
  j["tie_broken"] = d.tie_broken;
  j["sample_count"] = batch.atom_indices.size();
  emit(j, out);
  return 0;
}

int run_lower_bound(double b, double a1, double a2, std::int64_t bins,
                    std::int64_t m, std::int64_t trials,
                    const std::optional<std::uint64_t>& seed_flag,
                    const std::string& test_name, int threads,
                    const std::string& out) {
  const hrt::FamilyParams params{b, a1, a2, bins};
  params.validate();
  const hrt::DistanceProfile prof =
      hrt::family_distance_profile(params, hrt::FamilySide::PerturbP1);
  const double pe = hrt::collision_probability(params, m);
  const double tvb = hrt::conditioning_tv_bound(0.0, 1.0 - pe, 1.0 - pe);

  const std::uint64_t seed = resolve_seed(seed_flag);
  ordered_json j = envelope("lower-bound", seed);
  j["params"] = {{"b", b}, {"a1", a1}, {"a2", a2}, {"num_bins_half", bins},
                 {"m", m}};
  j["distance_profile"] = {{"h2_to_p1", prof.h2_to_p1},
                           {"h2_to_p2", prof.h2_to_p2},
                           {"chi2_to_p1", prof.chi2_to_p1},
                           {"chi2_to_p2", prof.chi2_to_p2}};
  j["ratio"] = prof.h2_to_p2 / prof.h2_to_p1;
  j["chi2_ratio"] = prof.chi2_to_p2 / prof.chi2_to_p1;
  j["collision_prob"] = pe;
  j["tv_bound"] = tvb;
  j["lecam_floor"] = hrt::lecam_floor(tvb);
  if (trials > 0) {
    const hrt::AdversarialErrorEstimate est =
        hrt::indistinguishability_experiment(
            params, m,
            hrt::family_test(hrt::test_family_from_name(test_name), params),
            trials, seed, threads);
    j["empirical_error"] = {{"test", test_name},
                            {"d1_error", est.d1_error},
                            {"d2_error", est.d2_error},
                            {"avg_error", est.avg_error},
                            {"max_error", est.max_error},
                            {"ci_halfwidth", est.ci_halfwidth},
                            {"trials", est.trials}};
  } else {
    j["empirical_error"] = nullptr;
  }
  emit(j, out);
  return 0;
}

int run_simulate(const std::string& config_path,
                 const std::optional<std::uint64_t>& seed_flag, int threads,
                 const std::string& format, const std::string& out) {
  hrt::ExperimentConfig cfg = hrt::load_experiment_config(config_path);
  if (seed_flag.has_value()) cfg.seed = *seed_flag;
  if (threads > 0) cfg.threads = threads;
  const hrt::ErrorEstimate est = hrt::estimate_error(cfg);
  if (format == "csv") {
    emit_text(std::string(kCsvHeader) + estimate_csv_row(cfg.sample_count, est),
              out);
    return 0;
  }
  ordered_json j = envelope("simulate", cfg.seed);
  j["config"] = {{"test", hrt::test_family_name(cfg.family)},
                 {"m", cfg.sample_count},
                 {"trials", cfg.trials},
                 {"gamma", cfg.gamma},
                 {"delta", cfg.delta}};
  j["estimate"] = estimate_to_json(est);
  emit(j, out);
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& m_list,
              const std::optional<std::uint64_t>& seed_flag, int threads,
              const std::string& format, const std::string& out) {
  hrt::ExperimentConfig cfg = hrt::load_experiment_config(config_path);
  if (seed_flag.has_value()) cfg.seed = *seed_flag;
  if (threads > 0) cfg.threads = threads;

  std::vector<std::int64_t> grid;
  std::size_t pos = 0;
  while (pos < m_list.size()) {
    const std::size_t comma = m_list.find(',', pos);
    const std::string tok =
        m_list.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      grid.push_back(std::stoll(tok));
    } catch (const std::exception&) {
      throw hrt::InputError("sweep: bad m value '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }

  const auto table = hrt::sample_complexity_sweep(cfg, grid);
  if (format == "csv") {
    std::string text = kCsvHeader;
    for (const auto& [m, est] : table) text += estimate_csv_row(m, est);
    emit_text(text, out);
    return 0;
  }
  ordered_json j = envelope("sweep", cfg.seed);
  j["config"] = {{"test", hrt::test_family_name(cfg.family)},
                 {"trials", cfg.trials},
                 {"gamma", cfg.gamma},
                 {"delta", cfg.delta}};
  ordered_json rows = ordered_json::array();
  for (const auto& [m, est] : table) {
    ordered_json row = estimate_to_json(est);
    row["m"] = m;
    rows.push_back(std::move(row));
  }
  j["table"] = std::move(rows);
  emit(j, out);
  return 0;
}

int run_reproduce(const std::string& preset,
                  const std::optional<std::uint64_t>& seed_flag,
                  const std::string& out) {
  std::vector<std::string> names;
  if (preset == "all") {
    names = hrt::preset_names();
  } else {
    names.push_back(preset);
  }
  bool all_pass = true;
  ordered_json reports = ordered_json::array();
  for (const std::string& name : names) {
    const hrt::PresetReport r = seed_flag.has_value()
                                    ? hrt::reproduce_paper(name, *seed_flag)
                                    : hrt::reproduce_paper(name);
    all_pass = all_pass && r.pass;
    ordered_json jr;
    jr["preset"] = r.name;
    jr["pass"] = r.pass;
    jr["details"] = r.details;
    reports.push_back(std::move(jr));
  }
  ordered_json j = envelope("reproduce", seed_flag.value_or(0));
  j["pass"] = all_pass;
  j["reports"] = std::move(reports);
  emit(j, out);
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust two-hypothesis testing with respect to Hellinger distance"};
  app.require_subcommand(1);

  std::string a_path, b_path, out_path;
  std::string samples_path, from_path, config_path;
  std::string test_name = "baraud";
  std::string preset_name, m_list, format = "json";
  double phi = 0.0;
  bool midpoint = false;
  std::int64_t count = 0, m = 1, trials = 0, bins = 1;
  double fb = 1.0, fa1 = 1.0, fa2 = 1.0;
  int threads = 0;
  std::optional<std::uint64_t> seed_flag;

  const auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_flag,
                    "RNG seed (omit for an entropy seed, echoed in the report)");
  };
  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "write the report here instead of stdout");
  };

  CLI::App* distances = app.add_subcommand(
      "distances", "all pairwise divergences between two distributions");
  distances->add_option("--a", a_path, "distribution JSON")->required();
  distances->add_option("--b", b_path, "distribution JSON")->required();
  add_out(distances);

  CLI::App* geodesic = app.add_subcommand(
      "geodesic", "Hellinger geodesic point, midpoint, and critical radius");
  geodesic->add_option("--a", a_path, "distribution JSON")->required();
  geodesic->add_option("--b", b_path, "distribution JSON")->required();
  CLI::Option* phi_opt =
      geodesic->add_option("--phi", phi, "geodesic angle in [0, theta]");
  geodesic->add_flag("--midpoint", midpoint,
                     "emit the Hellinger midpoint and r*");
  add_out(geodesic);

  CLI::App* decide = app.add_subcommand(
      "decide", "run one robust test on a sample batch");
  decide->add_option("--test", test_name, "ml|scheffe|baraud|disjoint|midpoint")
      ->required();
  decide->add_option("--a", a_path, "model p1 JSON")->required();
  decide->add_option("--b", b_path, "model p2 JSON")->required();
  decide->add_option("--samples", samples_path, "sample batch JSON");
  decide->add_option("--from", from_path,
                     "draw the batch from this distribution instead");
  decide->add_option("--count", count, "batch size for --from");
  add_seed(decide);
  add_out(decide);

  CLI::App* lower = app.add_subcommand(
      "lower-bound", "two-family construction: distance profile, collision "
                     "schedule, Le Cam floor, optional Monte Carlo error");
  lower->add_option("--b", fb, "base density split, in (0, 1]")->required();
  lower->add_option("--a1", fa1, "added spike height, >= b")->required();
  lower->add_option("--a2", fa2, "removed spike height, in [b, 1+b]")->required();
  lower->add_option("--bins", bins, "half bin count N")->required();
  lower->add_option("--m", m, "samples per trial")->required();
  lower->add_option("--trials", trials, "Monte Carlo trials (0: skip)");
  lower->add_option("--test", test_name, "test family for the experiment");
  lower->add_option("--threads", threads, "worker threads (0: HRT_THREADS/auto)");
  add_seed(lower);
  add_out(lower);

  CLI::App* simulate =
      app.add_subcommand("simulate", "estimate test error from a config file");
  simulate->add_option("--config", config_path, "experiment config JSON")
      ->required();
  simulate->add_option("--threads", threads, "worker threads override");
  simulate->add_option("--format", format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  add_seed(simulate);
  add_out(simulate);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "sample-complexity sweep over a comma-separated m grid");
  sweep->add_option("--config", config_path, "experiment config JSON")
      ->required();
  sweep->add_option("--m", m_list, "ascending list, e.g. 10,50,100")->required();
  sweep->add_option("--threads", threads, "worker threads override");
  sweep->add_option("--format", format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  add_seed(sweep);
  add_out(sweep);

  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "re-measure a headline number (or 'all') and report pass/fail");
  reproduce->add_option("--preset", preset_name, "preset name or 'all'")
      ->required();
  add_seed(reproduce);
  add_out(reproduce);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cerr << "run with --help for the subcommand grammar\n";
    return 1;
  }

  try {
    if (distances->parsed()) return run_distances(a_path, b_path, out_path);
    if (geodesic->parsed()) {
      return run_geodesic(a_path, b_path, phi, midpoint, phi_opt->count() > 0,
                          out_path);
    }
    if (decide->parsed()) {
      return run_decide(test_name, a_path, b_path, samples_path, from_path,
                        count, seed_flag, out_path);
    }
    if (lower->parsed()) {
      return run_lower_bound(fb, fa1, fa2, bins, m, trials, seed_flag,
                             test_name, threads, out_path);
    }
    if (simulate->parsed()) {
      return run_simulate(config_path, seed_flag, threads, format, out_path);
    }
    if (sweep->parsed()) {
      return run_sweep(config_path, m_list, seed_flag, threads, format, out_path);
    }
    if (reproduce->parsed()) {
      return run_reproduce(preset_name, seed_flag, out_path);
    }
  } catch (const hrt::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
