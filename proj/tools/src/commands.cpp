#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"
#include "dataset.hpp"
#include "manifest.hpp"
#include "powergain/errors.hpp"
#include "powergain/pipeline.hpp"
#include "powergain/simulate.hpp"
#include "report.hpp"

#ifndef POWERGAIN_VERSION
#define POWERGAIN_VERSION "unknown"
#endif

namespace powergain::cli {
namespace {

using nlohmann::json;

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const json::exception& e) {
    err << "error: malformed report: " << e.what() << '\n';
    return kExitParseError;
  } catch (const EstimationError& e) {
    err << "estimation failed: " << e.what() << '\n';
    if (std::string_view(e.what()).find("caliper") != std::string_view::npos) {
      err << "hint: widen the caliper window with a larger --const-C\n";
    }
    return kExitEstimationError;
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitInvalidFlags;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitInvalidFlags;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

RunManifest make_manifest(const std::string& command, json config, const std::string& dataset) {
  RunManifest m;
  m.command = command;
  m.config = std::move(config);
  if (!dataset.empty()) {
    m.dataset_path = dataset;
    m.dataset_sha256 = sha256_hex(read_file(dataset));
  }
  m.version = POWERGAIN_VERSION;
  m.timestamp = utc_timestamp();
  return m;
}

void emit(const std::string& text, const std::string& path, const RunManifest& manifest, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << text;
  write_sidecar(manifest, path);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive");
}

TuningConfig tuning_from(const EstimateFlags& f) {
  require_positive(f.c2, "--c2");
  TuningConfig cfg;
  cfg.c = std::sqrt(f.c2);
  cfg.cv = f.cv;
  cfg.alpha = f.alpha;
  cfg.sigma_t2 = f.sigma_t2;
  cfg.const_c = f.const_c;
  cfg.const_d = f.const_d;
  cfg.n_effective = 2;
  cfg.validate();
  return cfg;
}

EstimateOptions options_from(const EstimateFlags& f) {
  EstimateOptions opts;
  opts.publication_bias = !f.no_pb;
  if (f.scale_by == "tscores") {
    opts.scale_by = ScaleBy::TScores;
  } else if (f.scale_by == "studies") {
    opts.scale_by = ScaleBy::Studies;
  } else {
    throw std::invalid_argument("--scale-by must be tscores or studies");
  }
  opts.clamp_ci_at_zero = f.clamp_ci_at_zero;
  return opts;
}

json config_json(const EstimateFlags& f) {
  return {{"c2", f.c2},           {"cv", f.cv},
          {"alpha", f.alpha},     {"sigma_t2", f.sigma_t2},
          {"const_C", f.const_c}, {"const_D", f.const_d},
          {"scale_by", f.scale_by}, {"publication_bias", !f.no_pb},
          {"clamp_ci_at_zero", f.clamp_ci_at_zero}};
}

std::vector<double> parse_grid(const std::string& grid) {
  std::vector<double> out;
  std::stringstream ss(grid);
  std::string field;
  while (std::getline(ss, field, ',')) {
    double v = 0.0;
    if (!parse_real(field, v)) throw std::invalid_argument("--grid: cannot parse '" + field + "'");
    if (v < 1.0) throw std::invalid_argument("--grid: c^2 values must be >= 1");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("--grid is empty");
  return out;
}

void warn_diagnostics(const std::vector<std::string>& diagnostics, std::ostream& err) {
  for (const auto& d : diagnostics) err << d << '\n';
}

void add_estimate_flags(CLI::App* cmd, EstimateFlags& f) {
  cmd->add_option("dataset", f.dataset, "Delimited file with column t and optional study_id")->required();
  cmd->add_option("--c2", f.c2, "Sample-size multiplier c^2")->capture_default_str();
  cmd->add_option("--cv", f.cv, "Critical value")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "1 - confidence level")->capture_default_str();
  cmd->add_option("--sigma-t2", f.sigma_t2, "Reference variance sigma_T^2")->capture_default_str();
  cmd->add_option("--const-C", f.const_c, "Caliper constant: eps = C n^(-1/3)")->capture_default_str();
  cmd->add_option("--const-D", f.const_d, "Spectral cutoff constant")->capture_default_str();
  cmd->add_option("--scale-by", f.scale_by, "Count driving the tuning rule")
      ->check(CLI::IsMember({"tscores", "studies"}))
      ->capture_default_str();
  cmd->add_flag("--no-pb", f.no_pb, "Skip the publication-bias correction");
  cmd->add_flag("--clamp-ci-at-zero", f.clamp_ci_at_zero, "Truncate the reported interval at 0");
  cmd->add_option("--out", f.out, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--output", f.output, "Write to this file (a manifest sidecar is added)");
}

}  // namespace

int cmd_estimate(const EstimateFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Format format = parse_format(flags.out);
    const TuningConfig cfg = tuning_from(flags);
    const EstimateOptions opts = options_from(flags);
    const TScoreSample sample = load_tscores(flags.dataset);
    const EstimateReport report = estimate_power_gain(sample, cfg, opts);
    if (format != Format::Text) warn_diagnostics(report.diagnostics, err);
    const RunManifest manifest = make_manifest("estimate", config_json(flags), flags.dataset);
    std::string text;
    switch (format) {
      case Format::Text: text = render_text(report); break;
      case Format::Csv: text = render_csv(report); break;
      case Format::Json: {
        json j = to_json(report);
        j["manifest"] = to_json(manifest);
        text = j.dump(2) + "\n";
        break;
      }
    }
    emit(text, flags.output, manifest, out);
    return kExitOk;
  });
}

int cmd_curve(const CurveFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Format format = parse_format(flags.base.out);
    const std::vector<double> grid = parse_grid(flags.grid);
    const TuningConfig cfg = tuning_from(flags.base);
    const EstimateOptions opts = options_from(flags.base);
    const TScoreSample sample = load_tscores(flags.base.dataset);
    if (!sample.has_study_ids()) {
      err << "warning: no study identifiers; every t-score treated as its own cluster (iid assumption)\n";
    }
    const auto curve = power_gain_curve(sample, cfg, grid, opts);
    json config = config_json(flags.base);
    config["grid"] = grid;
    emit(render_curve(curve, format), flags.base.output, make_manifest("curve", config, flags.base.dataset), out);
    return kExitOk;
  });
}

int cmd_simulate(const SimulateFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Format format = parse_format(flags.out);
    if (flags.reps < 1) throw std::invalid_argument("--reps must be >= 1");
    require_positive(flags.c2, "--c2");
    std::vector<sim::PresetRow> rows;
    if (flags.table) {
      rows = sim::table_preset(*flags.table);
      if (!flags.dgp.empty()) {
        const sim::Prior p = sim::parse_prior(flags.dgp);
        std::erase_if(rows, [&](const sim::PresetRow& r) { return r.spec.prior != p; });
      }
      if (!flags.noise.empty()) {
        const sim::Noise nz = sim::parse_noise(flags.noise);
        for (auto& r : rows) r.spec.noise = nz;
      }
      if (flags.n) {
        const bool listed = std::any_of(rows.begin(), rows.end(), [&](const auto& r) { return r.n == *flags.n; });
        if (listed) {
          std::erase_if(rows, [&](const sim::PresetRow& r) { return r.n != *flags.n; });
        } else {
          for (auto& r : rows) r.n = *flags.n;
          std::erase_if(rows, [&, seen = std::vector<sim::Prior>{}](const sim::PresetRow& r) mutable {
            if (std::find(seen.begin(), seen.end(), r.spec.prior) != seen.end()) return true;
            seen.push_back(r.spec.prior);
            return false;
          });
        }
      }
    } else {
      if (flags.dgp.empty()) throw std::invalid_argument("simulate needs --dgp or --table");
      sim::PresetRow row;
      row.spec.prior = sim::parse_prior(flags.dgp);
      row.spec.noise = flags.noise.empty() ? sim::Noise::Normal : sim::parse_noise(flags.noise);
      row.n = flags.n.value_or(500);
      rows.push_back(row);
    }
    TuningConfig cfg;
    cfg.const_c = flags.const_c;
    cfg.const_d = flags.const_d;
    for (auto& r : rows) {
      r.spec.theta0 = flags.theta0;
      r.spec.c = std::sqrt(flags.c2);
      r.spec.cv = flags.cv;
      r.spec.validate();
    }

    json config = {{"table", flags.table ? json(*flags.table) : json(nullptr)},
                   {"dgp", flags.dgp},
                   {"noise", flags.noise},
                   {"reps", flags.reps},
                   {"theta0", flags.theta0},
                   {"c2", flags.c2},
                   {"cv", flags.cv},
                   {"const_C", flags.const_c},
                   {"const_D", flags.const_d}};
    RunManifest manifest = make_manifest("simulate", config, "");
    manifest.seed = flags.seed;

    std::ofstream file;
    if (!flags.output.empty()) {
      file.open(flags.output);
      if (!file) throw std::runtime_error("cannot write '" + flags.output + "'");
    }
    std::ostream& sink = flags.output.empty() ? out : file;
    const sim::CoverageOptions opts{flags.threads};
    std::vector<sim::CoverageRow> results;
    const char delim = format == Format::Text ? '\t' : ',';
    if (format != Format::Json) sink << sim::coverage_header(delim) << '\n' << std::flush;
    for (const auto& r : rows) {
      results.push_back(sim::run_coverage(r.spec, r.n, flags.reps, cfg, flags.seed, opts));
      if (results.back().failures > 0) {
        err << "note: " << results.back().failures << " of " << flags.reps << " replications for "
            << r.spec.label() << " n=" << r.n << " had an empty caliper bin and were excluded\n";
      }
      if (format != Format::Json) sink << sim::format_row(results.back(), delim) << '\n' << std::flush;
    }
    if (format == Format::Json) sink << render_coverage(results, Format::Json);
    if (!flags.output.empty()) write_sidecar(manifest, flags.output);
    return kExitOk;
  });
}

int cmd_conditional(const ConditionalFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Format format = parse_format(flags.out);
    require_positive(flags.c2, "--c2");
    ConditionalSe mode = ConditionalSe::Independent;
    if (flags.se == "worstcase") {
      mode = ConditionalSe::WorstCase;
    } else if (flags.se != "iid") {
      throw std::invalid_argument("--se must be iid or worstcase");
    }
    const auto groups = load_conditional(flags.dataset);
    if (mode == ConditionalSe::WorstCase) {
      for (const auto& g : groups) {
        if (g.sites.empty()) throw ParseError("--se worstcase needs a site_id column");
      }
    }
    const ConditionalResult result = conditional_delta(groups, std::sqrt(flags.c2), flags.cv, mode);
    json config = {{"c2", flags.c2}, {"cv", flags.cv}, {"se", flags.se}};
    emit(render_conditional(result, flags.c2, flags.se, format), flags.output,
         make_manifest("conditional", config, flags.dataset), out);
    return kExitOk;
  });
}

int cmd_render(const RenderFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Format format = parse_format(flags.out);
    const json j = json::parse(read_file(flags.report));
    const EstimateReport report = report_from_json(j);
    std::string text;
    switch (format) {
      case Format::Text: text = render_text(report); break;
      case Format::Csv: text = render_csv(report); break;
      case Format::Json: text = to_json(report).dump(2) + "\n"; break;
    }
    emit(text, flags.output, make_manifest("render", json{{"out", flags.out}}, flags.report), out);
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual statistical power from published t-scores"};
  app.set_version_flag("--version", std::string(POWERGAIN_VERSION));
  app.require_subcommand(1);

  EstimateFlags est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the power gain from a t-score file");
  add_estimate_flags(estimate, est);

  CurveFlags curve_flags;
  auto* curve = app.add_subcommand("curve", "Power gain over a grid of c^2");
  add_estimate_flags(curve, curve_flags.base);
  curve->add_option("--grid", curve_flags.grid, "Comma-separated c^2 values (>= 1)")->capture_default_str();

  SimulateFlags sf;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage experiment");
  simulate->add_option("--table", sf.table, "Preset of coverage table 1, 2 or 3")->check(CLI::Range(1, 3));
  simulate->add_option("--dgp", sf.dgp, "truenull|cauchy|bimodal|large|slope|uniform|fitted");
  simulate->add_option("--noise", sf.noise, "normal|t30|lognormal");
  simulate->add_option("--n", sf.n, "Retained t-scores per replication")->check(CLI::Range(2, 100000000));
  simulate->add_option("--reps", sf.reps, "Replications")->capture_default_str();
  simulate->add_option("--seed", sf.seed, "Seed")->capture_default_str();
  simulate->add_option("--theta0", sf.theta0, "Publication probability of insignificant scores")
      ->capture_default_str();
  simulate->add_option("--c2", sf.c2, "Sample-size multiplier c^2")->capture_default_str();
  simulate->add_option("--cv", sf.cv, "Critical value")->capture_default_str();
  simulate->add_option("--const-C", sf.const_c, "Caliper constant")->capture_default_str();
  simulate->add_option("--const-D", sf.const_d, "Spectral cutoff constant")->capture_default_str();
  simulate->add_option("--threads", sf.threads, "Worker threads (0: all cores)")->capture_default_str();
  simulate->add_option("--out", sf.out, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  simulate->add_option("--output", sf.output, "Write to this file (a manifest sidecar is added)");

  ConditionalFlags cf;
  auto* conditional = app.add_subcommand("conditional", "Power gain conditional on in-sample effects");
  conditional->add_option("dataset", cf.dataset, "Columns group_id, effect, std_error, weight[, site_id]")
      ->required();
  conditional->add_option("--c2", cf.c2, "Sample-size multiplier c^2")->capture_default_str();
  conditional->add_option("--cv", cf.cv, "Critical value")->capture_default_str();
  conditional->add_option("--se", cf.se, "Standard error mode")
      ->check(CLI::IsMember({"iid", "worstcase"}))
      ->capture_default_str();
  conditional->add_option("--out", cf.out, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  conditional->add_option("--output", cf.output, "Write to this file (a manifest sidecar is added)");

  RenderFlags rf;
  auto* render = app.add_subcommand("render", "Re-render a JSON estimate report");
  render->add_option("report", rf.report, "JSON written by estimate --out json")->required();
  render->add_option("--out", rf.out, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  render->add_option("--output", rf.output, "Write to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidFlags;
  }

  if (estimate->parsed()) return cmd_estimate(est, out, err);
  if (curve->parsed()) return cmd_curve(curve_flags, out, err);
  if (simulate->parsed()) return cmd_simulate(sf, out, err);
  if (conditional->parsed()) return cmd_conditional(cf, out, err);
  return cmd_render(rf, out, err);
}

}  // namespace powergain::cli
