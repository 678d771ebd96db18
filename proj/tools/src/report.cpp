#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace powergain::cli {
namespace {

using nlohmann::json;

std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string brief(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string general(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

double read_number(const json& j, const char* key) {
  const json& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string ci_label(double alpha) {
  std::ostringstream os;
  os << (1.0 - alpha) * 100.0 << "% CI";
  return os.str();
}

void line(std::ostringstream& os, const std::string& key, const std::string& value) {
  os << "  " << key;
  for (std::size_t k = key.size(); k < 20; ++k) os << ' ';
  os << value << '\n';
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "text") return Format::Text;
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  throw std::invalid_argument("unknown output format '" + name + "'; valid: text, json, csv");
}

std::string render_text(const EstimateReport& r) {
  std::ostringstream os;
  os << "power gain at c^2 = " << brief(r.c2()) << '\n';
  line(os, "delta_hat", fixed(r.delta_hat));
  line(os, "std_error", fixed(r.std_error));
  line(os, ci_label(r.alpha),
       "[" + fixed(r.ci_low) + ", " + fixed(r.ci_high) + "]" + (r.ci_clamped ? " (truncated at 0)" : ""));
  if (r.theta_hat) {
    std::string v = fixed(*r.theta_hat, 3);
    if (r.theta_std_error) v += " (se " + fixed(*r.theta_std_error, 3) + ")";
    line(os, "theta_hat", v);
  } else {
    line(os, "theta_hat", "not modelled (--no-pb)");
  }
  line(os, "status_quo_power", fixed(r.status_quo_power));
  line(os, "J", std::to_string(r.J));
  line(os, "epsilon", fixed(r.epsilon));
  line(os, "n", std::to_string(r.n));
  line(os, "n_effective", std::to_string(r.n_effective) + " (scale by " + r.scale_by + ")");
  line(os, "clusters", std::to_string(r.n_clusters) + " (largest " + std::to_string(r.max_cluster_size) + ")");
  os << "config: cv=" << brief(r.cv) << " alpha=" << brief(r.alpha) << " sigma_t2=" << brief(r.sigma_t2)
     << " C=" << brief(r.const_c) << " D=" << brief(r.const_d) << '\n';
  for (const auto& d : r.diagnostics) os << d << '\n';
  return os.str();
}

std::string render_csv(const EstimateReport& r) {
  std::ostringstream os;
  os << "c2,delta_hat,std_error,ci_low,ci_high,ci_clamped,theta_hat,theta_std_error,status_quo_power,"
        "J,epsilon,n,n_effective,n_clusters,max_cluster_size,cv,alpha,sigma_t2,const_C,const_D,scale_by\n";
  auto opt = [](const std::optional<double>& v) { return v ? general(*v) : std::string(); };
  os << general(r.c2()) << ',' << general(r.delta_hat) << ',' << general(r.std_error) << ','
     << general(r.ci_low) << ',' << general(r.ci_high) << ',' << (r.ci_clamped ? 1 : 0) << ','
     << opt(r.theta_hat) << ',' << opt(r.theta_std_error) << ',' << general(r.status_quo_power) << ','
     << r.J << ',' << general(r.epsilon) << ',' << r.n << ',' << r.n_effective << ',' << r.n_clusters
     << ',' << r.max_cluster_size << ',' << general(r.cv) << ',' << general(r.alpha) << ','
     << general(r.sigma_t2) << ',' << general(r.const_c) << ',' << general(r.const_d) << ','
     << r.scale_by << '\n';
  return os.str();
}

json to_json(const EstimateReport& r) {
  json j;
  j["delta_hat"] = number(r.delta_hat);
  j["std_error"] = number(r.std_error);
  j["ci_low"] = number(r.ci_low);
  j["ci_high"] = number(r.ci_high);
  j["ci_clamped"] = r.ci_clamped;
  j["theta_hat"] = optional_number(r.theta_hat);
  j["theta_std_error"] = optional_number(r.theta_std_error);
  j["c"] = r.c;
  j["c2"] = r.c2();
  j["cv"] = r.cv;
  j["alpha"] = r.alpha;
  j["sigma_t2"] = r.sigma_t2;
  j["const_C"] = r.const_c;
  j["const_D"] = r.const_d;
  j["scale_by"] = r.scale_by;
  j["J"] = r.J;
  j["epsilon"] = r.epsilon;
  j["n"] = r.n;
  j["n_effective"] = r.n_effective;
  j["n_clusters"] = r.n_clusters;
  j["max_cluster_size"] = r.max_cluster_size;
  j["status_quo_power"] = r.status_quo_power;
  j["B_plus"] = optional_number(r.B_plus);
  j["B_minus"] = optional_number(r.B_minus);
  j["Q_hat"] = optional_number(r.Q_hat);
  j["diagnostics"] = r.diagnostics;
  return j;
}

EstimateReport report_from_json(const json& j) {
  EstimateReport r;
  r.delta_hat = read_number(j, "delta_hat");
  r.std_error = read_number(j, "std_error");
  r.ci_low = read_number(j, "ci_low");
  r.ci_high = read_number(j, "ci_high");
  r.ci_clamped = j.at("ci_clamped").get<bool>();
  r.theta_hat = read_optional(j, "theta_hat");
  r.theta_std_error = read_optional(j, "theta_std_error");
  r.c = j.at("c").get<double>();
  r.cv = j.at("cv").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.sigma_t2 = j.at("sigma_t2").get<double>();
  r.const_c = j.at("const_C").get<double>();
  r.const_d = j.at("const_D").get<double>();
  r.scale_by = j.at("scale_by").get<std::string>();
  r.J = j.at("J").get<int>();
  r.epsilon = j.at("epsilon").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.n_effective = j.at("n_effective").get<std::size_t>();
  r.n_clusters = j.at("n_clusters").get<std::size_t>();
  r.max_cluster_size = j.at("max_cluster_size").get<std::size_t>();
  r.status_quo_power = j.at("status_quo_power").get<double>();
  r.B_plus = read_optional(j, "B_plus");
  r.B_minus = read_optional(j, "B_minus");
  r.Q_hat = read_optional(j, "Q_hat");
  r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  return r;
}

std::string render_curve(std::span<const CurvePoint> curve, Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::Json: {
      json rows = json::array();
      for (const auto& p : curve) {
        rows.push_back({{"c2", p.c2},
                        {"delta_hat", number(p.delta)},
                        {"std_error", number(p.std_error)},
                        {"ci_low", number(p.ci_low)},
                        {"ci_high", number(p.ci_high)}});
      }
      os << json{{"curve", rows}}.dump(2) << '\n';
      break;
    }
    case Format::Csv:
      os << "c2,delta_hat,std_error,ci_low,ci_high\n";
      for (const auto& p : curve) {
        os << general(p.c2) << ',' << general(p.delta) << ',' << general(p.std_error) << ','
           << general(p.ci_low) << ',' << general(p.ci_high) << '\n';
      }
      break;
    case Format::Text:
      os << "      c2   delta_hat   std_error      ci_low     ci_high\n";
      for (const auto& p : curve) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%8.3f  %10.4f  %10.4f  %10.4f  %10.4f\n", p.c2, p.delta, p.std_error,
                      p.ci_low, p.ci_high);
        os << buf;
      }
      break;
  }
  return os.str();
}

std::string render_coverage(std::span<const sim::CoverageRow> rows, Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::Json: {
      json out = json::array();
      for (const auto& r : rows) {
        out.push_back({{"n", r.n},
                       {"dgp", r.dgp},
                       {"noise", r.noise},
                       {"theta0", r.theta0},
                       {"unc_power", r.true_power},
                       {"delta_c", r.true_delta},
                       {"mean_delta", number(r.mean_delta)},
                       {"sd_delta", number(r.sd_delta)},
                       {"mean_se", number(r.mean_se)},
                       {"coverage", number(r.coverage)},
                       {"reps", r.reps},
                       {"failures", r.failures},
                       {"seed", r.seed}});
      }
      os << json{{"rows", out}}.dump(2) << '\n';
      break;
    }
    case Format::Csv:
      os << sim::coverage_header(',') << '\n';
      for (const auto& r : rows) os << sim::format_row(r, ',') << '\n';
      break;
    case Format::Text:
      os << sim::coverage_header('\t') << '\n';
      for (const auto& r : rows) os << sim::format_row(r, '\t') << '\n';
      break;
  }
  return os.str();
}

std::string render_conditional(const ConditionalResult& result, double c2, const std::string& se_mode,
                               Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::Json:
      os << json{{"c2", c2},
                 {"delta", result.delta},
                 {"std_error", number(result.std_error)},
                 {"members", result.members},
                 {"se_mode", se_mode}}
                .dump(2)
         << '\n';
      break;
    case Format::Csv:
      os << "c2,delta,std_error,members,se_mode\n"
         << general(c2) << ',' << general(result.delta) << ',' << general(result.std_error) << ','
         << result.members << ',' << se_mode << '\n';
      break;
    case Format::Text:
      os << "conditional power gain at c^2 = " << brief(c2) << '\n';
      line(os, "delta", fixed(result.delta));
      line(os, "std_error", fixed(result.std_error) + " (" + se_mode + ")");
      line(os, "members", std::to_string(result.members));
      break;
  }
  return os.str();
}

}  // namespace powergain::cli
